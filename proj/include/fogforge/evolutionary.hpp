#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "fogforge/model.hpp"

namespace fogforge {

/// genes[g] is the device of service g, row-major.
struct Chromosome {
  std::vector<int> genes;

  friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

enum class MutationMode {
  /// Each offspring mutates with probability mutation_prob and then redraws
  /// exactly one uniformly chosen gene.
  Offspring,
  /// Every gene redraws independently with probability mutation_prob / genes.
  PerGene,
};

enum class CrossoverKind {
  /// Per-gene coin flip between the parents.
  Uniform,
  /// Swap the gene segment between two random cut points.
  TwoPoint,
};

struct EvoConfig {
  int population_size = 200;
  int generations = 200;
  double mutation_prob = 0.15;
  MutationMode mutation = MutationMode::Offspring;
  CrossoverKind crossover = CrossoverKind::Uniform;
  int tournament_size = 2;
  std::uint64_t seed = 1;
  /// NSGA-II only: offspring identical to a chromosome already in the
  /// parent+offspring pool are discarded and redrawn.
  bool eliminate_duplicates = true;
  /// Seeds the initial population; the remainder is drawn uniformly.
  std::vector<Chromosome> initial;

  /// Throws ConfigError.
  void validate() const;
};

struct GaResult {
  Placement placement;
  ObjectivePoint point;
  double fitness = 0.0;
  /// Best-ever fitness after the initial population and after each generation.
  std::vector<double> best_history;
};

/// Weighted-sum generational GA with tournament selection, uniform crossover
/// and elitism of one. Fitness uses default_bounds of the instance.
GaResult ga_solve(const Application& app, const DeviceSet& devices, const WeightVector& weights,
                  const EvoConfig& config);

struct NsgaResult {
  /// Rank-0 front of the final population, sorted by (time, cost), duplicate
  /// points collapsed.
  std::vector<ObjectivePoint> front;
  std::vector<Placement> placements;
  /// Rank-0 hypervolume (reference = default_bounds) per generation,
  /// starting with the initial population.
  std::vector<double> hypervolume_history;
  /// Population size after each generation.
  std::vector<std::size_t> population_history;
};

NsgaResult nsga2_solve(const Application& app, const DeviceSet& devices, const EvoConfig& config);

/// Front index of every point; rank 0 is the non-dominated set.
std::vector<int> fast_nondominated_sort(const std::vector<ObjectivePoint>& points);

/// Crowding distance of each member of one front (indices into `points`).
/// Boundary members get +infinity.
std::vector<double> crowding_distance(const std::vector<ObjectivePoint>& points,
                                      const std::vector<std::size_t>& front);

}  // namespace fogforge
