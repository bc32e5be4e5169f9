#include "fogforge/evolutionary.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "fogforge/rng.hpp"

namespace fogforge {

void EvoConfig::validate() const {
  if (population_size < 2 || population_size % 2 != 0)
    throw ConfigError("population_size must be even and >= 2");
  if (generations < 0) throw ConfigError("generations must be >= 0");
  if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) throw ConfigError("mutation_prob must be in [0,1]");
  if (tournament_size < 1) throw ConfigError("tournament_size must be >= 1");
}

namespace {

constexpr int kDuplicateBudget = 100'000;

class Variation {
 public:
  Variation(const EvoConfig& config, std::size_t genes, std::size_t devices, Rng& rng)
      : config_(config), genes_(genes), devices_(devices), rng_(rng) {}

  Chromosome random() {
    Chromosome c;
    c.genes.resize(genes_);
    for (int& g : c.genes) g = static_cast<int>(rng_.index(devices_));
    return c;
  }

  std::vector<Chromosome> initial_population() {
    std::vector<Chromosome> pop;
    for (const Chromosome& c : config_.initial) {
      if (pop.size() == static_cast<std::size_t>(config_.population_size)) break;
      if (c.genes.size() != genes_) throw ConfigError("seeded chromosome has the wrong length");
      for (int g : c.genes)
        if (g < 0 || static_cast<std::size_t>(g) >= devices_) throw ConfigError("seeded chromosome gene out of range");
      pop.push_back(c);
    }
    while (pop.size() < static_cast<std::size_t>(config_.population_size)) pop.push_back(random());
    return pop;
  }

  // Two complementary children.
  std::pair<Chromosome, Chromosome> cross(const Chromosome& a, const Chromosome& b) {
    Chromosome x = a, y = b;
    if (config_.crossover == CrossoverKind::Uniform) {
      for (std::size_t g = 0; g < genes_; ++g)
        if (rng_.bernoulli(0.5)) std::swap(x.genes[g], y.genes[g]);
    } else {
      std::size_t lo = rng_.index(genes_ + 1), hi = rng_.index(genes_ + 1);
      if (lo > hi) std::swap(lo, hi);
      for (std::size_t g = lo; g < hi; ++g) std::swap(x.genes[g], y.genes[g]);
    }
    return {std::move(x), std::move(y)};
  }

  void mutate(Chromosome& c) {
    if (config_.mutation == MutationMode::Offspring) {
      if (rng_.bernoulli(config_.mutation_prob))
        c.genes[rng_.index(genes_)] = static_cast<int>(rng_.index(devices_));
      return;
    }
    const double rate = config_.mutation_prob / static_cast<double>(genes_);
    for (int& g : c.genes)
      if (rng_.bernoulli(rate)) g = static_cast<int>(rng_.index(devices_));
  }

 private:
  const EvoConfig& config_;
  std::size_t genes_, devices_;
  Rng& rng_;
};

Placement to_placement(const Chromosome& c) { return Placement{c.genes}; }

}  // namespace

GaResult ga_solve(const Application& app, const DeviceSet& devices, const WeightVector& weights,
                  const EvoConfig& config) {
  config.validate();
  validate_devices(devices);
  WeightVector::make(weights.time, weights.cost);
  const NormalizationBounds bounds = default_bounds(app, devices);
  Rng rng(config.seed);
  Variation var(config, app.service_count(), devices.size(), rng);

  auto fitness_of = [&](const Chromosome& c) {
    return weighted_objective(evaluate(app, to_placement(c), devices), weights, bounds);
  };

  std::vector<Chromosome> pop = var.initial_population();
  std::vector<double> fit(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) fit[i] = fitness_of(pop[i]);

  auto best_index = [&] {
    return static_cast<std::size_t>(std::min_element(fit.begin(), fit.end()) - fit.begin());
  };
  Chromosome best = pop[best_index()];
  double best_fit = fit[best_index()];

  GaResult out;
  out.best_history.push_back(best_fit);

  auto tournament = [&]() -> const Chromosome& {
    std::size_t winner = rng.index(pop.size());
    for (int t = 1; t < config.tournament_size; ++t) {
      const std::size_t c = rng.index(pop.size());
      if (fit[c] < fit[winner]) winner = c;
    }
    return pop[winner];
  };

  for (int gen = 0; gen < config.generations; ++gen) {
    std::vector<Chromosome> next;
    next.reserve(pop.size());
    next.push_back(pop[best_index()]);  // elitism
    while (next.size() < pop.size()) {
      const Chromosome& a = tournament();
      const Chromosome& b = tournament();
      auto [x, y] = var.cross(a, b);
      var.mutate(x);
      var.mutate(y);
      next.push_back(std::move(x));
      if (next.size() < pop.size()) next.push_back(std::move(y));
    }
    pop = std::move(next);
    for (std::size_t i = 0; i < pop.size(); ++i) fit[i] = fitness_of(pop[i]);
    const std::size_t bi = best_index();
    if (fit[bi] < best_fit) {
      best_fit = fit[bi];
      best = pop[bi];
    }
    out.best_history.push_back(best_fit);
  }

  out.placement = to_placement(best);
  out.point = evaluate(app, out.placement, devices);
  out.fitness = best_fit;
  return out;
}

std::vector<int> fast_nondominated_sort(const std::vector<ObjectivePoint>& points) {
  const std::size_t n = points.size();
  std::vector<int> rank(n, -1);
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<int> count(n, 0);
  std::vector<std::size_t> current;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (dominates(points[p], points[q]))
        dominated[p].push_back(q);
      else if (dominates(points[q], points[p]))
        ++count[p];
    }
    if (count[p] == 0) {
      rank[p] = 0;
      current.push_back(p);
    }
  }
  int r = 0;
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t p : current)
      for (std::size_t q : dominated[p])
        if (--count[q] == 0) {
          rank[q] = r + 1;
          next.push_back(q);
        }
    ++r;
    current = std::move(next);
  }
  return rank;
}

std::vector<double> crowding_distance(const std::vector<ObjectivePoint>& points,
                                      const std::vector<std::size_t>& front) {
  const std::size_t m = front.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(m, 0.0);
  if (m <= 2) {
    std::fill(dist.begin(), dist.end(), inf);
    return dist;
  }
  for (int obj = 0; obj < 2; ++obj) {
    auto value = [&](std::size_t k) { return obj == 0 ? points[front[k]].time : points[front[k]].cost; };
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value(a) < value(b); });
    dist[order.front()] = inf;
    dist[order.back()] = inf;
    const double span = value(order.back()) - value(order.front());
    if (span <= 0.0) {
      // every member shares this objective value; all are boundary members
      std::fill(dist.begin(), dist.end(), inf);
      continue;
    }
    for (std::size_t k = 1; k + 1 < m; ++k)
      dist[order[k]] += (value(order[k + 1]) - value(order[k - 1])) / span;
  }
  return dist;
}

namespace {

struct Ranked {
  std::vector<int> rank;
  std::vector<double> crowding;
};

Ranked rank_population(const std::vector<ObjectivePoint>& points) {
  Ranked r;
  r.rank = fast_nondominated_sort(points);
  r.crowding.assign(points.size(), 0.0);
  const int max_rank = points.empty() ? -1 : *std::max_element(r.rank.begin(), r.rank.end());
  for (int k = 0; k <= max_rank; ++k) {
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < points.size(); ++i)
      if (r.rank[i] == k) front.push_back(i);
    const std::vector<double> d = crowding_distance(points, front);
    for (std::size_t j = 0; j < front.size(); ++j) r.crowding[front[j]] = d[j];
  }
  return r;
}

bool crowded_less(const Ranked& r, std::size_t a, std::size_t b) {
  if (r.rank[a] != r.rank[b]) return r.rank[a] < r.rank[b];
  return r.crowding[a] > r.crowding[b];
}

std::vector<ObjectivePoint> rank0_points(const std::vector<ObjectivePoint>& points, const std::vector<int>& rank) {
  std::vector<ObjectivePoint> out;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (rank[i] == 0) out.push_back(points[i]);
  return out;
}

}  // namespace

NsgaResult nsga2_solve(const Application& app, const DeviceSet& devices, const EvoConfig& config) {
  config.validate();
  validate_devices(devices);
  const NormalizationBounds bounds = default_bounds(app, devices);
  const ObjectivePoint reference{bounds.max_time, bounds.max_cost};
  Rng rng(config.seed);
  Variation var(config, app.service_count(), devices.size(), rng);
  const std::size_t n = static_cast<std::size_t>(config.population_size);

  std::vector<Chromosome> pop = var.initial_population();
  std::vector<ObjectivePoint> pts(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) pts[i] = evaluate(app, to_placement(pop[i]), devices);
  Ranked ranked = rank_population(pts);

  NsgaResult out;
  out.hypervolume_history.push_back(hypervolume(rank0_points(pts, ranked.rank), reference));

  auto tournament = [&]() -> const Chromosome& {
    std::size_t winner = rng.index(pop.size());
    for (int t = 1; t < std::max(config.tournament_size, 2); ++t) {
      const std::size_t c = rng.index(pop.size());
      if (crowded_less(ranked, c, winner)) winner = c;
    }
    return pop[winner];
  };

  for (int gen = 0; gen < config.generations; ++gen) {
    std::vector<Chromosome> merged = pop;
    std::vector<ObjectivePoint> merged_pts = pts;
    std::set<std::vector<int>> known;
    for (const Chromosome& c : pop) known.insert(c.genes);
    int rejected = 0;
    while (merged.size() < 2 * n) {
      const Chromosome& a = tournament();
      const Chromosome& b = tournament();
      auto [x, y] = var.cross(a, b);
      var.mutate(x);
      var.mutate(y);
      for (Chromosome* c : {&x, &y}) {
        if (merged.size() == 2 * n) break;
        // Offspring repeating a known chromosome are redrawn, up to a budget
        // that keeps tiny search spaces from looping forever.
        if (config.eliminate_duplicates && !known.insert(c->genes).second && rejected < kDuplicateBudget) {
          ++rejected;
          continue;
        }
        merged_pts.push_back(evaluate(app, to_placement(*c), devices));
        merged.push_back(std::move(*c));
      }
    }

    const Ranked mr = rank_population(merged_pts);
    std::vector<std::size_t> order(merged.size());
    std::iota(order.begin(), order.end(), 0);
    // Whole fronts by rank, the last partial front by descending crowding.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return crowded_less(mr, a, b); });
    order.resize(n);

    std::vector<Chromosome> next;
    std::vector<ObjectivePoint> next_pts;
    next.reserve(n);
    for (std::size_t i : order) {
      next.push_back(std::move(merged[i]));
      next_pts.push_back(merged_pts[i]);
    }
    pop = std::move(next);
    pts = std::move(next_pts);
    ranked = rank_population(pts);
    out.population_history.push_back(pop.size());
    out.hypervolume_history.push_back(hypervolume(rank0_points(pts, ranked.rank), reference));
  }

  std::vector<std::size_t> front;
  for (std::size_t i = 0; i < pop.size(); ++i)
    if (ranked.rank[i] == 0) front.push_back(i);
  std::stable_sort(front.begin(), front.end(), [&](std::size_t a, std::size_t b) {
    return std::make_pair(pts[a].time, pts[a].cost) < std::make_pair(pts[b].time, pts[b].cost);
  });
  for (std::size_t i : front) {
    if (!out.front.empty() && out.front.back() == pts[i]) continue;
    out.front.push_back(pts[i]);
    out.placements.push_back(to_placement(pop[i]));
  }
  return out;
}

}  // namespace fogforge
