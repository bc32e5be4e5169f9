// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/commands.hpp"
#include "cli/run_dir.hpp"
#include "fixtures.hpp"
#include "fogforge/baselines.hpp"
#include "fogforge/evolutionary.hpp"
#include "fogforge/oracle.hpp"
#include "fogforge/ppo.hpp"
#include "fogforge/trainer.hpp"
#include "oracles/finite_diff.hpp"
#include "oracles/pareto_scan.hpp"
#include "oracles/reference_eval.hpp"

using namespace fogforge;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------------------

Verdict worked_example() {
  const Application app = fixtures::fig1_app();
  const DeviceSet devices = fixtures::fig1_devices();
  const Placement p = fixtures::fig1_placement();
  const double t = response_time(app, p, devices);
  const std::vector<double> contrib = latency_contributions(app, p, devices);
  const std::vector<double> expected{0, 0, 0, 6, 6, 0, 10, 10, 3};
  const oracle::RefApp ref = fixtures::to_ref(app);
  const auto ref_devices = fixtures::to_ref(devices);
  const double t_ref = oracle::ref_time(ref, p.device_of, ref_devices);
  const bool pass = t == 53.0 && t_ref == 53.0 && contrib == expected &&
                    oracle::ref_contributions(ref, p.device_of, ref_devices) == expected;
  return {pass, "T_app=" + fmt(t) + " (reference " + fmt(t_ref) + "), contributions " +
                    (contrib == expected ? "match" : "differ")};
}

Verdict table_trajectory() {
  PlacementEnv env(fixtures::table2_app(), fixtures::table2_devices());
  const WeightVector w{1, 0};
  std::vector<double> times{env.state().objectives.time};
  std::vector<double> rewards{-env.state().objectives.time};
  for (auto [s, d] : std::vector<std::pair<std::size_t, int>>{{0, 1}, {1, 2}, {2, 3}}) {
    const StepResult r = env.step({s, d}, w);
    times.push_back(r.state.objectives.time);
    rewards.push_back(r.reward.r_time);
  }
  const double total = std::accumulate(rewards.begin(), rewards.end(), 0.0);
  const bool pass = times == std::vector<double>{60, 75, 77, 47} &&
                    rewards == std::vector<double>{-60, -15, -2, 30} && -total == 47.0;
  std::string detail = "T:";
  for (double t : times) detail += " " + fmt(t);
  detail += "; rewards:";
  for (double r : rewards) detail += " " + fmt(r);
  return {pass, detail + "; -sum=" + fmt(-total)};
}

Verdict telescoping() {
  Rng rng(2024);
  double worst_time = 0.0, worst_cost = 0.0;
  for (int k = 0; k < 1000; ++k) {
    ScenarioConfig sc;
    sc.device_count = 1 + static_cast<int>(rng.index(20));
    sc.rows_per_app = 3;
    sc.op_count = 1 + static_cast<double>(rng.index(5));
    sc.seed = rng.next();
    const Scenario s = generate_scenario(sc);
    PlacementEnv env(s.applications[0], s.devices);
    const ObjectivePoint start = env.state().objectives;
    double rt = 0.0, rc = 0.0;
    while (!env.state().done()) {
      const auto mask = eligible_services(env.state());
      std::vector<std::size_t> eligible;
      for (std::size_t v = 0; v < mask.size(); ++v)
        if (mask[v]) eligible.push_back(v);
      const std::size_t service = eligible[rng.index(eligible.size())];
      const int device = static_cast<int>(rng.index(s.devices.size()));
      const StepResult r = env.step({service, device}, WeightVector{});
      rt += r.reward.r_time;
      rc += r.reward.r_cost;
    }
    const ObjectivePoint end = env.state().objectives;
    worst_time = std::max(worst_time, std::abs(rt - (start.time - end.time)));
    worst_cost = std::max(worst_cost, std::abs(rc - (start.cost - end.cost)));
  }
  return {worst_time <= 1e-9 && worst_cost <= 1e-9,
          "1000 trajectories, max |error| time " + fmt(worst_time) + ", cost " + fmt(worst_cost)};
}

Verdict oracle_equivalence() {
  int nsga_exact = 0, ga_match = 0;
  const int scenarios = 10;
  for (int k = 0; k < scenarios; ++k) {
    ScenarioConfig sc;
    sc.device_count = 2;  // plus the cloud: three devices
    sc.rows_per_app = 3;
    sc.seed = 1000 + static_cast<std::uint64_t>(k);
    const Scenario s = generate_scenario(sc);
    const Application& app = s.applications[0];
    const WeightVector w{0.5, 0.5};
    const OracleResult o = brute_force_oracle(app, s.devices, {w});

    // independent check of the enumerated front
    std::vector<oracle::Pt> all;
    const auto ref = fixtures::to_ref(app);
    const auto ref_dev = fixtures::to_ref(s.devices);
    std::vector<int> genes(app.service_count(), 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == genes.size()) {
        all.push_back({oracle::ref_time(ref, genes, ref_dev), oracle::ref_cost(genes, ref_dev)});
        return;
      }
      for (std::size_t d = 0; d < s.devices.size(); ++d) {
        genes[i] = static_cast<int>(d);
        rec(i + 1);
      }
    };
    rec(0);
    const auto ref_front = oracle::ref_front(all);
    if (ref_front.size() != o.front.size()) return {false, "oracle front disagrees with reference scan"};

    EvoConfig cfg;
    cfg.population_size = 50;
    cfg.generations = 100;
    cfg.seed = static_cast<std::uint64_t>(k) + 1;
    const NsgaResult n = nsga2_solve(app, s.devices, cfg);
    if (n.front == o.front) ++nsga_exact;
    const GaResult g = ga_solve(app, s.devices, w, cfg);
    if (std::abs(g.fitness - o.optima[0].value) <= 1e-9) ++ga_match;
  }
  return {nsga_exact >= 9 && ga_match >= 9, "NSGA-II exact fronts " + std::to_string(nsga_exact) + "/" +
                                                std::to_string(scenarios) + ", GA weighted optimum " +
                                                std::to_string(ga_match) + "/" + std::to_string(scenarios)};
}

Verdict dominant_device() {
  int ok = 0;
  const int scenarios = 5;
  for (int k = 0; k < scenarios; ++k) {
    ScenarioConfig sc;
    sc.device_count = 3;
    sc.rows_per_app = 3;
    sc.op_count = 0;
    sc.dominant_device = true;
    sc.seed = 500 + static_cast<std::uint64_t>(k);
    const Scenario s = generate_scenario(sc);
    const Application& app = s.applications[0];
    const ObjectivePoint edge = run_baseline(StrategyKind::GreedyEdge, app, s.devices).point;
    const ObjectivePoint cost = run_baseline(StrategyKind::GreedyCost, app, s.devices).point;
    const OracleResult o = brute_force_oracle(app, s.devices);
    if (o.front.size() == 1 && edge == o.front[0] && cost == o.front[0]) ++ok;
  }
  return {ok == scenarios, std::to_string(ok) + "/" + std::to_string(scenarios) +
                               " scenarios with GreedyEdge = GreedyCost = unique oracle front point"};
}

Verdict baseline_ordering() {
  const int scenarios = 20;
  double edge = 0.0, cloud = 0.0, random = 0.0;
  for (int k = 0; k < scenarios; ++k) {
    ScenarioConfig sc;
    sc.device_count = 20;
    sc.rows_per_app = 3;
    sc.seed = 7000 + static_cast<std::uint64_t>(k);
    const Scenario s = generate_scenario(sc);
    const Application& app = s.applications[0];
    const NormalizationBounds nb = default_bounds(app, s.devices);
    const WeightVector w{0.5, 0.5};
    edge += weighted_objective(run_baseline(StrategyKind::GreedyEdge, app, s.devices).point, w, nb);
    cloud += weighted_objective(run_baseline(StrategyKind::AllInCloud, app, s.devices).point, w, nb);
    random += weighted_objective(
        run_baseline(StrategyKind::RandomDevices, app, s.devices, sc.seed).point, w, nb);
  }
  edge /= scenarios;
  cloud /= scenarios;
  random /= scenarios;
  return {edge <= cloud && cloud <= random && edge < random,
          "mean objective GreedyEdge " + fmt(edge) + ", AllInCloud " + fmt(cloud) + ", Random " + fmt(random)};
}

double baseline_mean(StrategyKind kind, const std::vector<Scenario>& scenarios, const WeightVector& w,
                     std::uint64_t seed) {
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < scenarios.size(); ++i)
    for (std::size_t a = 0; a < scenarios[i].applications.size(); ++a) {
      const Application& app = scenarios[i].applications[a];
      const ObjectivePoint p = run_baseline(kind, app, scenarios[i].devices, derive_seed(seed, i, a)).point;
      total += weighted_objective(p, w, default_bounds(app, scenarios[i].devices));
      ++count;
    }
  return total / static_cast<double>(count);
}

Verdict learning_signal() {
  int wins = 0;
  std::string detail;
  double slowest = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    TrainConfig cfg = TrainConfig::desk_scale();
    cfg.seed = seed;
    const Datasets data = make_datasets(cfg.scenario, cfg.train_size, cfg.test_size, cfg.validation_size, seed);
    const auto start = Clock::now();
    const TrainResult r = train(cfg, data);
    slowest = std::max(slowest, seconds_since(start));
    const double drl = evaluate_policy(r.best, data.test, cfg.weights).mean_objective;
    const double cloud = baseline_mean(StrategyKind::AllInCloud, data.test, cfg.weights, seed);
    const double random = baseline_mean(StrategyKind::RandomDevices, data.test, cfg.weights, seed);
    const bool win = !r.diverged && drl <= cloud && drl < random;
    wins += win ? 1 : 0;
    detail += "seed " + std::to_string(seed) + ": drl " + fmt(drl) + " cloud " + fmt(cloud) + " random " +
              fmt(random) + (win ? "" : " (miss)") + "; ";
  }
  return {wins >= 4 && slowest <= 900.0,
          std::to_string(wins) + "/5 seeds; slowest " + fmt(slowest) + " s; " + detail};
}

Verdict sweep_output(const fs::path& work) {
  std::ostringstream out, err;
  const fs::path dir = work / "sweep";
  const int code = cli::run_cli({"sweep", "--preset", "desk", "--episodes", "6", "--envs", "4", "--seed", "11",
                                 "--out", dir.string()},
                                out, err);
  if (code != 0) return {false, "sweep exited with " + std::to_string(code) + ": " + err.str()};
  const auto rows = cli::read_solutions(dir / "solutions.csv");
  const Scenario eval = load_scenario(dir / "eval_scenario.json");
  const std::set<std::pair<double, double>> expected{{0, 1}, {0.25, 0.75}, {0.5, 0.5}, {0.75, 0.25}, {1, 0}};
  std::set<std::pair<double, double>> seen;
  bool valid = rows.size() == 5;
  std::vector<oracle::Pt> pts;
  for (const auto& r : rows) {
    if (!r.weights) return {false, "row without weights"};
    seen.insert({r.weights->time, r.weights->cost});
    const Application& app = eval.applications[static_cast<std::size_t>(r.app)];
    try {
      validate_placement(app, r.placement, eval.devices);
      valid = valid && evaluate(app, r.placement, eval.devices) == r.point;
    } catch (const std::exception&) {
      valid = false;
    }
    pts.push_back({r.point.time, r.point.cost});
  }
  std::size_t flags_ok = 0, non_dominated = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    bool dom = false;
    for (std::size_t j = 0; j < rows.size(); ++j) dom = dom || oracle::ref_dominates(pts[j], pts[i]);
    flags_ok += dom == rows[i].dominated ? 1 : 0;
    non_dominated += dom ? 0 : 1;
  }
  const auto report = nlohmann::json::parse(cli::read_text(dir / "report.json"));
  const bool reported = report.at("non_dominated").size() == non_dominated;
  return {valid && seen == expected && flags_ok == rows.size() && reported,
          std::to_string(rows.size()) + " points, weights " + (seen == expected ? "complete" : "incomplete") +
              ", placements " + (valid ? "valid" : "invalid") + ", " + std::to_string(non_dominated) +
              " non-dominated reported"};
}

// Gradient checks -----------------------------------------------------------

nn::Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double scale = 1.0) {
  nn::Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * (2.0 * rng.uniform() - 1.0);
  return m;
}

Verdict gradient_integrity() {
  constexpr int kCases = 50;
  constexpr double kTol = 1e-4;
  // small step: batch norm over a handful of rows is sharply curved, and the
  // h^2 truncation term dominates at larger steps
  constexpr double kStep = 1e-6;
  Rng rng(99);
  std::vector<std::pair<std::string, double>> worst;

  double e = 0.0;
  for (int c = 0; c < kCases; ++c) {
    nn::ParameterSet ps;
    nn::MlpSpec spec;
    spec.input_dim = 1 + static_cast<int>(rng.index(5));
    spec.hidden_dims.assign(rng.index(3), 2 + static_cast<int>(rng.index(5)));
    spec.output_dim = 1 + static_cast<int>(rng.index(3));
    spec.activation = rng.bernoulli(0.5) ? nn::Activation::Tanh : nn::Activation::Relu;
    const nn::Mlp mlp(ps, "m", spec, rng);
    const nn::Matrix x = random_matrix(3, spec.input_dim, rng);
    const nn::Matrix w = random_matrix(3, spec.output_dim, rng);
    auto loss = [&](const nn::Var& in) { return nn::sum(nn::mul(mlp.forward(in), nn::Var::constant(w))); };
    e = std::max(e, oracle::check_parameter_gradients(ps.trainable(), [&] { return loss(nn::Var::constant(x)); }, kStep)
                        .max_rel_error);
    e = std::max(e, oracle::check_gradients([&](const auto& v) { return loss(v[0]); }, {x}, kStep).max_rel_error);
  }
  worst.emplace_back("mlp", e);

  e = 0.0;
  for (int c = 0; c < kCases; ++c) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.index(6));
    const Eigen::Index f = 1 + static_cast<Eigen::Index>(rng.index(4));
    const nn::Matrix x = random_matrix(n, f, rng, 2.0);
    const nn::Matrix g = random_matrix(1, f, rng).array() + 1.5;
    const nn::Matrix b = random_matrix(1, f, rng);
    const nn::Matrix w = random_matrix(n, f, rng);
    e = std::max(e, oracle::check_gradients(
                        [&](const auto& v) {
                          return nn::sum(nn::mul(nn::batch_norm(v[0], v[1], v[2], 1e-5), nn::Var::constant(w)));
                        },
                        {x, g, b}, kStep)
                        .max_rel_error);
  }
  worst.emplace_back("batch norm", e);

  e = 0.0;
  for (int c = 0; c < kCases; ++c) {
    nn::ParameterSet ps;
    GinConfig gc;
    gc.hidden_dim = 4;
    gc.mlp_layers = 2;
    gc.epsilon_init = rng.uniform();
    const GinEncoder gin(ps, "g", gc, rng);
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.index(5));
    const nn::Matrix x = random_matrix(n, 5, rng);
    nn::Matrix adj = nn::Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j)
        if (rng.bernoulli(0.5)) adj(i, j) = adj(j, i) = 1.0;
    const nn::Matrix w = random_matrix(1, 4, rng);
    auto loss = [&](const nn::Var& in) {
      const GraphEmbedding emb = gin.forward(in, adj);
      return nn::add(nn::sum(nn::mul(emb.pooled, nn::Var::constant(w))), nn::mean(nn::square(emb.nodes)));
    };
    e = std::max(e, oracle::check_parameter_gradients(ps.trainable(), [&] { return loss(nn::Var::constant(x)); }, kStep)
                        .max_rel_error);
    e = std::max(e, oracle::check_gradients([&](const auto& v) { return loss(v[0]); }, {x}, kStep).max_rel_error);
  }
  worst.emplace_back("gin", e);

  e = 0.0;
  for (int c = 0; c < kCases; ++c) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.index(8));
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(n), 1);
    for (auto& m : mask) m = rng.bernoulli(0.7) ? 1 : 0;
    mask[rng.index(mask.size())] = 1;
    std::vector<Eigen::Index> picks;
    for (Eigen::Index i = 0; i < n; ++i)
      if (mask[static_cast<std::size_t>(i)]) picks.push_back(i);
    const nn::Matrix logits = random_matrix(n, 1, rng, 3.0);
    const nn::Matrix coef = random_matrix(static_cast<Eigen::Index>(picks.size()), 1, rng);
    e = std::max(e, oracle::check_gradients(
                        [&](const auto& v) {
                          const nn::Var lp = nn::masked_log_softmax(v[0], mask);
                          nn::Var total = nn::scale(nn::categorical_entropy(lp), 0.3);
                          for (std::size_t k = 0; k < picks.size(); ++k)
                            total = nn::add(total, nn::scale(nn::pick(lp, picks[k]), coef(static_cast<Eigen::Index>(k), 0)));
                          return total;
                        },
                        {logits}, kStep)
                        .max_rel_error);
  }
  worst.emplace_back("log-softmax", e);

  e = 0.0;
  for (int c = 0; c < kCases; ++c) {
    PolicyConfig pc;
    pc.service_count = 4;
    pc.gin.hidden_dim = 4;
    pc.gin.mlp_layers = 2;
    pc.actor_width = 4;
    pc.actor_hidden_layers = 1;
    pc.critic_width = 4;
    pc.critic_hidden_layers = 1;
    pc.init_seed = rng.next();
    const PolicyModel model(pc);
    ScenarioConfig sc;
    sc.device_count = 3;
    sc.rows_per_app = 2;
    sc.seed = rng.next();
    const Scenario s = generate_scenario(sc);
    PlacementEnv env(s.applications[0], s.devices);
    Trajectory t;
    Rng act_rng(rng.next());
    while (!env.state().done()) {
      Transition tr;
      tr.state = env.state();
      tr.mask = eligible_services(tr.state);
      const Decision d = model.act(tr.state, SelectMode::Sample, &act_rng);
      tr.service = d.service;
      tr.device = d.device;
      // shift the old probabilities so some ratios fall inside and some
      // outside the clip range, away from the kinks
      const double shifts[] = {-0.6, -0.1, 0.1, 0.6};
      tr.log_prob_service = d.log_prob_service + shifts[act_rng.index(4)];
      tr.log_prob_device = d.log_prob_device + shifts[act_rng.index(4)];
      tr.value_service = d.value_service + 2.0 * act_rng.uniform() - 1.0;
      tr.value_device = d.value_device + 2.0 * act_rng.uniform() - 1.0;
      tr.reward = env.step({d.service, d.device}, WeightVector{}).reward.r_total;
      t.steps.push_back(std::move(tr));
    }
    e = std::max(e, oracle::check_parameter_gradients(
                        model.params().trainable(),
                        [&] { return ppo_loss(model, std::span<const Trajectory>(&t, 1), PpoConfig{}).total; }, kStep)
                        .max_rel_error);
  }
  worst.emplace_back("ppo loss", e);

  bool pass = true;
  std::string detail = std::to_string(kCases) + " cases each, max relative error:";
  for (const auto& [name, err] : worst) {
    pass = pass && err < kTol;
    detail += " " + name + " " + fmt(err);
  }
  return {pass, detail};
}

Verdict permutation_invariance() {
  Rng rng(4242);
  nn::ParameterSet ps;
  const GinEncoder gin(ps, "g", GinConfig{}, rng);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.index(20));
    const nn::Matrix x = random_matrix(n, 5, rng);
    nn::Matrix adj = nn::Matrix::Zero(n, n);
    const double p = rng.uniform();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j)
        if (rng.bernoulli(p)) adj(i, j) = adj(j, i) = 1.0;
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size(); i-- > 1;) std::swap(perm[i], perm[rng.index(i + 1)]);
    nn::Matrix pm = nn::Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) pm(i, perm[static_cast<std::size_t>(i)]) = 1.0;
    const nn::Matrix a = gin.forward(nn::Var::constant(x), adj).pooled.value();
    const nn::Matrix b = gin.forward(nn::Var::constant(pm * x), pm * adj * pm.transpose()).pooled.value();
    worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-9, "100 graphs, max |h_g difference| " + fmt(worst)};
}

Verdict inference_latency() {
  ScenarioConfig sc;
  sc.device_count = 1000;
  sc.rows_per_app = 9;
  sc.seed = 81;
  const Scenario s = generate_scenario(sc);
  PolicyConfig pc;
  pc.service_count = 81;
  const PolicyModel model(pc);
  const auto start = Clock::now();
  const InferenceResult r = infer_placement(model, s.applications[0], s.devices);
  const double elapsed = seconds_since(start);
  bool legal = true;
  try {
    validate_placement(s.applications[0], r.placement, s.devices);
  } catch (const std::exception&) {
    legal = false;
  }
  return {legal && elapsed < 1.0, "1000 devices, 81 services: " + fmt(elapsed * 1000.0) + " ms"};
}

Verdict determinism(const fs::path& work) {
  const fs::path scenario = work / "det_scenario.json";
  std::ostringstream sink;
  if (cli::run_cli({"generate", "--devices", "6", "--rows", "3", "--apps", "2", "--seed", "12", "--out",
                    scenario.string()},
                   sink, sink) != 0)
    return {false, "generate failed"};
  const std::string sc = scenario.string();
  const std::vector<std::vector<std::string>> commands{
      {"baseline", "--scenario", sc, "--strategy", "all", "--seed", "3"},
      {"evo", "--scenario", sc, "--algo", "ga", "--population", "30", "--generations", "20", "--seed", "3"},
      {"evo", "--scenario", sc, "--algo", "nsga2", "--population", "30", "--generations", "20", "--seed", "3"},
      {"oracle", "--scenario", sc, "--cap", "100000000"},
      {"train", "--episodes", "3", "--envs", "3", "--train-size", "3", "--test-size", "2", "--validation-size",
       "1", "--threads", "1", "--seed", "3", "--eval-scenario", sc},
      {"sweep", "--episodes", "2", "--envs", "2", "--train-size", "2", "--test-size", "1", "--validation-size",
       "1", "--threads", "1", "--seed", "3", "--eval-scenario", sc},
  };
  int identical = 0;
  std::string detail;
  for (std::size_t k = 0; k < commands.size(); ++k) {
    std::string first, second;
    for (int rep = 0; rep < 2; ++rep) {
      auto args = commands[k];
      const fs::path out = work / ("det_" + std::to_string(k) + "_" + std::to_string(rep));
      args.insert(args.end(), {"--out", out.string()});
      std::ostringstream o, err;
      if (cli::run_cli(args, o, err) != 0) return {false, commands[k][0] + " failed: " + err.str()};
      (rep == 0 ? first : second) = cli::read_text(out / "solutions.csv");
    }
    if (first == second && !first.empty()) ++identical;
    else detail += " " + commands[k][0] + " differs;";
  }
  // infer on the trained checkpoint
  std::string a, b;
  for (int rep = 0; rep < 2; ++rep) {
    const fs::path out = work / ("det_infer_" + std::to_string(rep));
    std::ostringstream o, err;
    if (cli::run_cli({"infer", "--model", (work / "det_4_0/checkpoints/best.json").string(), "--scenario", sc,
                      "--out", out.string()},
                     o, err) != 0)
      return {false, "infer failed: " + err.str()};
    (rep == 0 ? a : b) = cli::read_text(out / "solutions.csv");
  }
  const int total = static_cast<int>(commands.size()) + 1;
  if (a == b) ++identical;
  return {identical == total,
          std::to_string(identical) + "/" + std::to_string(total) + " commands byte-identical on rerun" + detail};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = fs::temp_directory_path() / ("fogforge_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"worked example response time", worked_example},
      {"scripted trajectory accounting", table_trajectory},
      {"telescoping rewards", telescoping},
      {"evolutionary oracle equivalence", oracle_equivalence},
      {"dominant device", dominant_device},
      {"baseline ordering", baseline_ordering},
      {"DRL learning signal", learning_signal},
      {"sweep output", [&] { return sweep_output(work); }},
      {"gradient integrity", gradient_integrity},
      {"GIN permutation invariance", permutation_invariance},
      {"inference latency", inference_latency},
      {"determinism", [&] { return determinism(work); }},
  };

  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto start = Clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << " [" << id << "] " << criteria[i].first << ": " << v.detail << " ("
              << fmt(seconds_since(start)) << " s)" << std::endl;
  }
  fs::remove_all(work);
  return failed == 0 ? 0 : 1;
}
