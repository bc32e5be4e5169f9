#include "cli/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/run_dir.hpp"
#include "cli/svg.hpp"
#include "fogforge/baselines.hpp"
#include "fogforge/evolutionary.hpp"
#include "fogforge/nn/checkpoint.hpp"
#include "fogforge/oracle.hpp"
#include "fogforge/trainer.hpp"

namespace fogforge::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class DivergenceExit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flag, then FOGFORGE_SEED, then `fallback`.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback = 1) {
  if (flag) return *flag;
  if (const char* env = std::getenv("FOGFORGE_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("FOGFORGE_SEED is not an unsigned integer: '") + env + "'");
  }
  return fallback;
}

Scenario read_scenario(const fs::path& path) {
  if (!fs::exists(path)) throw InputError("scenario file not found: " + path.string());
  return load_scenario(path);
}

const Application& pick_app(const Scenario& s, int app) {
  if (app < 0 || static_cast<std::size_t>(app) >= s.applications.size())
    throw ConfigError("scenario has no application " + std::to_string(app));
  return s.applications[static_cast<std::size_t>(app)];
}

std::string placement_text(const Application& app, const Placement& p) {
  std::string s;
  for (int r = 0; r < app.rows(); ++r) {
    s += "  ";
    for (int c = 0; c < app.cols(); ++c) {
      if (c) s += ' ';
      s += std::to_string(p.device_of[app.index({r, c})]);
    }
    s += '\n';
  }
  return s;
}

// ---------------------------------------------------------------------------

struct ScenarioFlags {
  std::optional<int> devices, rows, cols, apps;
  std::optional<double> extra_edge_prob;
  bool dominant = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--devices", devices, "Number of non-cloud devices");
    cmd->add_option("--rows", rows, "Rows (service chains) per application");
    cmd->add_option("--cols", cols, "Services per row (default: same as rows)");
    cmd->add_option("--apps", apps, "Applications per scenario");
    cmd->add_option("--extra-edge-prob", extra_edge_prob, "Probability of an extra dependency per service");
    cmd->add_flag("--dominant", dominant, "Include a device with minimum latency and cost");
  }
  void apply(ScenarioConfig& c) const {
    if (devices) c.device_count = *devices;
    if (rows) c.rows_per_app = *rows;
    if (cols) c.cols_per_app = *cols;
    if (apps) c.app_count = *apps;
    if (extra_edge_prob) c.extra_edge_prob = *extra_edge_prob;
    if (dominant) c.dominant_device = true;
  }
};

struct GenerateOpts {
  ScenarioFlags scenario;
  std::string config, out;
  std::optional<std::uint64_t> seed;
};

int cmd_generate(const GenerateOpts& o, std::ostream& out) {
  ScenarioConfig cfg;
  if (!o.config.empty()) cfg = ScenarioConfig::from_json(read_text(o.config));
  o.scenario.apply(cfg);
  cfg.seed = resolve_seed(o.seed, cfg.seed);
  cfg.validate();
  const Scenario s = generate_scenario(cfg);
  save_scenario(s, o.out);
  out << "wrote " << o.out << ": " << s.devices.size() << " devices, " << s.applications.size()
      << " application(s) of " << cfg.rows_per_app * cfg.cols() << " services\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct TrainOpts {
  ScenarioFlags scenario;
  std::string preset = "default", config, out, eval_scenario;
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes, envs, eval_interval, train_size, test_size, validation_size, threads;
  std::optional<double> w_time, lr;
};

void attach_train(CLI::App* cmd, TrainOpts& o, bool with_weights) {
  o.scenario.attach(cmd);
  cmd->add_option("--preset", o.preset, "Base settings: default, desk or paper")
      ->check(CLI::IsMember({"default", "desk", "paper"}));
  cmd->add_option("--config", o.config, "Training config JSON; flags override it");
  cmd->add_option("--out", o.out, "Run directory")->required();
  cmd->add_option("--eval-scenario", o.eval_scenario,
                  "Scenario used for solutions.csv (default: first validation scenario)");
  cmd->add_option("--seed", o.seed, "Base seed (falls back to FOGFORGE_SEED, then 1)");
  cmd->add_option("--episodes", o.episodes, "Training episodes");
  cmd->add_option("--envs", o.envs, "Environments per episode");
  cmd->add_option("--eval-interval", o.eval_interval, "Episodes between test evaluations");
  cmd->add_option("--train-size", o.train_size, "Training scenarios");
  cmd->add_option("--test-size", o.test_size, "Test scenarios");
  cmd->add_option("--validation-size", o.validation_size, "Validation scenarios");
  cmd->add_option("--threads", o.threads, "Worker threads (1 is bit-reproducible)");
  cmd->add_option("--lr", o.lr, "Initial learning rate");
  if (with_weights) cmd->add_option("--w-time", o.w_time, "Time weight; cost weight is 1 - w_time");
}

TrainConfig build_train_config(const TrainOpts& o) {
  TrainConfig c = o.preset == "desk" ? TrainConfig::desk_scale()
                  : o.preset == "paper" ? TrainConfig::paper_scale()
                                        : TrainConfig{};
  if (!o.config.empty()) c = TrainConfig::from_json(read_text(o.config), c);
  o.scenario.apply(c.scenario);
  c.seed = resolve_seed(o.seed, c.seed);
  if (o.episodes) c.episodes = *o.episodes;
  if (o.envs) c.envs_per_episode = *o.envs;
  if (o.eval_interval) c.eval_interval = *o.eval_interval;
  if (o.train_size) c.train_size = *o.train_size;
  if (o.test_size) c.test_size = *o.test_size;
  if (o.validation_size) c.validation_size = *o.validation_size;
  if (o.threads) c.threads = *o.threads;
  if (o.lr) c.learning_rate = *o.lr;
  if (o.w_time) c.weights = WeightVector::make(*o.w_time, 1.0 - *o.w_time);
  c.validate();
  return c;
}

Scenario eval_scenario(const TrainOpts& o, const Datasets& data, RunDir& run) {
  if (!o.eval_scenario.empty()) return read_scenario(o.eval_scenario);
  save_scenario(data.validation.front(), run.path("eval_scenario.json"));
  run.add_output("eval_scenario.json");
  return data.validation.front();
}

void append_policy_rows(std::vector<SolutionRow>& rows, const std::string& method, const PolicyModel& model,
                        const Scenario& s, const WeightVector& w) {
  for (std::size_t a = 0; a < s.applications.size(); ++a) {
    const InferenceResult r = infer_placement(model, s.applications[a], s.devices);
    rows.push_back({method, static_cast<int>(a), w, r.point, false, r.placement});
  }
}

int cmd_train(const TrainOpts& o, const std::vector<std::string>& argv, std::ostream& out) {
  const TrainConfig cfg = build_train_config(o);
  RunDir run(o.out, "train", argv);
  run.set_seed(cfg.seed);
  run.write_config(cfg.to_json());
  run.add_output("config.json");

  const Datasets data =
      make_datasets(cfg.scenario, cfg.train_size, cfg.test_size, cfg.validation_size, cfg.seed);
  const Scenario eval = eval_scenario(o, data, run);

  std::string metrics;
  const TrainResult result = train(cfg, data, nullptr, [&](const EpisodeMetrics& m) {
    metrics += to_json_line(m) + "\n";
    if (m.test_objective)
      out << "episode " << m.episode << ": return " << m.mean_return << ", test objective " << *m.test_objective
          << "\n";
  });
  write_text(run.path("metrics.jsonl"), metrics);
  run.add_output("metrics.jsonl");
  result.best.save(run.checkpoint("best.json"));
  run.add_output("checkpoints/best.json");

  std::vector<SolutionRow> rows;
  append_policy_rows(rows, "drl", result.best, eval, cfg.weights);
  write_solutions(run.path("solutions.csv"), rows);
  run.add_output("solutions.csv");

  const EvalSummary v = evaluate_policy(result.best, data.validation, cfg.weights);
  json report{{"best_episode", result.best_episode},
              {"best_test_objective", result.best_objective},
              {"episodes_run", result.episodes_run},
              {"validation_objective", v.mean_objective},
              {"validation_time", v.mean_point.time},
              {"validation_cost", v.mean_point.cost}};
  write_text(run.path("report.json"), report.dump(2) + "\n");
  run.add_output("report.json");
  out << "best model from episode " << result.best_episode << " (test objective " << result.best_objective
      << "), validation objective " << v.mean_objective << "\n";

  if (result.diverged) {
    run.set_status("diverged", result.diagnostic);
    run.finish();
    throw DivergenceExit(result.diagnostic);
  }
  run.finish();
  return kOk;
}

int cmd_sweep(const TrainOpts& o, const std::vector<std::string>& argv, std::ostream& out) {
  const TrainConfig cfg = build_train_config(o);
  RunDir run(o.out, "sweep", argv);
  run.set_seed(cfg.seed);
  run.write_config(cfg.to_json());
  run.add_output("config.json");

  const Datasets data =
      make_datasets(cfg.scenario, cfg.train_size, cfg.test_size, cfg.validation_size, cfg.seed);
  const Scenario eval = eval_scenario(o, data, run);
  const SweepPlan plan = SweepPlan::standard();

  std::vector<std::string> lines(plan.stages.size());
  std::mutex lines_mu;
  const SweepResult result = sweep(plan, cfg, data, [&](std::size_t stage, const EpisodeMetrics& m) {
    json j = json::parse(to_json_line(m));
    j["stage"] = stage;
    j["w_time"] = plan.stages[stage].weights.time;
    std::lock_guard lock(lines_mu);
    lines[stage] += j.dump() + "\n";
  });
  std::string metrics;
  for (const std::string& l : lines) metrics += l;
  write_text(run.path("metrics.jsonl"), metrics);
  run.add_output("metrics.jsonl");

  std::vector<SolutionRow> rows;
  json stages = json::array();
  std::string failures;
  for (std::size_t i = 0; i < result.entries.size(); ++i) {
    const SweepEntry& e = result.entries[i];
    json st{{"stage", i},
            {"w_time", e.weights.time},
            {"w_cost", e.weights.cost},
            {"parent", e.parent},
            {"episodes", e.episodes},
            {"ok", e.ok}};
    if (e.model) {
      const std::string name = "stage_" + std::to_string(i) + ".json";
      e.model->save(run.checkpoint(name));
      run.add_output("checkpoints/" + name);
    }
    if (e.ok) {
      append_policy_rows(rows, "drl", *e.model, eval, e.weights);
      st["validation_time"] = e.validation.mean_point.time;
      st["validation_cost"] = e.validation.mean_point.cost;
      st["validation_objective"] = e.validation.mean_objective;
    } else {
      st["error"] = e.error;
      failures += "stage " + std::to_string(i) + ": " + e.error + "; ";
    }
    stages.push_back(st);
  }
  write_solutions(run.path("solutions.csv"), rows);
  run.add_output("solutions.csv");

  // Report the non-dominated subset of the emitted points.
  const std::vector<SolutionRow> written = read_solutions(run.path("solutions.csv"));
  json nd = json::array();
  out << "w_time  w_cost  time  cost  dominated\n";
  for (const SolutionRow& r : written) {
    out << r.weights->time << "  " << r.weights->cost << "  " << r.point.time << "  " << r.point.cost << "  "
        << (r.dominated ? "yes" : "no") << "\n";
    if (!r.dominated) nd.push_back({{"w_time", r.weights->time}, {"time", r.point.time}, {"cost", r.point.cost}});
  }
  write_text(run.path("report.json"),
             json{{"stages", stages}, {"total_episodes", result.total_episodes}, {"non_dominated", nd}}.dump(2) +
                 "\n");
  run.add_output("report.json");

  if (!failures.empty()) {
    run.set_status("diverged", failures);
    run.finish();
    throw DivergenceExit(failures);
  }
  run.finish();
  return kOk;
}

// ---------------------------------------------------------------------------

struct InferOpts {
  std::string model, scenario, out;
};

int cmd_infer(const InferOpts& o, const std::vector<std::string>& argv, std::ostream& out) {
  if (!fs::exists(o.model)) throw InputError("model file not found: " + o.model);
  const PolicyModel model = PolicyModel::load(o.model);
  const Scenario s = read_scenario(o.scenario);
  std::vector<SolutionRow> rows;
  for (std::size_t a = 0; a < s.applications.size(); ++a) {
    const Application& app = s.applications[a];
    if (app.service_count() != static_cast<std::size_t>(model.config().service_count))
      throw ConfigError("model expects " + std::to_string(model.config().service_count) +
                        " services but application " + std::to_string(a) + " has " +
                        std::to_string(app.service_count()));
    const InferenceResult r = infer_placement(model, app, s.devices);
    out << "application " << a << " placement (device ids by row):\n" << placement_text(app, r.placement);
    out << "time " << format_number(r.point.time) << " cost " << format_number(r.point.cost) << "\n";
    rows.push_back({"drl", static_cast<int>(a), std::nullopt, r.point, false, r.placement});
  }
  if (!o.out.empty()) {
    RunDir run(o.out, "infer", argv);
    run.write_config(json{{"model", o.model}, {"scenario", o.scenario}}.dump());
    write_solutions(run.path("solutions.csv"), rows);
    run.add_output("solutions.csv");
    run.finish();
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct BaselineOpts {
  std::string scenario, strategy = "all", out;
  std::optional<std::uint64_t> seed;
  double w_time = 0.5;
};

int cmd_baseline(const BaselineOpts& o, const std::vector<std::string>& argv, std::ostream& out) {
  const Scenario s = read_scenario(o.scenario);
  const std::uint64_t seed = resolve_seed(o.seed);
  const WeightVector w = WeightVector::make(o.w_time, 1.0 - o.w_time);
  std::vector<StrategyKind> kinds;
  if (o.strategy == "all")
    kinds = all_strategies();
  else if (o.strategy == "all-in-cloud")
    kinds = {StrategyKind::AllInCloud};
  else
    kinds = {strategy_from_string(o.strategy)};

  RunDir run(o.out, "baseline", argv);
  run.set_seed(seed);
  run.write_config(json{{"scenario", o.scenario}, {"strategy", o.strategy}, {"w_time", o.w_time}}.dump());
  std::vector<SolutionRow> rows;
  std::string metrics;
  for (StrategyKind k : kinds) {
    for (std::size_t a = 0; a < s.applications.size(); ++a) {
      const Application& app = s.applications[a];
      const BaselineResult r = run_baseline(k, app, s.devices, derive_seed(seed, a));
      const double obj = weighted_objective(r.point, w, default_bounds(app, s.devices));
      rows.push_back({to_string(k), static_cast<int>(a), std::nullopt, r.point, false, r.placement});
      metrics += json{{"strategy", to_string(k)}, {"app", a}, {"time", r.point.time}, {"cost", r.point.cost},
                      {"weighted_objective", obj}}
                     .dump() +
                 "\n";
      out << to_string(k) << " app " << a << ": time " << format_number(r.point.time) << " cost "
          << format_number(r.point.cost) << " objective " << obj << "\n";
    }
  }
  write_text(run.path("metrics.jsonl"), metrics);
  write_solutions(run.path("solutions.csv"), rows);
  run.add_output("metrics.jsonl");
  run.add_output("solutions.csv");
  run.finish();
  return kOk;
}

// ---------------------------------------------------------------------------

struct EvoOpts {
  std::string scenario, algo = "nsga2", out, mutation_mode = "offspring";
  std::optional<std::uint64_t> seed;
  int app = 0, population = 200, generations = 200;
  double mutation_prob = 0.15, w_time = 0.5;
};

int cmd_evo(const EvoOpts& o, const std::vector<std::string>& argv, std::ostream& out) {
  const Scenario s = read_scenario(o.scenario);
  const Application& app = pick_app(s, o.app);
  EvoConfig cfg;
  cfg.population_size = o.population;
  cfg.generations = o.generations;
  cfg.mutation_prob = o.mutation_prob;
  cfg.mutation = o.mutation_mode == "per-gene" ? MutationMode::PerGene : MutationMode::Offspring;
  cfg.seed = resolve_seed(o.seed);
  cfg.validate();

  RunDir run(o.out, "evo", argv);
  run.set_seed(cfg.seed);
  run.write_config(json{{"scenario", o.scenario},
                        {"algo", o.algo},
                        {"app", o.app},
                        {"population_size", cfg.population_size},
                        {"generations", cfg.generations},
                        {"mutation_prob", cfg.mutation_prob},
                        {"mutation_mode", o.mutation_mode},
                        {"w_time", o.w_time},
                        {"seed", cfg.seed}}
                       .dump());
  std::vector<SolutionRow> rows;
  std::string metrics;
  if (o.algo == "ga") {
    const WeightVector w = WeightVector::make(o.w_time, 1.0 - o.w_time);
    const GaResult r = ga_solve(app, s.devices, w, cfg);
    for (std::size_t g = 0; g < r.best_history.size(); ++g)
      metrics += json{{"generation", g}, {"best_fitness", r.best_history[g]}}.dump() + "\n";
    rows.push_back({"ga", o.app, w, r.point, false, r.placement});
    out << "ga: time " << format_number(r.point.time) << " cost " << format_number(r.point.cost) << " fitness "
        << r.fitness << "\n";
  } else {
    const NsgaResult r = nsga2_solve(app, s.devices, cfg);
    for (std::size_t g = 0; g < r.hypervolume_history.size(); ++g)
      metrics += json{{"generation", g}, {"hypervolume", r.hypervolume_history[g]}}.dump() + "\n";
    for (std::size_t i = 0; i < r.front.size(); ++i)
      rows.push_back({"nsga2", o.app, std::nullopt, r.front[i], false, r.placements[i]});
    out << "nsga2: " << r.front.size() << " front point(s)\n";
  }
  write_text(run.path("metrics.jsonl"), metrics);
  write_solutions(run.path("solutions.csv"), rows);
  run.add_output("metrics.jsonl");
  run.add_output("solutions.csv");
  run.finish();
  return kOk;
}

// ---------------------------------------------------------------------------

struct OracleOpts {
  std::string scenario, out;
  int app = 0;
  std::uint64_t cap = kDefaultEnumerationCap;
};

int cmd_oracle(const OracleOpts& o, const std::vector<std::string>& argv, std::ostream& out) {
  const Scenario s = read_scenario(o.scenario);
  const Application& app = pick_app(s, o.app);
  const OracleResult r = brute_force_oracle(app, s.devices, {}, o.cap);
  RunDir run(o.out, "oracle", argv);
  run.write_config(json{{"scenario", o.scenario}, {"app", o.app}, {"cap", o.cap}}.dump());
  std::vector<SolutionRow> rows;
  for (std::size_t i = 0; i < r.front.size(); ++i)
    rows.push_back({"oracle", o.app, std::nullopt, r.front[i], false, r.front_placements[i]});
  write_solutions(run.path("solutions.csv"), rows);
  write_text(run.path("report.json"),
             json{{"enumerated", r.enumerated}, {"front_size", r.front.size()}}.dump(2) + "\n");
  run.add_output("solutions.csv");
  run.add_output("report.json");
  run.finish();
  out << "oracle: enumerated " << r.enumerated << " placements, front of " << r.front.size() << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct CompareOpts {
  std::vector<std::string> runs;
  std::string out;
  int app = 0;
};

int cmd_compare(const CompareOpts& o, const std::vector<std::string>& argv, std::ostream& out) {
  if (o.runs.size() < 2) throw ConfigError("compare needs at least two run directories");
  struct Method {
    std::string label;
    std::vector<SolutionRow> rows;
  };
  std::vector<Method> methods;
  std::map<std::string, int> seen;
  for (const std::string& dir : o.runs) {
    const fs::path csv = fs::path(dir) / "solutions.csv";
    if (!fs::exists(csv)) throw InputError("missing " + csv.string());
    std::vector<SolutionRow> rows;
    for (SolutionRow& r : read_solutions(csv))
      if (r.app == o.app) rows.push_back(std::move(r));
    std::string label = fs::path(dir).lexically_normal().filename().string();
    if (label.empty()) label = fs::path(dir).lexically_normal().parent_path().filename().string();
    if (const int n = ++seen[label]; n > 1) label += "#" + std::to_string(n);
    methods.push_back({label, std::move(rows)});
  }

  std::vector<ObjectivePoint> all;
  ObjectivePoint ref{0.0, 0.0};
  for (const Method& m : methods)
    for (const SolutionRow& r : m.rows) {
      all.push_back(r.point);
      ref.time = std::max(ref.time, r.point.time);
      ref.cost = std::max(ref.cost, r.point.cost);
    }
  ref.time = ref.time * 1.1 + 1e-9;
  ref.cost = ref.cost * 1.1 + 1e-9;
  const std::vector<ObjectivePoint> joint = pareto_front(all);
  auto on_joint = [&](const ObjectivePoint& p) { return std::find(joint.begin(), joint.end(), p) != joint.end(); };

  RunDir run(o.out, "compare", argv);
  run.write_config(json{{"runs", o.runs}, {"app", o.app}}.dump());

  std::string plot = "label,time,cost,on_joint_front\n";
  std::vector<SolutionRow> joint_rows;
  std::vector<Series> series;
  json report{{"reference", {ref.time, ref.cost}}, {"joint_front_size", joint.size()}, {"methods", json::array()}};
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const Method& m = methods[i];
    Series sr{m.label, {}};
    int dominated_by_others = 0, on_front = 0;
    json dominates_counts = json::object();
    for (std::size_t j = 0; j < methods.size(); ++j) {
      if (i == j) continue;
      int count = 0;  // points of m dominated by some point of methods[j]
      for (const SolutionRow& r : m.rows)
        for (const SolutionRow& q : methods[j].rows)
          if (dominates(q.point, r.point)) {
            ++count;
            break;
          }
      dominates_counts[methods[j].label] = count;
    }
    for (const SolutionRow& r : m.rows) {
      sr.points.push_back(r.point);
      bool dom = false;
      for (std::size_t j = 0; j < methods.size() && !dom; ++j)
        if (j != i)
          for (const SolutionRow& q : methods[j].rows)
            if (dominates(q.point, r.point)) {
              dom = true;
              break;
            }
      dominated_by_others += dom;
      const bool jf = on_joint(r.point);
      on_front += jf;
      plot += m.label + ',' + format_number(r.point.time) + ',' + format_number(r.point.cost) + ',' +
              (jf ? "1" : "0") + "\n";
      if (jf) {
        SolutionRow jr = r;
        jr.method = m.label;
        joint_rows.push_back(std::move(jr));
      }
    }
    report["methods"].push_back({{"label", m.label},
                                 {"points", m.rows.size()},
                                 {"on_joint_front", on_front},
                                 {"dominated_by_others", dominated_by_others},
                                 {"dominated_by", dominates_counts},
                                 {"hypervolume", hypervolume(sr.points, ref)}});
    out << m.label << ": " << m.rows.size() << " point(s), " << on_front << " on joint front, "
        << dominated_by_others << " dominated by other methods, hypervolume " << hypervolume(sr.points, ref)
        << "\n";
    series.push_back(std::move(sr));
  }
  write_text(run.path("plot_data.csv"), plot);
  write_solutions(run.path("joint_front.csv"), joint_rows);
  write_text(run.path("report.json"), report.dump(2) + "\n");
  write_text(run.path("plot.svg"), scatter_svg(series, "solutions, application " + std::to_string(o.app)));
  for (const char* f : {"plot_data.csv", "joint_front.csv", "report.json", "plot.svg"}) run.add_output(f);
  run.finish();
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fogforge: fog service placement workbench"};
  app.require_subcommand(1);
  std::vector<std::string> full{"fogforge"};
  full.insert(full.end(), args.begin(), args.end());

  GenerateOpts gen;
  auto* g = app.add_subcommand("generate", "Generate a random scenario file");
  gen.scenario.attach(g);
  g->add_option("--config", gen.config, "Scenario generation config JSON");
  g->add_option("--seed", gen.seed, "Seed (falls back to FOGFORGE_SEED, then 1)");
  g->add_option("--out", gen.out, "Output scenario file")->required();

  TrainOpts tr, sw;
  auto* t = app.add_subcommand("train", "Train one policy for a weight vector");
  attach_train(t, tr, true);
  auto* s = app.add_subcommand("sweep", "Train the five-model weight sweep with parameter transfer");
  attach_train(s, sw, false);

  InferOpts inf;
  auto* i = app.add_subcommand("infer", "Place a scenario's applications with a trained model");
  i->add_option("--model", inf.model, "Checkpoint file")->required();
  i->add_option("--scenario", inf.scenario, "Scenario file")->required();
  i->add_option("--out", inf.out, "Optional run directory");

  BaselineOpts bl;
  auto* b = app.add_subcommand("baseline", "Run baseline heuristics");
  b->add_option("--scenario", bl.scenario, "Scenario file")->required();
  b->add_option("--strategy", bl.strategy, "random, cloud (all-in-cloud), greedy-edge, greedy-cost or all");
  b->add_option("--seed", bl.seed, "Seed for the random strategy");
  b->add_option("--w-time", bl.w_time, "Time weight for the reported objective")->check(CLI::Range(0.0, 1.0));
  b->add_option("--out", bl.out, "Run directory")->required();

  EvoOpts ev;
  auto* e = app.add_subcommand("evo", "Run the weighted GA or NSGA-II");
  e->add_option("--scenario", ev.scenario, "Scenario file")->required();
  e->add_option("--algo", ev.algo, "ga or nsga2")->check(CLI::IsMember({"ga", "nsga2"}));
  e->add_option("--app", ev.app, "Application index");
  e->add_option("--population", ev.population, "Population size (even)");
  e->add_option("--generations", ev.generations, "Generations");
  e->add_option("--mutation-prob", ev.mutation_prob, "Mutation probability");
  e->add_option("--mutation-mode", ev.mutation_mode, "offspring or per-gene")
      ->check(CLI::IsMember({"offspring", "per-gene"}));
  e->add_option("--w-time", ev.w_time, "Time weight for the GA")->check(CLI::Range(0.0, 1.0));
  e->add_option("--seed", ev.seed, "Seed (falls back to FOGFORGE_SEED, then 1)");
  e->add_option("--out", ev.out, "Run directory")->required();

  OracleOpts orc;
  auto* oc = app.add_subcommand("oracle", "Enumerate every placement of a small application");
  oc->add_option("--scenario", orc.scenario, "Scenario file")->required();
  oc->add_option("--app", orc.app, "Application index");
  oc->add_option("--cap", orc.cap, "Maximum number of placements to enumerate");
  oc->add_option("--out", orc.out, "Run directory")->required();

  CompareOpts cmp;
  auto* c = app.add_subcommand("compare", "Compare solution sets of several runs");
  c->add_option("runs", cmp.runs, "Run directories")->required()->expected(2, -1);
  c->add_option("--app", cmp.app, "Application index to compare");
  c->add_option("--out", cmp.out, "Output directory")->required();

  std::vector<char*> cargv;
  for (std::string& a : full) cargv.push_back(a.data());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (g->parsed()) return cmd_generate(gen, out);
    if (t->parsed()) return cmd_train(tr, full, out);
    if (s->parsed()) return cmd_sweep(sw, full, out);
    if (i->parsed()) return cmd_infer(inf, full, out);
    if (b->parsed()) return cmd_baseline(bl, full, out);
    if (e->parsed()) return cmd_evo(ev, full, out);
    if (oc->parsed()) return cmd_oracle(orc, full, out);
    if (c->parsed()) return cmd_compare(cmp, full, out);
  } catch (const DivergenceExit& ex) {
    err << "error: training diverged: " << ex.what() << "\n";
    return kDiverged;
  } catch (const NumericDivergence& ex) {
    err << "error: numeric divergence: " << ex.what() << "\n";
    return kDiverged;
  } catch (const InputError& ex) {
    err << "error: " << ex.what() << "\n";
    return kUsage;
  } catch (const ConfigError& ex) {
    err << "error: " << ex.what() << "\n";
    return kUsage;
  } catch (const ScenarioParseError& ex) {
    err << "error: " << ex.what() << "\n";
    return kUsage;
  } catch (const nn::CheckpointError& ex) {
    err << "error: " << ex.what() << "\n";
    return kUsage;
  } catch (const TooLargeInstance& ex) {
    err << "error: " << ex.what() << "\n";
    return kUsage;
  } catch (const std::exception& ex) {
    err << "internal error: " << ex.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace fogforge::cli
