#include "fogforge/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

#include <json.hpp>

namespace fogforge {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration

void TrainConfig::validate() const {
  if (episodes < 0) throw ConfigError("episodes must be >= 0");
  if (envs_per_episode < 1) throw ConfigError("envs_per_episode must be >= 1");
  if (eval_interval < 1) throw ConfigError("eval_interval must be >= 1");
  if (train_size < 1 || test_size < 1 || validation_size < 1)
    throw ConfigError("every dataset split needs at least one scenario");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (lr_step < 1 || !(lr_gamma > 0.0)) throw ConfigError("bad learning-rate schedule");
  if (ppo.update_epochs < 1 || !(ppo.clip_range > 0.0)) throw ConfigError("bad PPO settings");
  WeightVector::make(weights.time, weights.cost);
  scenario.validate();
  if (scenario.app_count < 1) throw ConfigError("training scenarios need at least one application");
}

TrainConfig TrainConfig::paper_scale() {
  TrainConfig c;
  c.episodes = 150;
  c.envs_per_episode = 40;
  c.scenario.device_count = 1000;
  c.scenario.rows_per_app = 9;
  return c;
}

TrainConfig TrainConfig::desk_scale() {
  TrainConfig c;
  c.episodes = 60;
  c.envs_per_episode = 8;
  c.scenario.device_count = 20;
  c.scenario.rows_per_app = 3;
  c.train_size = 40;
  c.test_size = 8;
  c.validation_size = 4;
  return c;
}

std::string TrainConfig::to_json() const {
  json j{{"episodes", episodes},
         {"envs_per_episode", envs_per_episode},
         {"w_time", weights.time},
         {"w_cost", weights.cost},
         {"seed", seed},
         {"eval_interval", eval_interval},
         {"train_size", train_size},
         {"test_size", test_size},
         {"validation_size", validation_size},
         {"threads", threads},
         {"learning_rate", learning_rate},
         {"lr_gamma", lr_gamma},
         {"lr_step", lr_step},
         {"ppo",
          {{"update_epochs", ppo.update_epochs},
           {"clip_range", ppo.clip_range},
           {"policy_coef", ppo.policy_coef},
           {"value_coef", ppo.value_coef},
           {"entropy_coef", ppo.entropy_coef},
           {"max_grad_norm", ppo.max_grad_norm},
           {"normalize_advantages", ppo.normalize_advantages}}},
         {"policy", json::parse(policy.to_json())},
         {"scenario", json::parse(scenario.to_json())}};
  return j.dump(2);
}

TrainConfig TrainConfig::from_json(const std::string& text, TrainConfig c) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("training config: ") + e.what());
  }
  try {
    auto opt = [](const json& obj, const char* key, auto& target) {
      if (auto it = obj.find(key); it != obj.end()) target = it->get<std::decay_t<decltype(target)>>();
    };
    opt(j, "episodes", c.episodes);
    opt(j, "envs_per_episode", c.envs_per_episode);
    opt(j, "w_time", c.weights.time);
    opt(j, "w_cost", c.weights.cost);
    opt(j, "seed", c.seed);
    opt(j, "eval_interval", c.eval_interval);
    opt(j, "train_size", c.train_size);
    opt(j, "test_size", c.test_size);
    opt(j, "validation_size", c.validation_size);
    opt(j, "threads", c.threads);
    opt(j, "learning_rate", c.learning_rate);
    opt(j, "lr_gamma", c.lr_gamma);
    opt(j, "lr_step", c.lr_step);
    if (auto it = j.find("ppo"); it != j.end()) {
      opt(*it, "update_epochs", c.ppo.update_epochs);
      opt(*it, "clip_range", c.ppo.clip_range);
      opt(*it, "policy_coef", c.ppo.policy_coef);
      opt(*it, "value_coef", c.ppo.value_coef);
      opt(*it, "entropy_coef", c.ppo.entropy_coef);
      opt(*it, "max_grad_norm", c.ppo.max_grad_norm);
      opt(*it, "normalize_advantages", c.ppo.normalize_advantages);
    }
    if (auto it = j.find("policy"); it != j.end()) {
      json merged = json::parse(c.policy.to_json());
      merged.merge_patch(*it);
      c.policy = PolicyConfig::from_json(merged.dump());
    }
    if (auto it = j.find("scenario"); it != j.end()) c.scenario = ScenarioConfig::from_json(it->dump(), c.scenario);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("training config: ") + e.what());
  }
  return c;
}

// ---------------------------------------------------------------------------
// Datasets and evaluation

Datasets make_datasets(const ScenarioConfig& base, int train_size, int test_size, int validation_size,
                       std::uint64_t seed) {
  Datasets d;
  std::set<std::uint64_t> used;
  auto fill = [&](std::vector<Scenario>& out, int count, std::uint64_t split) {
    for (int i = 0; i < count; ++i) {
      ScenarioConfig cfg = base;
      cfg.seed = derive_seed(seed, split, static_cast<std::uint64_t>(i));
      if (!used.insert(cfg.seed).second) throw ConfigError("dataset seed collision");
      out.push_back(generate_scenario(cfg));
    }
  };
  fill(d.train, train_size, 1);
  fill(d.test, test_size, 2);
  fill(d.validation, validation_size, 3);
  return d;
}

InferenceResult infer_placement(const PolicyModel& model, const Application& app, const DeviceSet& devices) {
  PlacementEnv env(app, devices);
  InferenceResult out;
  const WeightVector w{0.5, 0.5};  // rewards are not used here
  while (!env.state().done()) {
    const Decision d = model.act(env.state(), SelectMode::Greedy, nullptr);
    env.step({d.service, d.device}, w);
    out.order.emplace_back(d.service, d.device);
  }
  out.placement = env.state().placement;
  out.point = env.state().objectives;
  return out;
}

EvalSummary evaluate_policy(const PolicyModel& model, const std::vector<Scenario>& scenarios,
                            const WeightVector& weights) {
  EvalSummary s;
  std::size_t count = 0;
  for (const Scenario& sc : scenarios) {
    for (const Application& app : sc.applications) {
      const InferenceResult r = infer_placement(model, app, sc.devices);
      s.mean_objective += weighted_objective(r.point, weights, default_bounds(app, sc.devices));
      s.mean_point.time += r.point.time;
      s.mean_point.cost += r.point.cost;
      ++count;
    }
  }
  if (count > 0) {
    const double k = 1.0 / static_cast<double>(count);
    s.mean_objective *= k;
    s.mean_point.time *= k;
    s.mean_point.cost *= k;
  }
  return s;
}

std::string to_json_line(const EpisodeMetrics& m) {
  json j{{"episode", m.episode},
         {"mean_return", m.mean_return},
         {"mean_objective", m.mean_objective},
         {"loss_total", m.loss.total},
         {"policy_loss", m.loss.policy},
         {"value_loss", m.loss.value},
         {"entropy", m.loss.entropy},
         {"grad_norm", m.loss.grad_norm},
         {"learning_rate", m.learning_rate},
         {"best_objective", m.best_objective}};
  j["test_objective"] = m.test_objective ? json(*m.test_objective) : json(nullptr);
  return j.dump();
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Training

namespace {

Trajectory rollout(const PolicyModel& model, const std::shared_ptr<const EnvContext>& context,
                   const WeightVector& weights, Rng& rng) {
  PlacementEnv env(context);
  Trajectory traj;
  while (!env.state().done()) {
    Transition t;
    t.state = env.state();
    t.mask = eligible_services(t.state);
    const Decision d = model.act(t.state, SelectMode::Sample, &rng);
    t.service = d.service;
    t.device = d.device;
    t.log_prob_service = d.log_prob_service;
    t.log_prob_device = d.log_prob_device;
    t.value_service = d.value_service;
    t.value_device = d.value_device;
    const StepResult r = env.step({d.service, d.device}, weights);
    t.reward = r.reward.r_total;
    t.done = r.done;
    traj.steps.push_back(std::move(t));
  }
  return traj;
}

bool parameters_finite(const PolicyModel& model) {
  for (const auto& [name, v] : model.params().parameters())
    if (!v.value().allFinite()) return false;
  return true;
}

}  // namespace

PolicyModel transfer_parameters(const PolicyModel& parent) { return parent.clone(); }

PolicyModel transfer_parameters(const PolicyModel& parent, const PolicyConfig& child) {
  PolicyConfig expected = child;
  expected.init_seed = parent.config().init_seed;
  if (!(expected == parent.config()))
    throw ConfigError("parent architecture " + parent.config().to_json() + " does not match child " +
                      child.to_json());
  return parent.clone();
}

TrainResult train(const TrainConfig& config, const Datasets& data, const PolicyModel* initial,
                  const MetricsSink& sink) {
  config.validate();
  if (data.train.empty() || data.test.empty()) throw ConfigError("train and test splits must be non-empty");

  std::vector<std::shared_ptr<const EnvContext>> contexts;
  for (const Scenario& s : data.train)
    for (const Application& app : s.applications) contexts.push_back(std::make_shared<const EnvContext>(app, s.devices));
  if (contexts.empty()) throw ConfigError("training split holds no applications");

  PolicyConfig arch = config.policy;
  arch.service_count = static_cast<int>(contexts.front()->app.service_count());
  arch.init_seed = derive_seed(config.seed, 0xA11CE);
  PolicyModel model = initial ? transfer_parameters(*initial, arch) : PolicyModel(arch);

  nn::Adam optimizer(model.params().trainable(), {config.learning_rate});
  nn::StepLr scheduler(optimizer, config.lr_step, config.lr_gamma);

  TrainResult result{model.clone(), evaluate_policy(model, data.test, config.weights).mean_objective, 0, 0, {}, false, {}};

  const std::size_t envs = static_cast<std::size_t>(config.envs_per_episode);
  for (int episode = 1; episode <= config.episodes; ++episode) {
    std::vector<Trajectory> batch(envs);
    parallel_for(envs, config.threads, [&](std::size_t e) {
      const std::size_t slot = (static_cast<std::size_t>(episode - 1) * envs + e) % contexts.size();
      Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(episode), e));
      batch[e] = rollout(model, contexts[slot], config.weights, rng);
    });

    EpisodeMetrics m;
    m.episode = episode;
    for (std::size_t e = 0; e < envs; ++e) {
      const std::size_t slot = (static_cast<std::size_t>(episode - 1) * envs + e) % contexts.size();
      m.mean_return += batch[e].total_reward();
      const EnvContext& ctx = *contexts[slot];
      PlacementEnv probe(contexts[slot]);
      const double start = weighted_objective(probe.state().objectives, config.weights, ctx.bounds);
      m.mean_objective += start - batch[e].total_reward();
    }
    m.mean_return /= static_cast<double>(envs);
    m.mean_objective /= static_cast<double>(envs);

    try {
      m.loss = ppo_update(model, optimizer, batch, config.ppo);
    } catch (const NumericDivergence& e) {
      result.diverged = true;
      result.diagnostic = "episode " + std::to_string(episode) + ": " + e.what();
      break;
    }
    if (!parameters_finite(model)) {
      result.diverged = true;
      result.diagnostic = "episode " + std::to_string(episode) + ": parameters became non-finite";
      break;
    }
    m.learning_rate = optimizer.learning_rate();
    scheduler.step();
    result.episodes_run = episode;

    if (episode % config.eval_interval == 0 || episode == config.episodes) {
      const double test = evaluate_policy(model, data.test, config.weights).mean_objective;
      m.test_objective = test;
      if (test <= result.best_objective) {  // ties go to the more trained model
        result.best_objective = test;
        result.best_episode = episode;
        result.best = model.clone();
      }
    }
    m.best_objective = result.best_objective;
    if (sink) sink(m);
    result.history.push_back(std::move(m));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Scalar-decomposition sweep

SweepPlan SweepPlan::standard() {
  SweepPlan p;
  p.stages = {{{0.5, 0.5}, -1, 0}, {{0.25, 0.75}, 0, 1}, {{0.75, 0.25}, 0, 1}, {{0.0, 1.0}, 1, 2}, {{1.0, 0.0}, 2, 2}};
  return p;
}

void SweepPlan::validate() const {
  if (stages.empty()) throw ConfigError("sweep plan has no stages");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const SweepStage& s = stages[i];
    WeightVector::make(s.weights.time, s.weights.cost);
    if (s.parent < 0) {
      if (s.depth != 0) throw ConfigError("root stages must have depth 0");
      continue;
    }
    if (static_cast<std::size_t>(s.parent) >= i)
      throw ConfigError("stage " + std::to_string(i) + " names a parent that does not precede it");
    if (s.depth != stages[static_cast<std::size_t>(s.parent)].depth + 1)
      throw ConfigError("stage " + std::to_string(i) + " depth must be its parent's depth + 1");
  }
}

SweepResult sweep(const SweepPlan& plan, const TrainConfig& config, const Datasets& data, const StageSink& sink) {
  plan.validate();
  config.validate();
  SweepResult out;
  out.entries.resize(plan.stages.size());

  int max_depth = 0;
  for (const SweepStage& s : plan.stages) max_depth = std::max(max_depth, s.depth);

  for (int depth = 0; depth <= max_depth; ++depth) {
    std::vector<std::size_t> level;
    for (std::size_t i = 0; i < plan.stages.size(); ++i)
      if (plan.stages[i].depth == depth) level.push_back(i);
    const int inner_threads = level.size() > 1 && config.threads > 1 ? 1 : config.threads;

    parallel_for(level.size(), config.threads, [&](std::size_t li) {
      const std::size_t i = level[li];
      const SweepStage& stage = plan.stages[i];
      SweepEntry& entry = out.entries[i];
      entry.weights = stage.weights;
      entry.parent = stage.parent;

      TrainConfig cfg = config;
      cfg.weights = stage.weights;
      cfg.threads = inner_threads;
      cfg.seed = derive_seed(config.seed, 0x5EE9, i);
      const PolicyModel* parent = nullptr;
      if (stage.parent >= 0) {
        const SweepEntry& p = out.entries[static_cast<std::size_t>(stage.parent)];
        if (!p.ok) {
          entry.error = "parent stage " + std::to_string(stage.parent) + " failed";
          return;
        }
        parent = &*p.model;
        cfg.episodes = config.episodes / 2;
      }
      entry.episodes = cfg.episodes;
      try {
        TrainResult r = train(cfg, data, parent, sink ? MetricsSink([&](const EpisodeMetrics& m) { sink(i, m); })
                                                      : MetricsSink{});
        if (r.diverged) entry.error = r.diagnostic;
        entry.model.emplace(std::move(r.best));
        entry.ok = !r.diverged;
        entry.validation = evaluate_policy(*entry.model, data.validation, stage.weights);
      } catch (const std::exception& e) {
        entry.error = e.what();
        entry.ok = false;
      }
    });
  }

  for (SweepEntry& e : out.entries) {
    out.total_episodes += e.episodes;
    if (!e.ok) continue;
    for (const SweepEntry& other : out.entries)
      if (other.ok && dominates(other.validation.mean_point, e.validation.mean_point)) e.dominated = true;
  }
  return out;
}

TrainConfig TrainConfig::from_json(const std::string& text) { return from_json(text, TrainConfig{}); }

}  // namespace fogforge
