#include "fogforge/policy.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

namespace fogforge {

using nlohmann::json;

void PolicyConfig::validate() const {
  if (service_count < 1) throw nn::DimensionError("policy needs at least one service");
  gin.validate();
  if (gin.input_dim != kServiceFeatures + kGraphFeatures)
    throw nn::DimensionError("GIN input width must be " + std::to_string(kServiceFeatures + kGraphFeatures));
  if (actor_width < 1 || critic_width < 1 || actor_hidden_layers < 0 || critic_hidden_layers < 0)
    throw nn::DimensionError("bad actor/critic shape");
}

std::string PolicyConfig::to_json() const {
  json j{{"service_count", service_count},
         {"gin",
          {{"input_dim", gin.input_dim},
           {"hidden_dim", gin.hidden_dim},
           {"k_iterations", gin.k_iterations},
           {"mlp_layers", gin.mlp_layers},
           {"activation", nn::to_string(gin.activation)},
           {"batch_norm", gin.batch_norm},
           {"epsilon_init", gin.epsilon_init}}},
         {"actor_width", actor_width},
         {"actor_hidden_layers", actor_hidden_layers},
         {"critic_width", critic_width},
         {"critic_hidden_layers", critic_hidden_layers},
         {"activation", nn::to_string(activation)},
         {"init_seed", init_seed}};
  return j.dump();
}

PolicyConfig PolicyConfig::from_json(const std::string& text) {
  const json j = json::parse(text);
  PolicyConfig c;
  c.service_count = j.at("service_count").get<int>();
  const json& g = j.at("gin");
  c.gin.input_dim = g.at("input_dim").get<int>();
  c.gin.hidden_dim = g.at("hidden_dim").get<int>();
  c.gin.k_iterations = g.at("k_iterations").get<int>();
  c.gin.mlp_layers = g.at("mlp_layers").get<int>();
  c.gin.activation = nn::activation_from_string(g.at("activation").get<std::string>());
  c.gin.batch_norm = g.at("batch_norm").get<bool>();
  c.gin.epsilon_init = g.at("epsilon_init").get<double>();
  c.actor_width = j.at("actor_width").get<int>();
  c.actor_hidden_layers = j.at("actor_hidden_layers").get<int>();
  c.critic_width = j.at("critic_width").get<int>();
  c.critic_hidden_layers = j.at("critic_hidden_layers").get<int>();
  c.activation = nn::activation_from_string(j.at("activation").get<std::string>());
  c.init_seed = j.at("init_seed").get<std::uint64_t>();
  return c;
}

namespace {

nn::MlpSpec head_spec(int input, int width, int layers, nn::Activation act) {
  nn::MlpSpec s;
  s.input_dim = input;
  s.hidden_dims.assign(static_cast<std::size_t>(layers), width);
  s.output_dim = 1;
  s.activation = act;
  return s;
}

}  // namespace

PolicyModel::PolicyModel(PolicyConfig config)
    : config_(std::move(config)), params_(std::make_unique<nn::ParameterSet>()) {
  config_.validate();
  Rng rng(config_.init_seed);
  gin_ = GinEncoder(*params_, "gin", config_.gin, rng);
  actor_s_ = nn::Mlp(*params_, "actor_s",
                     head_spec(config_.service_actor_input(), config_.actor_width, config_.actor_hidden_layers,
                               config_.activation),
                     rng);
  critic_s_ = nn::Mlp(*params_, "critic_s",
                      head_spec(config_.gin.hidden_dim, config_.critic_width, config_.critic_hidden_layers,
                                config_.activation),
                      rng);
  actor_d_ = nn::Mlp(*params_, "actor_d",
                     head_spec(config_.device_actor_input(), config_.actor_width, config_.actor_hidden_layers,
                               config_.activation),
                     rng);
  critic_d_ = nn::Mlp(*params_, "critic_d",
                      head_spec(config_.device_critic_input(), config_.critic_width, config_.critic_hidden_layers,
                                config_.activation),
                      rng);
}

void PolicyModel::check_state(const EnvState& state) const {
  if (static_cast<int>(state.service_count()) != config_.service_count)
    throw nn::DimensionError("model was built for " + std::to_string(config_.service_count) +
                             " services, state has " + std::to_string(state.service_count()));
}

nn::Matrix PolicyModel::node_features(const EnvState& state) const {
  nn::Matrix x(state.service_features.rows(), kServiceFeatures + kGraphFeatures);
  x << state.service_features, state.context->degree_features;
  return x;
}

ServiceHead PolicyModel::service_head(const EnvState& state, std::span<const std::uint8_t> mask,
                                      nn::NormMode mode) const {
  check_state(state);
  ServiceHead out;
  out.embedding = gin_.forward(nn::Var::constant(node_features(state)), state.context->adjacency, mode);
  const nn::Var& nodes = out.embedding.nodes;
  const nn::Var pooled = nn::repeat_rows(out.embedding.pooled, nodes.rows());
  const nn::Var joined[] = {pooled, nodes};
  const nn::Var logits = actor_s_.forward(nn::hcat(joined));
  out.log_probs = nn::masked_log_softmax(logits, mask);
  out.value = critic_s_.forward(out.embedding.pooled);
  return out;
}

DeviceHead PolicyModel::device_head(const EnvState& state, std::size_t service,
                                    const GraphEmbedding& embedding) const {
  check_state(state);
  if (service >= state.service_count()) throw nn::DimensionError("candidate service out of range");
  const Eigen::Index devices = static_cast<Eigen::Index>(state.device_count());
  const Eigen::Index n = static_cast<Eigen::Index>(state.service_count());
  const auto candidate = state.service_features.row(static_cast<Eigen::Index>(service));

  nn::Matrix x(devices, config_.device_actor_input());
  x.leftCols(kDeviceFeatures) = state.device_features;
  x.middleCols(kDeviceFeatures, kServiceFeatures).rowwise() = candidate;
  x.rightCols(n).rowwise() = state.allocation.row(0);

  DeviceHead out;
  const nn::Var logits = actor_d_.forward(nn::Var::constant(std::move(x)));
  const std::vector<std::uint8_t> all(static_cast<std::size_t>(devices), 1);
  out.log_probs = nn::masked_log_softmax(logits, all);

  nn::Matrix context(1, kServiceFeatures + n);
  context << candidate, state.allocation;
  const nn::Var critic_in[] = {embedding.pooled, nn::Var::constant(std::move(context))};
  out.value = critic_d_.forward(nn::hcat(critic_in));
  return out;
}

std::size_t choose(const nn::Matrix& log_probs, SelectMode mode, Rng* rng) {
  const Eigen::Index n = log_probs.rows();
  if (mode == SelectMode::Greedy || rng == nullptr) {
    Eigen::Index best = -1;
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::isfinite(log_probs(i, 0)) && (best < 0 || log_probs(i, 0) > log_probs(best, 0))) best = i;
    if (best < 0) throw TerminalStateError("no selectable entry");
    return static_cast<std::size_t>(best);
  }
  const double u = rng->uniform();
  double acc = 0.0;
  Eigen::Index last = -1;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(log_probs(i, 0))) continue;
    last = i;
    acc += std::exp(log_probs(i, 0));
    if (u < acc) return static_cast<std::size_t>(i);
  }
  if (last < 0) throw TerminalStateError("no selectable entry");
  return static_cast<std::size_t>(last);
}

Decision PolicyModel::select_service(const EnvState& state, std::span<const std::uint8_t> mask,
                                     SelectMode mode, Rng* rng) const {
  bool any = false;
  for (std::uint8_t m : mask) any = any || m != 0;
  if (!any) throw TerminalStateError("no eligible service");
  nn::NoGradGuard guard;
  const ServiceHead head = service_head(state, mask);
  Decision d;
  d.service = choose(head.log_probs.value(), mode, rng);
  d.log_prob_service = head.log_probs.value()(static_cast<Eigen::Index>(d.service), 0);
  d.value_service = head.value.item();
  return d;
}

Decision PolicyModel::select_device(const EnvState& state, std::size_t service, SelectMode mode, Rng* rng) const {
  nn::NoGradGuard guard;
  const ServiceHead sh = service_head(state, eligible_services(state));
  const DeviceHead dh = device_head(state, service, sh.embedding);
  Decision d;
  d.service = service;
  d.device = static_cast<int>(choose(dh.log_probs.value(), mode, rng));
  d.log_prob_device = dh.log_probs.value()(d.device, 0);
  d.value_device = dh.value.item();
  return d;
}

Decision PolicyModel::act(const EnvState& state, SelectMode mode, Rng* rng) const {
  const std::vector<std::uint8_t> mask = eligible_services(state);
  bool any = false;
  for (std::uint8_t m : mask) any = any || m != 0;
  if (!any) throw TerminalStateError("no eligible service");
  nn::NoGradGuard guard;
  const ServiceHead sh = service_head(state, mask);
  Decision d;
  d.service = choose(sh.log_probs.value(), mode, rng);
  d.log_prob_service = sh.log_probs.value()(static_cast<Eigen::Index>(d.service), 0);
  d.value_service = sh.value.item();
  const DeviceHead dh = device_head(state, d.service, sh.embedding);
  d.device = static_cast<int>(choose(dh.log_probs.value(), mode, rng));
  d.log_prob_device = dh.log_probs.value()(d.device, 0);
  d.value_device = dh.value.item();
  return d;
}

PolicyModel PolicyModel::clone() const {
  PolicyModel copy(config_);
  copy.params().load_state(params_->state());
  return copy;
}

nn::Checkpoint PolicyModel::to_checkpoint() const {
  nn::Checkpoint ckpt;
  ckpt.meta_json = json{{"kind", "policy"}, {"config", json::parse(config_.to_json())}}.dump();
  ckpt.tensors = params_->state();
  return ckpt;
}

PolicyModel PolicyModel::from_checkpoint(const nn::Checkpoint& ckpt) {
  try {
    const json meta = json::parse(ckpt.meta_json);
    if (meta.at("kind").get<std::string>() != "policy") throw nn::CheckpointError("checkpoint is not a policy");
    PolicyModel model(PolicyConfig::from_json(meta.at("config").dump()));
    model.params().load_state(ckpt.tensors);
    return model;
  } catch (const json::exception& e) {
    throw nn::CheckpointError(std::string("bad policy metadata: ") + e.what());
  } catch (const nn::DimensionError& e) {
    throw nn::CheckpointError(std::string("policy tensors do not match: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw nn::CheckpointError(std::string("bad policy config: ") + e.what());
  }
}

void PolicyModel::save(const std::filesystem::path& path) const { nn::save_checkpoint(to_checkpoint(), path); }

PolicyModel PolicyModel::load(const std::filesystem::path& path) {
  return from_checkpoint(nn::load_checkpoint(path));
}

}  // namespace fogforge
