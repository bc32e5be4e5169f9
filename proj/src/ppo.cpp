#include "fogforge/ppo.hpp"

#include <cmath>
#include <numeric>

namespace fogforge {

double Trajectory::total_reward() const {
  double r = 0.0;
  for (const Transition& t : steps) r += t.reward;
  return r;
}

std::vector<double> reward_to_go(const Trajectory& trajectory) {
  std::vector<double> out(trajectory.steps.size());
  double acc = 0.0;
  for (std::size_t i = out.size(); i-- > 0;) {
    acc += trajectory.steps[i].reward;
    out[i] = acc;
  }
  return out;
}

namespace {

nn::Var clipped_surrogate(const nn::Var& log_prob, double old_log_prob, double advantage, double clip,
                          double* ratio_out) {
  const nn::Var ratio = nn::exp(nn::add_scalar(log_prob, -old_log_prob));
  *ratio_out = ratio.item();
  const nn::Var unclipped = nn::scale(ratio, advantage);
  const nn::Var clipped = nn::scale(nn::clamp(ratio, 1.0 - clip, 1.0 + clip), advantage);
  return nn::minimum(unclipped, clipped);
}

void normalize(std::vector<double>& v) {
  if (v.size() < 2) return;
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - m) * (x - m);
  const double sd = std::sqrt(var / static_cast<double>(v.size()));
  for (double& x : v) x = (x - m) / (sd + 1e-8);
}

}  // namespace

PpoLoss ppo_loss(const PolicyModel& model, std::span<const Trajectory> batch, const PpoConfig& config,
                 nn::NormMode mode) {
  std::vector<const Transition*> steps;
  std::vector<double> returns;
  for (const Trajectory& t : batch) {
    const std::vector<double> g = reward_to_go(t);
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      steps.push_back(&t.steps[i]);
      returns.push_back(g[i]);
    }
  }
  if (steps.empty()) throw std::invalid_argument("ppo_loss on an empty batch");

  std::vector<double> adv_s(steps.size()), adv_d(steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    adv_s[i] = returns[i] - steps[i]->value_service;
    adv_d[i] = returns[i] - steps[i]->value_device;
  }
  if (config.normalize_advantages) {
    normalize(adv_s);
    normalize(adv_d);
  }

  PpoLoss out;
  std::vector<nn::Var> surr_s, surr_d, verr_s, verr_d, ent_s, ent_d;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const Transition& t = *steps[i];
    const ServiceHead sh = model.service_head(t.state, t.mask, mode);
    const DeviceHead dh = model.device_head(t.state, t.service, sh.embedding);

    double r = 0.0;
    surr_s.push_back(clipped_surrogate(nn::pick(sh.log_probs, static_cast<Eigen::Index>(t.service)),
                                       t.log_prob_service, adv_s[i], config.clip_range, &r));
    out.ratio_service.push_back(r);
    surr_d.push_back(clipped_surrogate(nn::pick(dh.log_probs, t.device), t.log_prob_device, adv_d[i],
                                       config.clip_range, &r));
    out.ratio_device.push_back(r);

    verr_s.push_back(nn::square(nn::add_scalar(sh.value, -returns[i])));
    verr_d.push_back(nn::square(nn::add_scalar(dh.value, -returns[i])));
    ent_s.push_back(nn::categorical_entropy(sh.log_probs));
    ent_d.push_back(nn::categorical_entropy(dh.log_probs));
  }

  auto avg = [](const std::vector<nn::Var>& parts) { return nn::mean(nn::vcat(parts)); };
  out.policy_service = nn::scale(avg(surr_s), -1.0);
  out.policy_device = nn::scale(avg(surr_d), -1.0);
  out.value_service = avg(verr_s);
  out.value_device = avg(verr_d);
  out.entropy_service = avg(ent_s);
  out.entropy_device = avg(ent_d);

  auto actor_critic = [&](const nn::Var& policy, const nn::Var& value, const nn::Var& entropy) {
    return nn::sub(nn::add(nn::scale(policy, config.policy_coef), nn::scale(value, config.value_coef)),
                   nn::scale(entropy, config.entropy_coef));
  };
  out.total = nn::scale(nn::add(actor_critic(out.policy_service, out.value_service, out.entropy_service),
                                actor_critic(out.policy_device, out.value_device, out.entropy_device)),
                        0.5);
  return out;
}

LossReport ppo_update(PolicyModel& model, nn::Adam& optimizer, std::span<const Trajectory> batch,
                      const PpoConfig& config) {
  LossReport report;
  for (int epoch = 0; epoch < config.update_epochs; ++epoch) {
    model.params().zero_grad();
    const PpoLoss loss = ppo_loss(model, batch, config, nn::NormMode::BatchUpdate);
    const double total = loss.total.item();
    if (!std::isfinite(total)) {
      model.params().zero_grad();
      throw NumericDivergence("PPO loss is not finite at update epoch " + std::to_string(epoch) +
                              " (policy " + std::to_string(loss.policy_service.item()) + "/" +
                              std::to_string(loss.policy_device.item()) + ", value " +
                              std::to_string(loss.value_service.item()) + "/" +
                              std::to_string(loss.value_device.item()) + ")");
    }
    loss.total.backward();
    double sq = 0.0;
    for (const nn::Var& p : model.params().trainable())
      if (p.has_grad()) sq += p.node()->grad.squaredNorm();
    if (!std::isfinite(sq)) {
      model.params().zero_grad();
      throw NumericDivergence("non-finite gradient at update epoch " + std::to_string(epoch));
    }
    report.grad_norm = std::sqrt(sq);
    if (config.max_grad_norm > 0.0) nn::clip_global_norm(model.params().trainable(), config.max_grad_norm);
    optimizer.step();

    report.total = total;
    report.policy = 0.5 * (loss.policy_service.item() + loss.policy_device.item());
    report.value = 0.5 * (loss.value_service.item() + loss.value_device.item());
    report.entropy = 0.5 * (loss.entropy_service.item() + loss.entropy_device.item());
    report.epochs = epoch + 1;
  }
  model.params().zero_grad();
  return report;
}

}  // namespace fogforge
