#include "deepmpr/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace deepmpr {

namespace {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }
double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

void PpoConfig::check() const {
  std::vector<FieldError> errors;
  auto need = [&](bool ok, const char* field, const char* reason) {
    if (!ok) errors.push_back({field, reason});
  };
  need(clip > 0.0 && clip < 1.0, "ppo.clip", "must lie in (0, 1)");
  need(gamma >= 0.0 && gamma <= 1.0, "ppo.gamma", "must lie in [0, 1]");
  need(lambda >= 0.0 && lambda <= 1.0, "ppo.lambda", "must lie in [0, 1]");
  need(learning_rate > 0.0, "ppo.learning_rate", "must be positive");
  need(epochs > 0, "ppo.epochs", "must be positive");
  need(minibatch > 0, "ppo.minibatch", "must be positive");
  need(entropy_coef >= 0.0, "ppo.entropy_coef", "must be non-negative");
  need(value_coef >= 0.0, "ppo.value_coef", "must be non-negative");
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

std::size_t RolloutBuffer::steps() const {
  std::size_t n = 0;
  for (const auto& t : trajectories) n += t.size();
  return n;
}

void RolloutBuffer::append(RolloutBuffer&& other) {
  for (auto& t : other.trajectories) trajectories.push_back(std::move(t));
  other.trajectories.clear();
}

AdvantageSet gae_advantages(const RolloutBuffer& buffer, double gamma, double lambda, bool normalize) {
  AdvantageSet out;
  const std::size_t total = buffer.steps();
  out.advantages.resize(total);
  out.returns.resize(total);
  std::size_t base = 0;
  for (const auto& traj : buffer.trajectories) {
    if (traj.empty()) continue;
    if (!traj.back().done) throw OpenEpisode("trajectory of " + std::to_string(traj.size()) + " steps has no terminal step");
    double running = 0.0;
    for (std::size_t k = traj.size(); k-- > 0;) {
      const Transition& s = traj[k];
      // a terminal flag mid-trajectory also cuts the bootstrap
      const double next_value = (s.done || k + 1 == traj.size()) ? 0.0 : traj[k + 1].value;
      if (s.done) running = 0.0;
      const double delta = s.reward + gamma * next_value - s.value;
      running = delta + gamma * lambda * running;
      out.advantages[base + k] = running;
      out.returns[base + k] = running + s.value;
    }
    base += traj.size();
  }
  if (normalize && total > 0) {
    const double mean = std::accumulate(out.advantages.begin(), out.advantages.end(), 0.0) / static_cast<double>(total);
    double var = 0.0;
    for (double a : out.advantages) var += (a - mean) * (a - mean);
    var /= static_cast<double>(total);
    const double sd = std::sqrt(var);
    for (double& a : out.advantages) a = sd > 1e-12 ? (a - mean) / (sd + 1e-8) : a - mean;
  }
  return out;
}

double bernoulli_log_prob(std::span<const double> logits, std::span<const std::uint8_t> action,
                          std::span<const std::uint8_t> mask) {
  double lp = 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    if (!mask[j]) continue;
    lp += (action[j] ? logits[j] : 0.0) - softplus(logits[j]);
  }
  return lp;
}

Batch make_batch(const RolloutBuffer& buffer, const AdvantageSet& adv, const std::vector<std::size_t>& indices) {
  std::vector<const Transition*> flat;
  flat.reserve(buffer.steps());
  for (const auto& traj : buffer.trajectories)
    for (const auto& s : traj) flat.push_back(&s);

  Batch b;
  if (indices.empty()) return b;
  const auto rows = static_cast<Eigen::Index>(indices.size());
  const auto width = static_cast<Eigen::Index>(flat[indices[0]]->obs.size());
  const auto m = static_cast<Eigen::Index>(flat[indices[0]]->mask.size());
  b.obs.resize(rows, width);
  b.mask.resize(rows, m);
  b.action.resize(rows, m);
  b.old_log_prob.resize(rows);
  b.advantage.resize(rows);
  b.ret.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::size_t k = indices[static_cast<std::size_t>(r)];
    const Transition& s = *flat[k];
    if (static_cast<Eigen::Index>(s.obs.size()) != width || static_cast<Eigen::Index>(s.mask.size()) != m ||
        s.action.size() != s.mask.size()) {
      throw ShapeMismatch("rollout records have inconsistent widths");
    }
    for (Eigen::Index c = 0; c < width; ++c) b.obs(r, c) = s.obs[static_cast<std::size_t>(c)];
    for (Eigen::Index c = 0; c < m; ++c) {
      b.mask(r, c) = s.mask[static_cast<std::size_t>(c)] ? 1.0 : 0.0;
      b.action(r, c) = s.action[static_cast<std::size_t>(c)] ? 1.0 : 0.0;
    }
    b.old_log_prob(r) = s.log_prob;
    b.advantage(r) = adv.advantages[k];
    b.ret(r) = adv.returns[k];
  }
  return b;
}

double clipped_surrogate(double ratio, double advantage, double clip) {
  const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
  return std::min(ratio * advantage, clipped * advantage);
}

LossBreakdown ppo_loss(const PolicyParams& params, const Batch& batch, const PpoConfig& config,
                       std::vector<double>* grad) {
  LossBreakdown out;
  const auto rows = batch.obs.rows();
  if (rows == 0) return out;
  if (batch.mask.cols() != static_cast<Eigen::Index>(params.shape.actions)) {
    throw ShapeMismatch("batch action width does not match the network");
  }
  const double inv_b = 1.0 / static_cast<double>(rows);
  ForwardCache cache = forward_batch(params, batch.obs);
  const auto m = cache.logits.cols();

  RowMatrix d_logits;
  Eigen::VectorXd d_values;
  if (grad) {
    d_logits = RowMatrix::Zero(rows, m);
    d_values = Eigen::VectorXd::Zero(rows);
  }

  std::size_t clipped = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    double lp = 0.0;
    double h = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (batch.mask(r, j) == 0.0) continue;
      const double z = cache.logits(r, j);
      const double sp = softplus(z);
      lp += batch.action(r, j) * z - sp;
      h += sp - sigmoid(z) * z;
    }
    const double ratio = std::exp(lp - batch.old_log_prob(r));
    const double a = batch.advantage(r);
    const double surr = clipped_surrogate(ratio, a, config.clip);
    if (std::abs(ratio - 1.0) > config.clip) ++clipped;
    const double v_err = cache.values(r) - batch.ret(r);

    out.surrogate += surr * inv_b;
    out.entropy += h * inv_b;
    out.value_loss += v_err * v_err * inv_b;
    out.mean_ratio += ratio * inv_b;
    out.approx_kl += (batch.old_log_prob(r) - lp) * inv_b;

    if (grad) {
      // d(surr)/d(log pi): ratio * A on the unclipped branch, 0 when the clip binds
      const double clipped_val = std::clamp(ratio, 1.0 - config.clip, 1.0 + config.clip) * a;
      const double d_surr_d_lp = ratio * a <= clipped_val ? ratio * a : 0.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (batch.mask(r, j) == 0.0) continue;
        const double z = cache.logits(r, j);
        const double p = sigmoid(z);
        const double d_lp = batch.action(r, j) - p;
        const double d_h = -z * p * (1.0 - p);
        d_logits(r, j) = inv_b * (-d_surr_d_lp * d_lp - config.entropy_coef * d_h);
      }
      d_values(r) = inv_b * config.value_coef * 2.0 * v_err;
    }
  }
  out.clip_fraction = static_cast<double>(clipped) * inv_b;
  out.total = -out.surrogate + config.value_coef * out.value_loss - config.entropy_coef * out.entropy;

  if (grad) {
    grad->assign(params.theta.size(), 0.0);
    backward_batch(params, cache, d_logits, d_values, *grad);
  }
  return out;
}

void adam_step(std::vector<double>& theta, const std::vector<double>& grad, AdamState& state, double lr,
               double beta1, double beta2, double eps) {
  if (state.m.size() != theta.size()) {
    state.m.assign(theta.size(), 0.0);
    state.v.assign(theta.size(), 0.0);
    state.t = 0;
  }
  ++state.t;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
  for (std::size_t k = 0; k < theta.size(); ++k) {
    state.m[k] = beta1 * state.m[k] + (1.0 - beta1) * grad[k];
    state.v[k] = beta2 * state.v[k] + (1.0 - beta2) * grad[k] * grad[k];
    theta[k] -= lr * (state.m[k] / c1) / (std::sqrt(state.v[k] / c2) + eps);
  }
}

UpdateStats ppo_update(PolicyParams& params, const RolloutBuffer& buffer, const PpoConfig& config,
                       AdamState& adam, Rng& rng) {
  config.check();
  UpdateStats stats;
  const std::size_t total = buffer.steps();
  if (total == 0) return stats;
  const AdvantageSet adv = gae_advantages(buffer, config.gamma, config.lambda, config.normalize_advantages);

  PolicyParams next = params;
  AdamState next_adam = adam;
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad;
  double norm_sum = 0.0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < total; start += config.minibatch) {
      const std::size_t stop = std::min(total, start + config.minibatch);
      std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                   order.begin() + static_cast<std::ptrdiff_t>(stop));
      const Batch batch = make_batch(buffer, adv, idx);
      const LossBreakdown loss = ppo_loss(next, batch, config, &grad);
      double sq = 0.0;
      for (double g : grad) sq += g * g;
      const double norm = std::sqrt(sq);
      if (!std::isfinite(norm) || !std::isfinite(loss.total)) {
        throw NonFiniteGradient("non-finite gradient in epoch " + std::to_string(epoch));
      }
      if (config.max_grad_norm > 0.0 && norm > config.max_grad_norm) {
        const double s = config.max_grad_norm / norm;
        for (double& g : grad) g *= s;
      }
      adam_step(next.theta, grad, next_adam, config.learning_rate);

      stats.loss.total += loss.total;
      stats.loss.surrogate += loss.surrogate;
      stats.loss.value_loss += loss.value_loss;
      stats.loss.entropy += loss.entropy;
      stats.loss.mean_ratio += loss.mean_ratio;
      stats.loss.clip_fraction += loss.clip_fraction;
      stats.loss.approx_kl += loss.approx_kl;
      norm_sum += norm;
      ++stats.minibatches;
    }
  }
  for (double v : next.theta) {
    if (!std::isfinite(v)) throw NonFiniteGradient("update produced non-finite parameters");
  }
  const double k = 1.0 / static_cast<double>(stats.minibatches);
  stats.loss.total *= k;
  stats.loss.surrogate *= k;
  stats.loss.value_loss *= k;
  stats.loss.entropy *= k;
  stats.loss.mean_ratio *= k;
  stats.loss.clip_fraction *= k;
  stats.loss.approx_kl *= k;
  stats.grad_norm = norm_sum * k;
  stats.samples = total;
  next.version = params.version + 1;
  params = std::move(next);
  adam = std::move(next_adam);
  return stats;
}

}  // namespace deepmpr
