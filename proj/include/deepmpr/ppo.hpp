#ifndef DEEPMPR_PPO_HPP_
#define DEEPMPR_PPO_HPP_

#include <cstdint>
#include <vector>

#include "deepmpr/policy_net.hpp"
#include "deepmpr/rng.hpp"

namespace deepmpr {

struct PpoConfig {
  double clip = 0.2;
  double gamma = 0.99;
  double lambda = 0.95;
  double learning_rate = 3e-4;
  std::size_t epochs = 4;
  std::size_t minibatch = 256;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double max_grad_norm = 0.5;  // <= 0 disables clipping
  bool normalize_advantages = true;

  // Throws ConfigError on out-of-range fields.
  void check() const;
};

// One agent step.
struct Transition {
  std::vector<double> obs;
  std::vector<std::uint8_t> mask;
  std::vector<std::uint8_t> action;
  double log_prob = 0.0;
  double reward = 0.0;
  double value = 0.0;
  bool done = false;
};

// Steps of one agent within one episode, in time order.
using Trajectory = std::vector<Transition>;

struct RolloutBuffer {
  std::vector<Trajectory> trajectories;

  std::size_t steps() const;
  void append(RolloutBuffer&& other);
};

// Flattened in trajectory order.
struct AdvantageSet {
  std::vector<double> advantages;
  std::vector<double> returns;  // raw advantage + value, before normalization
};

// Throws OpenEpisode if a trajectory does not end with a terminal step.
AdvantageSet gae_advantages(const RolloutBuffer& buffer, double gamma, double lambda, bool normalize);

// Joint log-probability of an independent-Bernoulli action, masked
// components excluded.
double bernoulli_log_prob(std::span<const double> logits, std::span<const std::uint8_t> action,
                          std::span<const std::uint8_t> mask);

struct Batch {
  RowMatrix obs;
  RowMatrix mask;    // 0/1
  RowMatrix action;  // 0/1
  Eigen::VectorXd old_log_prob;
  Eigen::VectorXd advantage;
  Eigen::VectorXd ret;

  std::size_t size() const { return static_cast<std::size_t>(obs.rows()); }
};

Batch make_batch(const RolloutBuffer& buffer, const AdvantageSet& adv, const std::vector<std::size_t>& indices);

struct LossBreakdown {
  double total = 0.0;      // minimized
  double surrogate = 0.0;  // mean clipped surrogate, maximized
  double value_loss = 0.0;
  double entropy = 0.0;
  double mean_ratio = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
};

// total = -surrogate + value_coef * mean((V - R)^2) - entropy_coef * mean(H).
// When grad is non-null it receives d(total)/d(theta) (overwritten).
LossBreakdown ppo_loss(const PolicyParams& params, const Batch& batch, const PpoConfig& config,
                       std::vector<double>* grad = nullptr);

// Per-sample clipped surrogate min(eta*A, clip(eta, 1-eps, 1+eps)*A).
double clipped_surrogate(double ratio, double advantage, double clip);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;
};

void adam_step(std::vector<double>& theta, const std::vector<double>& grad, AdamState& state, double lr,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

struct UpdateStats {
  LossBreakdown loss;  // averaged over minibatches
  double grad_norm = 0.0;
  std::size_t minibatches = 0;
  std::size_t samples = 0;
};

// Runs the configured epochs of minibatch Adam steps. On a non-finite
// gradient throws NonFiniteGradient and leaves params and adam untouched.
UpdateStats ppo_update(PolicyParams& params, const RolloutBuffer& buffer, const PpoConfig& config,
                       AdamState& adam, Rng& rng);

}  // namespace deepmpr

#endif  // DEEPMPR_PPO_HPP_
