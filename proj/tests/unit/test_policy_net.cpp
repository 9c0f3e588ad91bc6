#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "deepmpr/policy_net.hpp"

namespace deepmpr {
namespace {

NetworkShape small_shape(bool separate) {
  NetworkShape s;
  s.input = 2;
  s.hidden = {8, 8};
  s.actions = 3;
  s.separate_critic = separate;
  return s;
}

PolicyParams random_params(const NetworkShape& shape, std::uint64_t seed, double scale = 0.8) {
  Rng rng(seed);
  PolicyParams p = zero_params(shape);
  for (double& t : p.theta) t = uniform(rng, -scale, scale);
  return p;
}

// Plain-loop dense layer over the documented flat layout.
std::vector<double> dense(const std::vector<double>& theta, std::size_t& offset, const std::vector<double>& x,
                          std::size_t out, bool squash) {
  const std::size_t in = x.size();
  std::vector<double> y(out);
  for (std::size_t o = 0; o < out; ++o) {
    double z = theta[offset + in * out + o];
    for (std::size_t k = 0; k < in; ++k) z += theta[offset + o * in + k] * x[k];
    y[o] = squash ? std::tanh(z) : z;
  }
  offset += (in + 1) * out;
  return y;
}

struct NaiveOut {
  std::vector<double> logits;
  double value;
};

NaiveOut naive_forward(const PolicyParams& p, const std::vector<double>& obs) {
  const auto& s = p.shape;
  std::size_t off = 0;
  std::vector<double> h = obs;
  for (std::size_t w : s.hidden) h = dense(p.theta, off, h, w, true);
  NaiveOut out;
  out.logits = dense(p.theta, off, h, s.actions, false);
  if (s.separate_critic) {
    h = obs;
    for (std::size_t w : s.hidden) h = dense(p.theta, off, h, w, true);
  }
  out.value = dense(p.theta, off, h, 1, false)[0];
  return out;
}

TEST(PolicyNet, ParamCount) {
  NetworkShape s;
  s.input = 89;
  s.actions = 24;
  EXPECT_EQ(s.param_count(), (89 + 1) * 64 + (64 + 1) * 64 + (64 + 1) * 24 + (64 + 1) * 1);
  s.separate_critic = true;
  EXPECT_EQ(s.param_count(), 2 * ((89 + 1) * 64 + (64 + 1) * 64) + (64 + 1) * 24 + (64 + 1) * 1);
}

TEST(PolicyNet, ZeroParamsGiveHalfAndZeroValue) {
  NetworkShape s;
  s.input = 89;
  s.actions = 24;
  const PolicyParams p = zero_params(s);
  std::vector<double> obs(89, 0.3);
  std::vector<std::uint8_t> mask(24, 1);
  const PolicyOutput out = policy_forward(p, obs, mask);
  ASSERT_EQ(out.probs.size(), 24u);
  for (double q : out.probs) EXPECT_EQ(q, 0.5);
  EXPECT_EQ(out.value, 0.0);
}

TEST(PolicyNet, ShapeMismatch) {
  const PolicyParams p = zero_params(small_shape(false));
  std::vector<double> obs(3, 0.0);
  std::vector<std::uint8_t> mask(3, 1);
  EXPECT_THROW(policy_forward(p, obs, mask), ShapeMismatch);
  obs.resize(2);
  mask.resize(2);
  EXPECT_THROW(policy_forward(p, obs, mask), ShapeMismatch);
}

TEST(PolicyNet, MaskedComponentsAreHalf) {
  const PolicyParams p = random_params(small_shape(false), 3);
  const std::vector<double> obs{0.2, -0.7};
  const std::vector<std::uint8_t> mask{1, 0, 1};
  const PolicyOutput out = policy_forward(p, obs, mask);
  EXPECT_EQ(out.probs[1], 0.5);
  const NaiveOut ref = naive_forward(p, obs);
  EXPECT_NEAR(out.probs[0], 1.0 / (1.0 + std::exp(-ref.logits[0])), 1e-12);
  EXPECT_NEAR(out.probs[2], 1.0 / (1.0 + std::exp(-ref.logits[2])), 1e-12);
}

TEST(PolicyNet, BatchForwardMatchesNaive) {
  for (bool separate : {false, true}) {
    const PolicyParams p = random_params(small_shape(separate), 5);
    Rng rng(6);
    RowMatrix obs(10, 2);
    for (Eigen::Index r = 0; r < obs.rows(); ++r)
      for (Eigen::Index c = 0; c < 2; ++c) obs(r, c) = uniform(rng, -1, 1);
    const ForwardCache f = forward_batch(p, obs);
    for (Eigen::Index r = 0; r < obs.rows(); ++r) {
      const NaiveOut ref = naive_forward(p, {obs(r, 0), obs(r, 1)});
      for (std::size_t a = 0; a < 3; ++a) EXPECT_NEAR(f.logits(r, static_cast<Eigen::Index>(a)), ref.logits[a], 1e-12);
      EXPECT_NEAR(f.values(r), ref.value, 1e-12);
    }
  }
}

// Back-propagation of a random linear functional of the outputs against
// central differences of the naive forward pass.
TEST(PolicyNet, BackwardMatchesFiniteDifferences) {
  for (bool separate : {false, true}) {
    const NetworkShape shape = small_shape(separate);
    PolicyParams p = random_params(shape, 8);
    Rng rng(9);
    const int batch = 32;
    RowMatrix obs(batch, 2);
    RowMatrix dl(batch, 3);
    Eigen::VectorXd dv(batch);
    for (int r = 0; r < batch; ++r) {
      obs(r, 0) = uniform(rng, -1, 1);
      obs(r, 1) = uniform(rng, -1, 1);
      for (int a = 0; a < 3; ++a) dl(r, a) = uniform(rng, -1, 1);
      dv(r) = uniform(rng, -1, 1);
    }
    auto loss = [&](const PolicyParams& q) {
      double s = 0.0;
      for (int r = 0; r < batch; ++r) {
        const NaiveOut o = naive_forward(q, {obs(r, 0), obs(r, 1)});
        for (int a = 0; a < 3; ++a) s += dl(r, a) * o.logits[static_cast<std::size_t>(a)];
        s += dv(r) * o.value;
      }
      return s;
    };
    std::vector<double> grad(p.theta.size(), 0.0);
    backward_batch(p, forward_batch(p, obs), dl, dv, grad);
    double worst = 0.0;
    for (std::size_t k = 0; k < p.theta.size(); ++k) {
      const double keep = p.theta[k];
      p.theta[k] = keep + 1e-6;
      const double up = loss(p);
      p.theta[k] = keep - 1e-6;
      const double down = loss(p);
      p.theta[k] = keep;
      const double num = (up - down) / 2e-6;
      worst = std::max(worst, std::abs(num - grad[k]) / std::max({std::abs(num), std::abs(grad[k]), 1e-5}));
    }
    EXPECT_LT(worst, 1e-4) << "separate=" << separate;
  }
}

TEST(PolicyNet, InitIsSmallAndDeterministic) {
  NetworkShape s;
  s.input = 89;
  s.actions = 24;
  Rng a(1);
  Rng b(1);
  const PolicyParams p = init_params(s, a);
  EXPECT_EQ(p, init_params(s, b));
  std::vector<double> obs(89, 0.5);
  std::vector<std::uint8_t> mask(24, 1);
  for (double q : policy_forward(p, obs, mask).probs) EXPECT_NEAR(q, 0.5, 0.05);
  const auto layers = s.layers();
  for (const auto& l : layers) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.fan_in));
    for (std::size_t k = 0; k < l.fan_in * l.fan_out; ++k) EXPECT_LE(std::abs(p.theta[l.offset + k]), bound);
    for (std::size_t k = 0; k < l.fan_out; ++k) EXPECT_EQ(p.theta[l.offset + l.fan_in * l.fan_out + k], 0.0);
  }
}

TEST(PolicyNet, CheckpointRoundTrip) {
  for (bool separate : {false, true}) {
    PolicyParams p = random_params(small_shape(separate), 12);
    p.version = 77;
    std::stringstream buf;
    save_checkpoint(buf, p);
    const PolicyParams q = load_checkpoint(buf);
    EXPECT_EQ(q.shape, p.shape);
    EXPECT_EQ(q.version, 77u);
    ASSERT_EQ(q.theta.size(), p.theta.size());
    for (std::size_t k = 0; k < p.theta.size(); ++k) EXPECT_EQ(q.theta[k], static_cast<double>(static_cast<float>(p.theta[k])));
  }
}

TEST(PolicyNet, CheckpointRejectsBadInput) {
  std::stringstream bad_magic("NOTACKPT0000000000000000");
  EXPECT_THROW(load_checkpoint(bad_magic), CheckpointError);

  std::stringstream buf;
  save_checkpoint(buf, random_params(small_shape(false), 1));
  const std::string whole = buf.str();
  std::stringstream truncated(whole.substr(0, whole.size() - 3));
  EXPECT_THROW(load_checkpoint(truncated), CheckpointError);

  PolicyParams nan = random_params(small_shape(false), 1);
  nan.theta[4] = std::nan("");
  std::stringstream nbuf;
  save_checkpoint(nbuf, nan);
  EXPECT_THROW(load_checkpoint(nbuf), CheckpointError);

  EXPECT_THROW(load_checkpoint(std::string("/nonexistent/dir/policy.bin")), CheckpointError);
}

}  // namespace
}  // namespace deepmpr
