#include "deepmpr/policy_net.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace deepmpr {

namespace {

using ConstMat = Eigen::Map<const RowMatrix>;
using ConstVec = Eigen::Map<const Eigen::VectorXd>;
using Mat = Eigen::Map<RowMatrix>;
using Vec = Eigen::Map<Eigen::VectorXd>;

ConstMat weights(const std::vector<double>& theta, const NetworkShape::Layer& l) {
  return ConstMat(theta.data() + l.offset, static_cast<Eigen::Index>(l.fan_out), static_cast<Eigen::Index>(l.fan_in));
}
ConstVec biases(const std::vector<double>& theta, const NetworkShape::Layer& l) {
  return ConstVec(theta.data() + l.offset + l.fan_in * l.fan_out, static_cast<Eigen::Index>(l.fan_out));
}
Mat weights(std::vector<double>& g, const NetworkShape::Layer& l) {
  return Mat(g.data() + l.offset, static_cast<Eigen::Index>(l.fan_out), static_cast<Eigen::Index>(l.fan_in));
}
Vec biases(std::vector<double>& g, const NetworkShape::Layer& l) {
  return Vec(g.data() + l.offset + l.fan_in * l.fan_out, static_cast<Eigen::Index>(l.fan_out));
}

RowMatrix affine(const RowMatrix& a, const std::vector<double>& theta, const NetworkShape::Layer& l) {
  RowMatrix z = a * weights(theta, l).transpose();
  z.rowwise() += biases(theta, l).transpose();
  return z;
}

// Runs the tanh hidden stack; returns activations including the input.
std::vector<RowMatrix> hidden_pass(const RowMatrix& obs, const std::vector<double>& theta,
                                   const std::vector<NetworkShape::Layer>& layers, std::size_t first,
                                   std::size_t count) {
  std::vector<RowMatrix> acts;
  acts.reserve(count + 1);
  acts.push_back(obs);
  for (std::size_t k = 0; k < count; ++k) {
    acts.push_back(affine(acts.back(), theta, layers[first + k]).array().tanh().matrix());
  }
  return acts;
}

// Back-propagates d(loss)/d(last activation) through the hidden stack.
void hidden_backward(RowMatrix d_act, const std::vector<RowMatrix>& acts, const std::vector<double>& theta,
                     const std::vector<NetworkShape::Layer>& layers, std::size_t first, std::size_t count,
                     std::vector<double>& grad) {
  for (std::size_t k = count; k-- > 0;) {
    const auto& layer = layers[first + k];
    const RowMatrix& out = acts[k + 1];
    RowMatrix dz = (d_act.array() * (1.0 - out.array().square())).matrix();
    weights(grad, layer) += dz.transpose() * acts[k];
    biases(grad, layer) += dz.colwise().sum().transpose();
    if (k > 0) d_act = dz * weights(theta, layer);
  }
}

void head_backward(const RowMatrix& d_out, const RowMatrix& input, const NetworkShape::Layer& layer,
                   std::vector<double>& grad) {
  weights(grad, layer) += d_out.transpose() * input;
  biases(grad, layer) += d_out.colwise().sum().transpose();
}

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int k = 0; k < 4; ++k) b[k] = static_cast<unsigned char>((v >> (8 * k)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
  write_u32(out, static_cast<std::uint32_t>(v & 0xffffffffu));
  write_u32(out, static_cast<std::uint32_t>(v >> 32));
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw CheckpointError("truncated checkpoint");
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(b[k]) << (8 * k);
  return v;
}

std::uint64_t read_u64(std::istream& in) {
  const std::uint64_t lo = read_u32(in);
  const std::uint64_t hi = read_u32(in);
  return lo | (hi << 32);
}

constexpr char kMagic[8] = {'D', 'M', 'P', 'R', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kFormatVersion = 1;

}  // namespace

std::vector<NetworkShape::Layer> NetworkShape::layers() const {
  std::vector<Layer> out;
  std::size_t offset = 0;
  auto add = [&](std::size_t in, std::size_t outw) {
    out.push_back({in, outw, offset});
    offset += (in + 1) * outw;
  };
  auto stack = [&]() {
    std::size_t prev = input;
    for (std::size_t h : hidden) {
      add(prev, h);
      prev = h;
    }
    return prev;
  };
  const std::size_t last = stack();
  add(last, actions);
  if (separate_critic) {
    add(stack(), 1);
  } else {
    add(last, 1);
  }
  return out;
}

std::size_t NetworkShape::param_count() const {
  std::size_t n = 0;
  for (const auto& l : layers()) n += (l.fan_in + 1) * l.fan_out;
  return n;
}

PolicyParams zero_params(const NetworkShape& shape) {
  PolicyParams p;
  p.shape = shape;
  p.theta.assign(shape.param_count(), 0.0);
  return p;
}

PolicyParams init_params(const NetworkShape& shape, Rng& rng) {
  PolicyParams p = zero_params(shape);
  const auto layers = shape.layers();
  const std::size_t nh = shape.hidden.size();
  const std::size_t actor_head = nh;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& l = layers[k];
    double bound = 1.0 / std::sqrt(static_cast<double>(l.fan_in));
    if (k == actor_head) bound *= 0.01;
    for (std::size_t w = 0; w < l.fan_in * l.fan_out; ++w) p.theta[l.offset + w] = uniform(rng, -bound, bound);
  }
  return p;
}

ForwardCache forward_batch(const PolicyParams& params, const RowMatrix& obs) {
  const auto& shape = params.shape;
  if (static_cast<std::size_t>(obs.cols()) != shape.input) {
    std::ostringstream msg;
    msg << "observation width " << obs.cols() << " != network input " << shape.input;
    throw ShapeMismatch(msg.str());
  }
  const auto layers = shape.layers();
  const std::size_t nh = shape.hidden.size();
  ForwardCache c;
  c.actor_acts = hidden_pass(obs, params.theta, layers, 0, nh);
  c.logits = affine(c.actor_acts.back(), params.theta, layers[nh]);
  if (shape.separate_critic) {
    c.critic_acts = hidden_pass(obs, params.theta, layers, nh + 1, nh);
    c.values = affine(c.critic_acts.back(), params.theta, layers[2 * nh + 1]).col(0);
  } else {
    c.values = affine(c.actor_acts.back(), params.theta, layers[nh + 1]).col(0);
  }
  return c;
}

void backward_batch(const PolicyParams& params, const ForwardCache& cache, const RowMatrix& d_logits,
                    const Eigen::VectorXd& d_values, std::vector<double>& grad) {
  const auto& shape = params.shape;
  const auto layers = shape.layers();
  const std::size_t nh = shape.hidden.size();
  if (grad.size() != params.theta.size()) grad.assign(params.theta.size(), 0.0);
  RowMatrix d_values_mat = d_values;  // B x 1

  const RowMatrix& actor_top = cache.actor_acts.back();
  head_backward(d_logits, actor_top, layers[nh], grad);
  RowMatrix d_actor = d_logits * weights(params.theta, layers[nh]);
  if (shape.separate_critic) {
    const auto& critic_head = layers[2 * nh + 1];
    const RowMatrix& critic_top = cache.critic_acts.back();
    head_backward(d_values_mat, critic_top, critic_head, grad);
    if (nh > 0) {
      RowMatrix d_critic = d_values_mat * weights(params.theta, critic_head);
      hidden_backward(std::move(d_critic), cache.critic_acts, params.theta, layers, nh + 1, nh, grad);
    }
  } else {
    const auto& critic_head = layers[nh + 1];
    head_backward(d_values_mat, actor_top, critic_head, grad);
    d_actor += d_values_mat * weights(params.theta, critic_head);
  }
  if (nh > 0) hidden_backward(std::move(d_actor), cache.actor_acts, params.theta, layers, 0, nh, grad);
}

PolicyOutput policy_forward(const PolicyParams& params, std::span<const double> obs,
                            std::span<const std::uint8_t> mask) {
  if (mask.size() != params.shape.actions) {
    std::ostringstream msg;
    msg << "action mask width " << mask.size() << " != network actions " << params.shape.actions;
    throw ShapeMismatch(msg.str());
  }
  if (obs.size() != params.shape.input) {
    std::ostringstream msg;
    msg << "observation width " << obs.size() << " != network input " << params.shape.input;
    throw ShapeMismatch(msg.str());
  }
  RowMatrix x(1, static_cast<Eigen::Index>(obs.size()));
  for (std::size_t k = 0; k < obs.size(); ++k) x(0, static_cast<Eigen::Index>(k)) = obs[k];
  ForwardCache c = forward_batch(params, x);
  PolicyOutput out;
  out.probs.resize(mask.size());
  for (std::size_t j = 0; j < mask.size(); ++j) {
    out.probs[j] = mask[j] ? 1.0 / (1.0 + std::exp(-c.logits(0, static_cast<Eigen::Index>(j)))) : 0.5;
  }
  out.value = c.values(0);
  return out;
}

void save_checkpoint(std::ostream& out, const PolicyParams& params) {
  const auto& s = params.shape;
  out.write(kMagic, sizeof(kMagic));
  write_u32(out, kFormatVersion);
  write_u64(out, params.version);
  write_u32(out, s.separate_critic ? 1u : 0u);
  write_u32(out, static_cast<std::uint32_t>(s.input));
  write_u32(out, static_cast<std::uint32_t>(s.hidden.size()));
  for (std::size_t h : s.hidden) write_u32(out, static_cast<std::uint32_t>(h));
  write_u32(out, static_cast<std::uint32_t>(s.actions));
  write_u64(out, params.theta.size());
  for (double v : params.theta) write_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  if (!out) throw CheckpointError("failed writing checkpoint");
}

PolicyParams load_checkpoint(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("not a checkpoint (bad magic)");
  }
  const std::uint32_t format = read_u32(in);
  if (format != kFormatVersion) throw CheckpointError("unsupported checkpoint version " + std::to_string(format));
  PolicyParams p;
  p.version = read_u64(in);
  p.shape.separate_critic = read_u32(in) != 0;
  p.shape.input = read_u32(in);
  const std::uint32_t nh = read_u32(in);
  if (nh > 64) throw CheckpointError("implausible hidden layer count");
  p.shape.hidden.resize(nh);
  for (auto& h : p.shape.hidden) h = read_u32(in);
  p.shape.actions = read_u32(in);
  const std::uint64_t count = read_u64(in);
  if (count != p.shape.param_count()) throw CheckpointError("parameter count does not match layer header");
  p.theta.resize(count);
  for (auto& v : p.theta) {
    v = static_cast<double>(std::bit_cast<float>(read_u32(in)));
    if (!std::isfinite(v)) throw CheckpointError("non-finite parameter in checkpoint");
  }
  return p;
}

void save_checkpoint(const std::string& path, const PolicyParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open '" + path + "' for writing");
  save_checkpoint(out, params);
}

PolicyParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open '" + path + "'");
  return load_checkpoint(in);
}

}  // namespace deepmpr
