#ifndef DEEPMPR_POLICY_NET_HPP_
#define DEEPMPR_POLICY_NET_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "deepmpr/common.hpp"
#include "deepmpr/rng.hpp"

namespace deepmpr {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Layer layout of the shared actor-critic. With a shared trunk the layers
// are: hidden..., actor head, critic head. With separate networks: actor
// hidden..., actor head, critic hidden..., critic head. Each layer stores
// its weights (fan_out x fan_in, row-major) followed by its biases.
struct NetworkShape {
  std::size_t input = 0;
  std::vector<std::size_t> hidden{64, 64};
  std::size_t actions = 0;
  bool separate_critic = false;

  struct Layer {
    std::size_t fan_in;
    std::size_t fan_out;
    std::size_t offset;  // into the flat parameter vector
  };
  std::vector<Layer> layers() const;
  std::size_t param_count() const;

  bool operator==(const NetworkShape&) const = default;
};

struct PolicyParams {
  NetworkShape shape;
  std::vector<double> theta;
  std::uint64_t version = 0;

  bool operator==(const PolicyParams&) const = default;
};

PolicyParams zero_params(const NetworkShape& shape);

// Uniform(+-1/sqrt(fan_in)) weights, zero biases; the actor head is scaled
// down so initial forward probabilities sit near 0.5.
PolicyParams init_params(const NetworkShape& shape, Rng& rng);

struct PolicyOutput {
  std::vector<double> probs;  // masked components are exactly 0.5
  double value = 0.0;
};

// Throws ShapeMismatch if obs.size() != shape.input or mask.size() != actions.
PolicyOutput policy_forward(const PolicyParams& params, std::span<const double> obs,
                            std::span<const std::uint8_t> mask);

// Batched forward pass: logits (B x actions) and values (B).
struct ForwardCache {
  std::vector<RowMatrix> actor_acts;   // input, then each hidden activation
  std::vector<RowMatrix> critic_acts;  // separate critic only
  RowMatrix logits;
  Eigen::VectorXd values;
};
ForwardCache forward_batch(const PolicyParams& params, const RowMatrix& obs);

// Accumulates d(loss)/d(theta) given d(loss)/d(logits) and d(loss)/d(values).
void backward_batch(const PolicyParams& params, const ForwardCache& cache, const RowMatrix& d_logits,
                    const Eigen::VectorXd& d_values, std::vector<double>& grad);

// Binary checkpoint: magic "DMPRCKPT", u32 format version, u64 policy
// version, u32 separate flag, u32 input, u32 hidden count, u32 widths...,
// u32 actions, u64 parameter count, then parameters as little-endian f32.
void save_checkpoint(std::ostream& out, const PolicyParams& params);
PolicyParams load_checkpoint(std::istream& in);
void save_checkpoint(const std::string& path, const PolicyParams& params);
PolicyParams load_checkpoint(const std::string& path);

}  // namespace deepmpr

#endif  // DEEPMPR_POLICY_NET_HPP_
