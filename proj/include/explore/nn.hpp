#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace explore {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Activations recorded by a forward pass; enough to backpropagate any scalar
// loss of the output. activations[0] is the input batch, activations[l] the
// output of layer l (post-tanh for hidden layers).
struct GradTape {
  std::vector<Matrix> activations;
};

// Fully connected network, tanh hidden layers, identity output.
// Batched calls take one sample per column.
class Mlp {
 public:
  Mlp() = default;
  // Zero weights and biases.
  explicit Mlp(std::vector<int> widths);
  // Fan-in scaled uniform init: W ~ U(-gain/sqrt(fan_in), gain/sqrt(fan_in)), b = 0.
  // The output layer is scaled down by `output_gain`.
  static Mlp initialized(std::vector<int> widths, std::uint64_t seed, double output_gain = 0.1);

  const std::vector<int>& widths() const { return widths_; }
  int input_size() const { return widths_.front(); }
  int output_size() const { return widths_.back(); }
  std::size_t num_layers() const { return weights_.size(); }
  std::size_t parameter_count() const;

  Vector forward(const Vector& input) const;
  Matrix forward_batch(const Matrix& inputs, GradTape* tape = nullptr) const;

  // Adds d(loss)/d(params) into `grad` (flat layout of parameters()) given
  // d(loss)/d(output) for the batch recorded in `tape`. Returns d(loss)/d(input).
  Matrix backward(const GradTape& tape, const Matrix& output_grad, Eigen::Ref<Vector> grad) const;

  // Flat parameter vector: per layer, W column-major then b.
  Vector parameters() const;
  void set_parameters(const Eigen::Ref<const Vector>& params);

  Matrix& weight(std::size_t layer) { return weights_[layer]; }
  const Matrix& weight(std::size_t layer) const { return weights_[layer]; }
  Vector& bias(std::size_t layer) { return biases_[layer]; }
  const Vector& bias(std::size_t layer) const { return biases_[layer]; }

 private:
  std::vector<int> widths_;
  std::vector<Matrix> weights_;  // weights_[l] is widths_[l+1] x widths_[l]
  std::vector<Vector> biases_;
};

struct AdamParams {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam() = default;
  Adam(std::size_t size, AdamParams params);

  // One descent step on `params` along `grads`. Throws NumericError on a
  // non-finite gradient without touching any state.
  void step(Eigen::Ref<Vector> params, const Eigen::Ref<const Vector>& grads);

  const AdamParams& params() const { return params_; }
  long steps() const { return t_; }

 private:
  AdamParams params_;
  Vector m_, v_;
  long t_ = 0;
};

// Checkpoint: "NNCKPT01", u32 layer count, u32 widths, f64 parameters, then any
// trailing f64 values (all little-endian).
void write_checkpoint(std::ostream& out, const Mlp& net, const Vector& trailing = {});
Mlp read_checkpoint(std::istream& in, Vector* trailing = nullptr, std::size_t trailing_size = 0);

void save_checkpoint(const std::string& path, const Mlp& net, const Vector& trailing = {});
Mlp load_checkpoint(const std::string& path, Vector* trailing = nullptr, std::size_t trailing_size = 0);

}  // namespace explore
