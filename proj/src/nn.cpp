#include "explore/nn.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "explore/errors.hpp"
#include "explore/random.hpp"

namespace explore {

namespace {

constexpr char kMagic[8] = {'N', 'N', 'C', 'K', 'P', 'T', '0', '1'};

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw InputError("checkpoint: truncated file");
  return v;
}

// tanh through the vectorised exp; within a few ulp of std::tanh.
template <typename Derived>
auto fast_tanh(const Eigen::ArrayBase<Derived>& x) {
  return 1.0 - 2.0 / ((2.0 * x).exp() + 1.0);
}

}  // namespace

Mlp::Mlp(std::vector<int> widths) : widths_(std::move(widths)) {
  if (widths_.size() < 2) throw InputError("Mlp: need at least input and output widths");
  for (int w : widths_)
    if (w < 1) throw InputError("Mlp: widths must be positive");
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    weights_.push_back(Matrix::Zero(widths_[l + 1], widths_[l]));
    biases_.push_back(Vector::Zero(widths_[l + 1]));
  }
}

Mlp Mlp::initialized(std::vector<int> widths, std::uint64_t seed, double output_gain) {
  Mlp net(std::move(widths));
  Rng rng = make_rng(seed, {tag(Stream::Init)});
  for (std::size_t l = 0; l < net.weights_.size(); ++l) {
    const double gain = l + 1 == net.weights_.size() ? output_gain : 1.0;
    const double bound = gain * std::sqrt(3.0 / net.widths_[l]);
    std::uniform_real_distribution<double> u(-bound, bound);
    Matrix& W = net.weights_[l];
    for (Eigen::Index j = 0; j < W.cols(); ++j)
      for (Eigen::Index i = 0; i < W.rows(); ++i) W(i, j) = u(rng);
  }
  return net;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
  return n;
}

Vector Mlp::forward(const Vector& input) const {
  if (input.size() != input_size()) throw InputError("Mlp::forward: input size mismatch");
  Vector h = input;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Vector z = weights_[l] * h + biases_[l];
    h = l + 1 < weights_.size() ? Vector(fast_tanh(z.array())) : z;
  }
  return h;
}

Matrix Mlp::forward_batch(const Matrix& inputs, GradTape* tape) const {
  if (inputs.rows() != input_size()) throw InputError("Mlp::forward_batch: input size mismatch");
  if (tape) {
    tape->activations.clear();
    tape->activations.push_back(inputs);
  }
  Matrix h = inputs;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Matrix z(weights_[l].rows(), h.cols());
    z.noalias() = weights_[l] * h;
    z.colwise() += biases_[l];
    if (l + 1 < weights_.size()) z.array() = fast_tanh(z.array());
    h = std::move(z);
    if (tape) tape->activations.push_back(h);
  }
  return h;
}

Matrix Mlp::backward(const GradTape& tape, const Matrix& output_grad, Eigen::Ref<Vector> grad) const {
  if (tape.activations.size() != weights_.size() + 1) throw InputError("Mlp::backward: tape does not match network");
  if (grad.size() != static_cast<Eigen::Index>(parameter_count()))
    throw InputError("Mlp::backward: gradient size mismatch");
  if (output_grad.rows() != output_size() || output_grad.cols() != tape.activations.back().cols())
    throw InputError("Mlp::backward: output gradient shape mismatch");

  // Offsets of each layer's block in the flat vector.
  std::vector<Eigen::Index> offset(weights_.size());
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    offset[l] = pos;
    pos += weights_[l].size() + biases_[l].size();
  }

  Matrix delta = output_grad;  // d(loss)/d(pre-activation) of the current layer
  for (std::size_t l = weights_.size(); l-- > 0;) {
    const Matrix& in = tape.activations[l];
    Eigen::Map<Matrix> dW(grad.data() + offset[l], weights_[l].rows(), weights_[l].cols());
    dW.noalias() += delta * in.transpose();
    grad.segment(offset[l] + weights_[l].size(), biases_[l].size()) += delta.rowwise().sum();
    Matrix dIn = weights_[l].transpose() * delta;
    if (l > 0) dIn.array() *= 1.0 - in.array().square();  // in = tanh(z_{l-1})
    delta = std::move(dIn);
  }
  return delta;
}

Vector Mlp::parameters() const {
  Vector p(parameter_count());
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    p.segment(pos, weights_[l].size()) = Eigen::Map<const Vector>(weights_[l].data(), weights_[l].size());
    pos += weights_[l].size();
    p.segment(pos, biases_[l].size()) = biases_[l];
    pos += biases_[l].size();
  }
  return p;
}

void Mlp::set_parameters(const Eigen::Ref<const Vector>& params) {
  if (params.size() != static_cast<Eigen::Index>(parameter_count()))
    throw InputError("Mlp::set_parameters: size mismatch");
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::Map<Vector>(weights_[l].data(), weights_[l].size()) = params.segment(pos, weights_[l].size());
    pos += weights_[l].size();
    biases_[l] = params.segment(pos, biases_[l].size());
    pos += biases_[l].size();
  }
}

Adam::Adam(std::size_t size, AdamParams params)
    : params_(params), m_(Vector::Zero(static_cast<Eigen::Index>(size))), v_(Vector::Zero(static_cast<Eigen::Index>(size))) {}

void Adam::step(Eigen::Ref<Vector> params, const Eigen::Ref<const Vector>& grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) throw InputError("Adam::step: size mismatch");
  if (!grads.allFinite()) throw NumericError("Adam::step: non-finite gradient");
  ++t_;
  m_ = params_.beta1 * m_ + (1 - params_.beta1) * grads;
  v_ = params_.beta2 * v_ + (1 - params_.beta2) * grads.cwiseProduct(grads);
  const double c1 = 1 - std::pow(params_.beta1, static_cast<double>(t_));
  const double c2 = 1 - std::pow(params_.beta2, static_cast<double>(t_));
  params.array() -= params_.learning_rate * (m_.array() / c1) / ((v_.array() / c2).sqrt() + params_.epsilon);
}

void write_checkpoint(std::ostream& out, const Mlp& net, const Vector& trailing) {
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(net.widths().size()));
  for (int w : net.widths()) put<std::uint32_t>(out, static_cast<std::uint32_t>(w));
  const Vector p = net.parameters();
  for (Eigen::Index i = 0; i < p.size(); ++i) put<double>(out, p[i]);
  for (Eigen::Index i = 0; i < trailing.size(); ++i) put<double>(out, trailing[i]);
}

Mlp read_checkpoint(std::istream& in, Vector* trailing, std::size_t trailing_size) {
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw InputError("checkpoint: bad magic");
  const auto count = get<std::uint32_t>(in);
  if (count < 2 || count > 64) throw InputError("checkpoint: implausible layer count");
  std::vector<int> widths(count);
  for (auto& w : widths) w = static_cast<int>(get<std::uint32_t>(in));
  Mlp net(widths);
  Vector p(net.parameter_count());
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = get<double>(in);
  net.set_parameters(p);
  if (trailing) {
    trailing->resize(static_cast<Eigen::Index>(trailing_size));
    for (Eigen::Index i = 0; i < trailing->size(); ++i) (*trailing)[i] = get<double>(in);
  }
  return net;
}

void save_checkpoint(const std::string& path, const Mlp& net, const Vector& trailing) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open checkpoint for writing: " + path);
  write_checkpoint(out, net, trailing);
}

Mlp load_checkpoint(const std::string& path, Vector* trailing, std::size_t trailing_size) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint: " + path);
  return read_checkpoint(in, trailing, trailing_size);
}

}  // namespace explore
