#include "ucmec/mlp.hpp"

#include <Eigen/QR>
#include <stdexcept>

namespace ucmec {

namespace {

int layer_params(int rows, int cols) { return rows * cols + rows; }

// Orthogonal matrix via QR of a standard normal draw, signs fixed from R's
// diagonal so the distribution is uniform over the orthogonal group.
Matrix orthogonal(int rows, int cols, Rng& rng) {
  const int big = std::max(rows, cols);
  const int small = std::min(rows, cols);
  Matrix a(big, small);
  for (int c = 0; c < small; ++c)
    for (int r = 0; r < big; ++r) a(r, c) = normal01(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(big, small);
  const Matrix r = qr.matrixQR().topRows(small);
  for (int c = 0; c < small; ++c)
    if (r(c, c) < 0.0) q.col(c) = -q.col(c);
  if (rows < cols) return q.transpose();
  return q;
}

}  // namespace

Mlp::Mlp(int input_dim, std::vector<int> hidden, std::vector<int> heads)
    : heads_(std::move(heads)) {
  if (input_dim <= 0) throw std::invalid_argument("Mlp: input_dim");
  if (heads_.empty()) throw std::invalid_argument("Mlp: no heads");
  dims_.push_back(input_dim);
  for (int h : hidden) {
    if (h <= 0) throw std::invalid_argument("Mlp: hidden width");
    dims_.push_back(h);
  }
  int total = 0;
  for (size_t l = 1; l < dims_.size(); ++l)
    total += layer_params(dims_[l], dims_[l - 1]);
  for (int h : heads_) {
    if (h <= 0) throw std::invalid_argument("Mlp: head width");
    total += layer_params(h, dims_.back());
  }
  params_ = Vector::Zero(total);
}

Mlp::Slice Mlp::trunk_slice(int layer) const {
  Slice s;
  int off = 0;
  for (int l = 0; l < layer; ++l)
    off += layer_params(dims_[l + 1], dims_[l]);
  s.rows = dims_[layer + 1];
  s.cols = dims_[layer];
  s.w_off = off;
  s.b_off = off + s.rows * s.cols;
  return s;
}

Mlp::Slice Mlp::head_slice(int h) const {
  Slice s;
  int off = 0;
  for (size_t l = 1; l < dims_.size(); ++l)
    off += layer_params(dims_[l], dims_[l - 1]);
  for (int i = 0; i < h; ++i) off += layer_params(heads_[i], dims_.back());
  s.rows = heads_[h];
  s.cols = dims_.back();
  s.w_off = off;
  s.b_off = off + s.rows * s.cols;
  return s;
}

void Mlp::init_orthogonal(Rng& rng, double trunk_gain,
                          const std::vector<double>& head_gains) {
  if (head_gains.size() != heads_.size())
    throw std::invalid_argument("Mlp: one gain per head");
  params_.setZero();
  const int trunk_layers = static_cast<int>(dims_.size()) - 1;
  for (int l = 0; l < trunk_layers; ++l) {
    const Slice s = trunk_slice(l);
    Eigen::Map<Matrix>(params_.data() + s.w_off, s.rows, s.cols) =
        trunk_gain * orthogonal(s.rows, s.cols, rng);
  }
  for (int h = 0; h < head_count(); ++h) {
    const Slice s = head_slice(h);
    Eigen::Map<Matrix>(params_.data() + s.w_off, s.rows, s.cols) =
        head_gains[h] * orthogonal(s.rows, s.cols, rng);
  }
}

std::vector<Matrix> Mlp::forward(const Matrix& x, Cache* cache) const {
  if (x.cols() != input_dim()) throw std::invalid_argument("Mlp: input width");
  const int trunk_layers = static_cast<int>(dims_.size()) - 1;
  if (cache) {
    cache->input = x;
    cache->acts.assign(trunk_layers, Matrix());
  }
  Matrix a = x;
  for (int l = 0; l < trunk_layers; ++l) {
    const Slice s = trunk_slice(l);
    const Eigen::Map<const Matrix> w(params_.data() + s.w_off, s.rows, s.cols);
    const Eigen::Map<const Vector> b(params_.data() + s.b_off, s.rows);
    a = ((a * w.transpose()).rowwise() + b.transpose()).array().tanh();
    if (cache) cache->acts[l] = a;
  }
  std::vector<Matrix> out;
  out.reserve(heads_.size());
  for (int h = 0; h < head_count(); ++h) {
    const Slice s = head_slice(h);
    const Eigen::Map<const Matrix> w(params_.data() + s.w_off, s.rows, s.cols);
    const Eigen::Map<const Vector> b(params_.data() + s.b_off, s.rows);
    out.push_back((a * w.transpose()).rowwise() + b.transpose());
  }
  return out;
}

void Mlp::backward(const Cache& cache, const std::vector<Matrix>& head_grads,
                   Vector& grad) const {
  if (grad.size() != params_.size())
    throw std::invalid_argument("Mlp: grad size");
  if (head_grads.size() != heads_.size())
    throw std::invalid_argument("Mlp: one gradient per head");
  const int trunk_layers = static_cast<int>(dims_.size()) - 1;
  const Matrix& last =
      trunk_layers > 0 ? cache.acts[trunk_layers - 1] : cache.input;

  Matrix da = Matrix::Zero(last.rows(), last.cols());
  for (int h = 0; h < head_count(); ++h) {
    const Slice s = head_slice(h);
    const Eigen::Map<const Matrix> w(params_.data() + s.w_off, s.rows, s.cols);
    const Matrix& g = head_grads[h];
    Eigen::Map<Matrix>(grad.data() + s.w_off, s.rows, s.cols) +=
        g.transpose() * last;
    Eigen::Map<Vector>(grad.data() + s.b_off, s.rows) +=
        g.colwise().sum().transpose();
    da += g * w;
  }

  for (int l = trunk_layers - 1; l >= 0; --l) {
    const Slice s = trunk_slice(l);
    const Eigen::Map<const Matrix> w(params_.data() + s.w_off, s.rows, s.cols);
    const Matrix& act = cache.acts[l];
    const Matrix& below = l > 0 ? cache.acts[l - 1] : cache.input;
    const Matrix dz = da.array() * (1.0 - act.array().square());
    Eigen::Map<Matrix>(grad.data() + s.w_off, s.rows, s.cols) +=
        dz.transpose() * below;
    Eigen::Map<Vector>(grad.data() + s.b_off, s.rows) +=
        dz.colwise().sum().transpose();
    if (l > 0) da = dz * w;
  }
}

}  // namespace ucmec
