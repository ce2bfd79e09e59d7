#ifndef UCMEC_MLP_HPP
#define UCMEC_MLP_HPP

#include <vector>

#include "ucmec/random.hpp"
#include "ucmec/types.hpp"

namespace ucmec {

// Tanh trunk with any number of linear output heads, parameters in one flat
// vector so optimizers and serialization stay trivial. Forward and backward
// run on whole batches (rows are samples).
class Mlp {
 public:
  Mlp() = default;
  Mlp(int input_dim, std::vector<int> hidden, std::vector<int> heads);

  // Orthogonal weights scaled per layer, zero biases.
  void init_orthogonal(Rng& rng, double trunk_gain,
                       const std::vector<double>& head_gains);

  int input_dim() const { return dims_.empty() ? 0 : dims_.front(); }
  int head_count() const { return static_cast<int>(heads_.size()); }
  int head_dim(int h) const { return heads_[h]; }
  int param_count() const { return static_cast<int>(params_.size()); }
  Vector& params() { return params_; }
  const Vector& params() const { return params_; }

  struct Cache {
    Matrix input;
    std::vector<Matrix> acts;  // post-tanh trunk activations
  };

  // x: B x input_dim. Returns one B x head_dim matrix per head.
  std::vector<Matrix> forward(const Matrix& x, Cache* cache = nullptr) const;

  // head_grads: dL/d(head output) per head, shaped like forward's results.
  // Adds dL/dparams into grad (which must already have param_count entries).
  void backward(const Cache& cache, const std::vector<Matrix>& head_grads,
                Vector& grad) const;

 private:
  struct Slice {
    int w_off = 0, b_off = 0, rows = 0, cols = 0;
  };
  Slice trunk_slice(int layer) const;
  Slice head_slice(int h) const;

  std::vector<int> dims_;   // input then hidden widths
  std::vector<int> heads_;  // output widths
  Vector params_;
};

}  // namespace ucmec

#endif
