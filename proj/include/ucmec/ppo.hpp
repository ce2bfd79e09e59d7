#ifndef UCMEC_PPO_HPP
#define UCMEC_PPO_HPP

#include <cstdint>
#include <vector>

#include "ucmec/mlp.hpp"
#include "ucmec/random.hpp"
#include "ucmec/types.hpp"

namespace ucmec {

// Row-wise stable softmax / log-softmax over logits.
Matrix softmax_rows(const Matrix& logits);
Matrix log_softmax_rows(const Matrix& logits);

// Log probability of the chosen column per row.
Vector chosen_log_prob(const Matrix& logits, const IntVector& actions);

// Shannon entropy per row.
Vector entropy_rows(const Matrix& logits);

// Inverse-CDF draw over softmax(logits); bit-stable across platforms.
int sample_categorical(const Vector& logits, Rng& rng);

// Smallest index attaining the maximum.
int argmax_index(const Vector& v);

struct GaeResult {
  Vector advantages;
  Vector returns;
};

// Generalized advantage estimation over a flat rollout. dones[t] marks the
// final step of an episode; bootstrap_value is V of the state after the last
// step (ignored when dones.back() is set).
GaeResult compute_gae(const Vector& rewards, const Vector& values,
                      const std::vector<std::uint8_t>& dones,
                      double bootstrap_value, double gamma, double lam);

// A minibatch for a two-head (target, power) policy update.
struct ActorBatch {
  Matrix obs;          // B x obs_dim
  IntMatrix actions;   // B x 2
  Vector logp_old;     // B
  Vector advantages;   // B
};

struct ActorLoss {
  double policy = 0.0;
  double entropy = 0.0;
  double total = 0.0;  // policy - entropy_coef * entropy
};

// Clipped-surrogate loss with an entropy bonus; adds d(total)/dparams into
// grad. The joint log probability is the sum over the two heads.
ActorLoss actor_loss_and_grad(const Mlp& actor, const ActorBatch& batch,
                              double clip_eps, double entropy_coef,
                              Vector& grad);

struct CriticBatch {
  Matrix obs;         // B x obs_dim
  Vector returns;     // B
  Vector values_old;  // B, only read by the clipped form
};

// Plain mean squared error against the returns.
double critic_loss_and_grad(const Mlp& critic, const CriticBatch& batch,
                            Vector& grad);

// Elementwise max of the raw and the clipped squared error, the conservative
// value update used with a centralized critic.
double clipped_critic_loss_and_grad(const Mlp& critic, const CriticBatch& batch,
                                    double clip_eps, Vector& grad);

// Rescales grad so its norm is at most max_norm; returns the original norm.
double clip_grad_norm(Vector& grad, double max_norm);

class Adam {
 public:
  Adam() = default;
  Adam(int n, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);
  void step(Vector& params, const Vector& grad);
  double lr() const { return lr_; }
  void set_lr(double lr) { lr_ = lr; }

 private:
  Vector m_, v_;
  double lr_ = 0.0, b1_ = 0.9, b2_ = 0.999, eps_ = 1e-8;
  long t_ = 0;
};

}  // namespace ucmec

#endif
