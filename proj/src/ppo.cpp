#include "ucmec/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ucmec {

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double mx = logits.row(i).maxCoeff();
    ArrayX<double> e = (logits.row(i).array() - mx).exp();
    out.row(i) = e / e.sum();
  }
  return out;
}

Matrix log_softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double mx = logits.row(i).maxCoeff();
    const ArrayX<double> shifted = logits.row(i).array() - mx;
    const double lse = std::log(shifted.exp().sum());
    out.row(i) = shifted - lse;
  }
  return out;
}

Vector chosen_log_prob(const Matrix& logits, const IntVector& actions) {
  const Matrix lp = log_softmax_rows(logits);
  Vector out(logits.rows());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) out(i) = lp(i, actions(i));
  return out;
}

Vector entropy_rows(const Matrix& logits) {
  const Matrix lp = log_softmax_rows(logits);
  Vector out(logits.rows());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    double h = 0.0;
    for (Eigen::Index j = 0; j < logits.cols(); ++j)
      h -= std::exp(lp(i, j)) * lp(i, j);
    out(i) = h;
  }
  return out;
}

int sample_categorical(const Vector& logits, Rng& rng) {
  const Matrix p = softmax_rows(logits.transpose());
  const double u = uniform01(rng);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    acc += p(0, j);
    if (u < acc) return static_cast<int>(j);
  }
  return static_cast<int>(p.cols()) - 1;
}

int argmax_index(const Vector& v) {
  int best = 0;
  for (Eigen::Index j = 1; j < v.size(); ++j)
    if (v(j) > v(best)) best = static_cast<int>(j);
  return best;
}

GaeResult compute_gae(const Vector& rewards, const Vector& values,
                      const std::vector<std::uint8_t>& dones,
                      double bootstrap_value, double gamma, double lam) {
  const Eigen::Index n = rewards.size();
  if (values.size() != n || static_cast<Eigen::Index>(dones.size()) != n)
    throw std::invalid_argument("gae: length mismatch");
  GaeResult out;
  out.advantages = Vector::Zero(n);
  out.returns = Vector::Zero(n);
  double adv = 0.0;
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const double cont = dones[t] ? 0.0 : 1.0;
    const double next_v = t + 1 < n ? values(t + 1) : bootstrap_value;
    const double delta = rewards(t) + gamma * cont * next_v - values(t);
    adv = delta + gamma * lam * cont * adv;
    out.advantages(t) = adv;
    out.returns(t) = adv + values(t);
  }
  return out;
}

ActorLoss actor_loss_and_grad(const Mlp& actor, const ActorBatch& batch,
                              double clip_eps, double entropy_coef,
                              Vector& grad) {
  const Eigen::Index b = batch.obs.rows();
  Mlp::Cache cache;
  const std::vector<Matrix> logits = actor.forward(batch.obs, &cache);
  if (logits.size() != 2)
    throw std::invalid_argument("actor must have two heads");

  const Matrix lp_t = log_softmax_rows(logits[0]);
  const Matrix lp_p = log_softmax_rows(logits[1]);
  const Matrix prob_t = lp_t.array().exp();
  const Matrix prob_p = lp_p.array().exp();

  Vector logp_new(b), ent(b);
  for (Eigen::Index i = 0; i < b; ++i) {
    logp_new(i) = lp_t(i, batch.actions(i, 0)) + lp_p(i, batch.actions(i, 1));
    double h = 0.0;
    for (Eigen::Index j = 0; j < lp_t.cols(); ++j)
      h -= prob_t(i, j) * lp_t(i, j);
    for (Eigen::Index j = 0; j < lp_p.cols(); ++j)
      h -= prob_p(i, j) * lp_p(i, j);
    ent(i) = h;
  }

  ActorLoss loss;
  Vector coef = Vector::Zero(b);  // d(policy term) / d logp_new, per sample
  for (Eigen::Index i = 0; i < b; ++i) {
    const double ratio = std::exp(logp_new(i) - batch.logp_old(i));
    const double a = batch.advantages(i);
    const double surr1 = ratio * a;
    const double clipped =
        std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps) * a;
    loss.policy -= std::min(surr1, clipped);
    if (surr1 <= clipped) coef(i) = ratio * a;
    loss.entropy += ent(i);
  }
  const double bn = static_cast<double>(b);
  loss.policy /= bn;
  loss.entropy /= bn;
  loss.total = loss.policy - entropy_coef * loss.entropy;

  // Head gradients of the scalar total, assembled per sample.
  std::vector<Matrix> head_grads(2);
  head_grads[0] = Matrix::Zero(b, lp_t.cols());
  head_grads[1] = Matrix::Zero(b, lp_p.cols());
  for (Eigen::Index i = 0; i < b; ++i) {
    const double c = coef(i) / bn;
    for (int head = 0; head < 2; ++head) {
      const Matrix& lp = head == 0 ? lp_t : lp_p;
      const Matrix& prob = head == 0 ? prob_t : prob_p;
      const int chosen = batch.actions(i, head);
      const double h_this = [&] {
        double h = 0.0;
        for (Eigen::Index j = 0; j < lp.cols(); ++j)
          h -= prob(i, j) * lp(i, j);
        return h;
      }();
      for (Eigen::Index j = 0; j < lp.cols(); ++j) {
        const double dlogp = (j == chosen ? 1.0 : 0.0) - prob(i, j);
        const double dent = -prob(i, j) * (lp(i, j) + h_this);
        head_grads[head](i, j) =
            -c * dlogp - entropy_coef * dent / bn;
      }
    }
  }
  actor.backward(cache, head_grads, grad);
  return loss;
}

double critic_loss_and_grad(const Mlp& critic, const CriticBatch& batch,
                            Vector& grad) {
  const Eigen::Index b = batch.obs.rows();
  Mlp::Cache cache;
  const Vector v = critic.forward(batch.obs, &cache)[0].col(0);
  const Vector err = v - batch.returns;
  const double loss = err.squaredNorm() / static_cast<double>(b);
  std::vector<Matrix> head_grads(1);
  head_grads[0] = (2.0 / static_cast<double>(b)) * err;
  critic.backward(cache, head_grads, grad);
  return loss;
}

double clipped_critic_loss_and_grad(const Mlp& critic, const CriticBatch& batch,
                                    double clip_eps, Vector& grad) {
  const Eigen::Index b = batch.obs.rows();
  Mlp::Cache cache;
  const Vector v = critic.forward(batch.obs, &cache)[0].col(0);
  const double bn = static_cast<double>(b);
  double loss = 0.0;
  Matrix g = Matrix::Zero(b, 1);
  for (Eigen::Index i = 0; i < b; ++i) {
    const double raw = v(i) - batch.returns(i);
    const double v_clip =
        batch.values_old(i) +
        std::clamp(v(i) - batch.values_old(i), -clip_eps, clip_eps);
    const double clip_err = v_clip - batch.returns(i);
    if (raw * raw >= clip_err * clip_err) {
      loss += raw * raw;
      g(i, 0) = 2.0 * raw / bn;
    } else {
      loss += clip_err * clip_err;
      const bool pass =
          std::abs(v(i) - batch.values_old(i)) < clip_eps;
      g(i, 0) = pass ? 2.0 * clip_err / bn : 0.0;
    }
  }
  loss /= bn;
  std::vector<Matrix> head_grads{g};
  critic.backward(cache, head_grads, grad);
  return loss;
}

double clip_grad_norm(Vector& grad, double max_norm) {
  const double norm = grad.norm();
  if (norm > max_norm && norm > 0.0) grad *= max_norm / norm;
  return norm;
}

Adam::Adam(int n, double lr, double beta1, double beta2, double eps)
    : m_(Vector::Zero(n)), v_(Vector::Zero(n)), lr_(lr), b1_(beta1),
      b2_(beta2), eps_(eps) {}

void Adam::step(Vector& params, const Vector& grad) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw std::invalid_argument("Adam: size mismatch");
  t_ += 1;
  m_ = b1_ * m_ + (1.0 - b1_) * grad;
  v_ = b2_ * v_ + (1.0 - b2_) * grad.array().square().matrix();
  const double bias1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  params.array() -=
      lr_ * (m_.array() / bias1) / ((v_.array() / bias2).sqrt() + eps_);
}

}  // namespace ucmec
