#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "ucmec/ppo.hpp"

using namespace ucmec;

namespace {

// Actor whose head logits copy the input straight through: obs columns 0..1
// feed the target head, 2..3 the power head.
Mlp passthrough_actor() {
  Mlp net(4, {}, {2, 2});
  Vector& p = net.params();
  p.setZero();
  // Head 0 weight (2x4, column-major): picks x0, x1.
  p(0) = 1.0;  // w(0,0)
  p(3) = 1.0;  // w(1,1)
  // Head 1 weight starts after head 0's 8 + 2 params.
  p(10 + 4) = 1.0;  // w(0,2)
  p(10 + 7) = 1.0;  // w(1,3)
  return net;
}

}  // namespace

TEST_CASE("gae with lambda zero reduces to the TD error") {
  Vector r(3), v(3);
  r << 1.0, -0.5, 2.0;
  v << 0.3, 0.7, 0.1;
  std::vector<std::uint8_t> done{0, 0, 0};
  const GaeResult g = compute_gae(r, v, done, 0.9, 0.99, 0.0);
  CHECK(g.advantages(0) ==
        doctest::Approx(1.0 + 0.99 * 0.7 - 0.3).epsilon(1e-12));
  CHECK(g.advantages(1) ==
        doctest::Approx(-0.5 + 0.99 * 0.1 - 0.7).epsilon(1e-12));
  CHECK(g.advantages(2) ==
        doctest::Approx(2.0 + 0.99 * 0.9 - 0.1).epsilon(1e-12));
}

TEST_CASE("a lone terminal step has advantage r minus v") {
  Vector r(1), v(1);
  r << 5.0;
  v << 2.0;
  std::vector<std::uint8_t> done{1};
  const GaeResult g = compute_gae(r, v, done, 123.0, 0.9, 0.95);
  CHECK(g.advantages(0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(g.returns(0) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("three-step golden values") {
  Vector r(3), v(3);
  r << 1.0, 2.0, 3.0;
  v << 0.5, 1.0, 1.5;
  std::vector<std::uint8_t> done{0, 0, 1};
  const GaeResult g = compute_gae(r, v, done, 0.0, 0.9, 0.8);
  CHECK(g.advantages(0) == doctest::Approx(3.8696).epsilon(1e-12));
  CHECK(g.advantages(1) == doctest::Approx(3.43).epsilon(1e-12));
  CHECK(g.advantages(2) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(g.returns(0) == doctest::Approx(4.3696).epsilon(1e-12));
  CHECK(g.returns(1) == doctest::Approx(4.43).epsilon(1e-12));
  CHECK(g.returns(2) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("lambda one equals the Monte Carlo advantage exactly") {
  Rng rng(77);
  const int episodes = 4, len = 50;
  const int n = episodes * len;
  Vector r(n), v(n);
  ArrayX<bool> done_b(n);
  std::vector<std::uint8_t> done(n);
  for (int i = 0; i < n; ++i) {
    r(i) = uniform_range(rng, -1.0, 1.0);
    v(i) = uniform_range(rng, -1.0, 1.0);
    done_b(i) = (i + 1) % len == 0;
    done[i] = done_b(i) ? 1 : 0;
  }
  const double gamma = 0.99;
  const GaeResult g = compute_gae(r, v, done, 0.0, gamma, 1.0);
  const Vector mc = ucmec::testing::monte_carlo_advantage(r, v, done_b, gamma);
  for (int i = 0; i < n; ++i)
    CHECK(g.advantages(i) == doctest::Approx(mc(i)).epsilon(1e-12));
}

TEST_CASE("bootstrap feeds the tail when the rollout cuts mid-episode") {
  Vector r(2), v(2);
  r << 1.0, 1.0;
  v << 0.0, 0.0;
  std::vector<std::uint8_t> done{0, 0};
  const double gamma = 0.5;
  const GaeResult g = compute_gae(r, v, done, 4.0, gamma, 1.0);
  // t=1: 1 + 0.5*4 = 3; t=0: 1 + 0.5*3 = 2.5.
  CHECK(g.advantages(1) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(g.advantages(0) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("clipped surrogate picks the documented branches") {
  Mlp net = passthrough_actor();
  ActorBatch batch;
  batch.obs.resize(2, 4);
  // Uniform logits everywhere: logp_new = log(1/4) per sample.
  batch.obs.setZero();
  batch.actions.resize(2, 2);
  batch.actions << 0, 0, 1, 1;
  batch.advantages.resize(2);
  batch.logp_old.resize(2);
  const double logp_new = std::log(0.25);
  // Sample 0: ratio 2 with positive advantage, clipped to 1.2.
  batch.advantages(0) = 1.0;
  batch.logp_old(0) = logp_new - std::log(2.0);
  // Sample 1: ratio 0.5 with negative advantage, clipped to 0.8.
  batch.advantages(1) = -1.0;
  batch.logp_old(1) = logp_new - std::log(0.5);

  Vector grad = Vector::Zero(net.param_count());
  const ActorLoss loss = actor_loss_and_grad(net, batch, 0.2, 0.0, grad);
  // min(2*1, 1.2*1) = 1.2 and min(-0.5, -0.8) = -0.8; mean of negatives.
  CHECK(loss.policy == doctest::Approx(-(1.2 - 0.8) / 2.0).epsilon(1e-12));
  // Both samples sit on clipped plateaus, so the policy gradient vanishes.
  CHECK(grad.cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("unclipped samples drive a nonzero gradient") {
  Mlp net = passthrough_actor();
  ActorBatch batch;
  batch.obs = Matrix::Zero(1, 4);
  batch.actions.resize(1, 2);
  batch.actions << 0, 1;
  batch.advantages = Vector::Constant(1, 2.0);
  // ratio = exp(-0.1), inside the clip window, so the surrogate is live.
  batch.logp_old = Vector::Constant(1, std::log(0.25) + 0.1);
  Vector grad = Vector::Zero(net.param_count());
  const ActorLoss loss = actor_loss_and_grad(net, batch, 0.2, 0.0, grad);
  CHECK(loss.policy < 0.0);
  CHECK(grad.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("actor loss gradient matches finite differences") {
  Mlp net(3, {6}, {3, 4});
  Rng rng(5);
  net.init_orthogonal(rng, std::sqrt(2.0), {0.3, 0.3});
  const int b = 8;
  ActorBatch batch;
  batch.obs.resize(b, 3);
  batch.actions.resize(b, 2);
  batch.advantages.resize(b);
  batch.logp_old.resize(b);
  Rng dr(6);
  for (int i = 0; i < b; ++i) {
    for (int j = 0; j < 3; ++j) batch.obs(i, j) = normal01(dr);
    batch.actions(i, 0) = static_cast<int>(uniform_below(dr, 3));
    batch.actions(i, 1) = static_cast<int>(uniform_below(dr, 4));
    batch.advantages(i) = uniform_range(dr, -2.0, 2.0);
    batch.logp_old(i) = uniform_range(dr, -3.0, -1.0);
  }
  const double eps = 0.2, ent_coef = 0.01;

  Vector grad = Vector::Zero(net.param_count());
  actor_loss_and_grad(net, batch, eps, ent_coef, grad);

  auto loss_at = [&](const Vector& params) {
    Mlp probe = net;
    probe.params() = params;
    Vector scratch = Vector::Zero(net.param_count());
    return actor_loss_and_grad(probe, batch, eps, ent_coef, scratch).total;
  };
  const Vector fd = ucmec::testing::finite_difference_gradient(
      loss_at, net.params(), 1e-6);
  for (int i = 0; i < net.param_count(); ++i) {
    const double scale = std::max(1.0, std::abs(fd(i)));
    CHECK(std::abs(grad(i) - fd(i)) / scale < 1e-4);
  }
}

TEST_CASE("critic mse loss and gradient") {
  Mlp net(3, {5}, {1});
  Rng rng(8);
  net.init_orthogonal(rng, std::sqrt(2.0), {1.0});
  CriticBatch batch;
  const int b = 6;
  batch.obs.resize(b, 3);
  batch.returns.resize(b);
  batch.values_old = Vector::Zero(b);
  Rng dr(9);
  for (int i = 0; i < b; ++i) {
    for (int j = 0; j < 3; ++j) batch.obs(i, j) = normal01(dr);
    batch.returns(i) = uniform_range(dr, -1.0, 1.0);
  }
  Vector grad = Vector::Zero(net.param_count());
  const double loss = critic_loss_and_grad(net, batch, grad);
  const Vector v = net.forward(batch.obs)[0].col(0);
  CHECK(loss ==
        doctest::Approx((v - batch.returns).squaredNorm() / b).epsilon(1e-12));

  auto loss_at = [&](const Vector& params) {
    Mlp probe = net;
    probe.params() = params;
    Vector scratch = Vector::Zero(net.param_count());
    return critic_loss_and_grad(probe, batch, scratch);
  };
  const Vector fd = ucmec::testing::finite_difference_gradient(
      loss_at, net.params(), 1e-6);
  for (int i = 0; i < net.param_count(); ++i) {
    const double scale = std::max(1.0, std::abs(fd(i)));
    CHECK(std::abs(grad(i) - fd(i)) / scale < 1e-4);
  }
}

TEST_CASE("clipped critic takes the worse of raw and clipped errors") {
  // Value head with fixed output: no hidden layers, weight 0, bias = 3.
  Mlp net(1, {}, {1});
  net.params() << 0.0, 3.0;
  CriticBatch batch;
  batch.obs = Matrix::Zero(1, 1);
  batch.returns = Vector::Constant(1, 1.0);
  batch.values_old = Vector::Constant(1, 1.0);
  Vector grad = Vector::Zero(2);
  const double loss = clipped_critic_loss_and_grad(net, batch, 0.2, grad);
  // v = 3, v_clip = 1.2: max((3-1)^2, (1.2-1)^2) = 4.
  CHECK(loss == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(grad(1) == doctest::Approx(4.0).epsilon(1e-12));  // d/db of (b-1)^2

  // Moving past the trust region with a perfect raw fit still costs.
  net.params() << 0.0, 2.0;
  batch.returns(0) = 2.0;
  Vector grad2 = Vector::Zero(2);
  const double loss2 = clipped_critic_loss_and_grad(net, batch, 0.2, grad2);
  CHECK(loss2 == doctest::Approx(0.64).epsilon(1e-12));
  CHECK(grad2(1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("clipped critic gradient matches finite differences") {
  Mlp net(3, {5}, {1});
  Rng rng(18);
  net.init_orthogonal(rng, std::sqrt(2.0), {1.0});
  CriticBatch batch;
  const int b = 6;
  batch.obs.resize(b, 3);
  batch.returns.resize(b);
  batch.values_old.resize(b);
  Rng dr(19);
  for (int i = 0; i < b; ++i) {
    for (int j = 0; j < 3; ++j) batch.obs(i, j) = normal01(dr);
    batch.returns(i) = uniform_range(dr, -1.0, 1.0);
    batch.values_old(i) = uniform_range(dr, -1.0, 1.0);
  }
  Vector grad = Vector::Zero(net.param_count());
  clipped_critic_loss_and_grad(net, batch, 0.2, grad);
  auto loss_at = [&](const Vector& params) {
    Mlp probe = net;
    probe.params() = params;
    Vector scratch = Vector::Zero(net.param_count());
    return clipped_critic_loss_and_grad(probe, batch, 0.2, scratch);
  };
  const Vector fd = ucmec::testing::finite_difference_gradient(
      loss_at, net.params(), 1e-6);
  for (int i = 0; i < net.param_count(); ++i) {
    const double scale = std::max(1.0, std::abs(fd(i)));
    CHECK(std::abs(grad(i) - fd(i)) / scale < 1e-4);
  }
}

TEST_CASE("gradient clipping rescales only above the threshold") {
  Vector g(3);
  g << 3.0, 4.0, 0.0;
  const double norm = clip_grad_norm(g, 0.5);
  CHECK(norm == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(g.norm() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g(0) / g(1) == doctest::Approx(0.75).epsilon(1e-12));

  Vector small(2);
  small << 0.1, 0.1;
  const double n2 = clip_grad_norm(small, 0.5);
  CHECK(n2 == doctest::Approx(std::sqrt(0.02)).epsilon(1e-12));
  CHECK(small(0) == 0.1);
}

TEST_CASE("adam takes near-lr steps under a constant unit gradient") {
  const int n = 4;
  Adam opt(n, 0.01);
  Vector params = Vector::Zero(n);
  const Vector grad = Vector::Ones(n);
  opt.step(params, grad);
  for (int i = 0; i < n; ++i)
    CHECK(params(i) == doctest::Approx(-0.01).epsilon(1e-6));
  opt.step(params, grad);
  for (int i = 0; i < n; ++i)
    CHECK(params(i) == doctest::Approx(-0.02).epsilon(1e-5));
}

TEST_CASE("adam with zero learning rate leaves parameters alone") {
  Adam opt(3, 0.0);
  Vector params(3);
  params << 1.0, 2.0, 3.0;
  Vector before = params;
  Vector grad(3);
  grad << 10.0, -5.0, 1.0;
  opt.step(params, grad);
  CHECK((params - before).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gae normalization helper stays outside: advantages raw here") {
  // compute_gae returns raw advantages; normalization happens per update
  // batch in the trainer. This pins the contract.
  Vector r(2), v(2);
  r << 1.0, 1.0;
  v << 0.0, 0.0;
  std::vector<std::uint8_t> done{0, 1};
  const GaeResult g = compute_gae(r, v, done, 0.0, 1.0, 1.0);
  CHECK(g.advantages(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(g.advantages(1) == doctest::Approx(1.0).epsilon(1e-12));
}
