#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "ucmec/access_channel.hpp"
#include "ucmec/seeding.hpp"

using namespace ucmec;

namespace {

NetworkConfig reference_cfg() {
  NetworkConfig cfg;
  return cfg;  // defaults are the reference deployment
}

}  // namespace

TEST_CASE("fixed propagation term matches independent arithmetic") {
  // Recomputed longhand, term by term, as the oracle.
  const double lf = std::log10(1900.0);
  const double oracle = 46.3 + 33.9 * lf - 13.82 * std::log10(15.0) -
                        (1.11 * lf - 0.7) * 1.65 + 1.56 * lf - 0.8;
  CHECK(pathloss_fixed_term_db(1900.0, 15.0, 1.65) ==
        doctest::Approx(oracle).epsilon(1e-12));
  CHECK(pathloss_fixed_term_db(1900.0, 15.0, 1.65) ==
        doctest::Approx(140.6609842694927).epsilon(1e-12));
}

TEST_CASE("far-branch path loss at 50 m matches the frozen golden") {
  const NetworkConfig cfg = reference_cfg();
  CHECK(path_loss_db(50.0, cfg) ==
        doctest::Approx(-95.12493442125336).epsilon(1e-9));
  // Middle branch at 12 m.
  CHECK(path_loss_db(12.0, cfg) ==
        doctest::Approx(-74.88597807628041).epsilon(1e-9));
}

TEST_CASE("path loss is continuous at both breakpoints") {
  const NetworkConfig cfg = reference_cfg();
  const double eps = 1e-9;
  CHECK(path_loss_db(cfg.breakpoint1_m + eps, cfg) ==
        doctest::Approx(path_loss_db(cfg.breakpoint1_m - eps, cfg)).epsilon(1e-9));
  CHECK(path_loss_db(cfg.breakpoint0_m + eps, cfg) ==
        doctest::Approx(path_loss_db(cfg.breakpoint0_m - eps, cfg)).epsilon(1e-9));
}

TEST_CASE("path loss saturates below the inner breakpoint and decays beyond") {
  const NetworkConfig cfg = reference_cfg();
  CHECK(path_loss_db(3.0, cfg) == path_loss_db(9.0, cfg));
  double prev = path_loss_db(1.0, cfg);
  for (double d = 2.0; d < 1000.0; d += 7.3) {
    const double cur = path_loss_db(d, cfg);
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
}

TEST_CASE("shadowing correlation limits collapse per node") {
  Rng rng(123);
  const Matrix all_ap = draw_shadowing(5, 7, 1.0, rng);
  for (int n = 0; n < 7; ++n)
    for (int m = 1; m < 5; ++m)
      CHECK(all_ap(m, n) == doctest::Approx(all_ap(0, n)).epsilon(1e-12));
  const Matrix all_user = draw_shadowing(5, 7, 0.0, rng);
  for (int m = 0; m < 5; ++m)
    for (int n = 1; n < 7; ++n)
      CHECK(all_user(m, n) == doctest::Approx(all_user(m, 0)).epsilon(1e-12));
}

TEST_CASE("balanced shadowing has unit variance") {
  Rng rng(99);
  const Matrix mu = draw_shadowing(400, 250, 0.5, rng);
  const double mean = mu.mean();
  const double var = (mu.array() - mean).square().mean();
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("large-scale fading composes path loss and shadowing") {
  Array2d pl(1, 1), mu(1, 1);
  pl(0, 0) = -100.0;
  mu(0, 0) = 0.0;
  CHECK(Array2d(large_scale_fading(pl, 8.0, mu))(0, 0) ==
        doctest::Approx(1e-10).epsilon(1e-12));
  mu(0, 0) = 1.25;
  CHECK(Array2d(large_scale_fading(pl, 8.0, mu))(0, 0) ==
        doctest::Approx(1e-9).epsilon(1e-12));
}

TEST_CASE("estimate quality limits") {
  Array2d beta(1, 1);
  beta(0, 0) = 0.37;
  CHECK(Array2d(estimate_quality(10.0, 0.1, beta, 0.0))(0, 0) ==
        doctest::Approx(0.37).epsilon(1e-12));
  CHECK(Array2d(estimate_quality(10.0, 0.0, beta, 1e-3))(0, 0) == 0.0);
  beta(0, 0) = 1.0;
  CHECK(Array2d(estimate_quality(1.0, 1.0, beta, 1.0))(0, 0) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("estimate quality never exceeds the fading it estimates") {
  Rng rng(5);
  Array2d beta(20, 30);
  for (int m = 0; m < 20; ++m)
    for (int n = 0; n < 30; ++n) beta(m, n) = std::pow(10.0, uniform_range(rng, -14.0, -8.0));
  const Array2d q = estimate_quality(10.0, 0.1, beta, 7.96e-14);
  CHECK((q < beta).all());
  CHECK((q > 0.0).all());
}

TEST_CASE("cluster formation picks the strongest APs in order") {
  Matrix q(2, 4);
  q << 0.1, 0.9, 0.4, 0.2,
       0.5, 0.5, 0.6, 0.1;
  const IntMatrix c = form_clusters(q, 2);
  CHECK(c(0, 0) == 1);
  CHECK(c(0, 1) == 2);
  CHECK(c(1, 0) == 2);
  CHECK(c(1, 1) == 0);  // tie between APs 0 and 1 resolves to the smaller index
}

TEST_CASE("full-width clusters enumerate every AP") {
  Rng rng(17);
  Matrix q(3, 6);
  for (int m = 0; m < 3; ++m)
    for (int n = 0; n < 6; ++n) q(m, n) = uniform01(rng);
  const IntMatrix c = form_clusters(q, 6);
  for (int m = 0; m < 3; ++m) {
    std::vector<bool> seen(6, false);
    for (int i = 0; i < 6; ++i) seen[c(m, i)] = true;
    for (int n = 0; n < 6; ++n) CHECK(seen[n]);
    for (int i = 1; i < 6; ++i) CHECK(q(m, c(m, i - 1)) >= q(m, c(m, i)));
  }
}

TEST_CASE("cluster formation agrees with the full-sort reference") {
  Rng rng(31);
  Matrix q(5, 8);
  for (int m = 0; m < 5; ++m)
    for (int n = 0; n < 8; ++n) q(m, n) = uniform01(rng);
  const IntMatrix got = form_clusters(q, 3);
  const IntMatrix want = ucmec::testing::reference_clusters(q, 3);
  CHECK((got - want).cwiseAbs().maxCoeff() == 0);
}

namespace {

// Hand-built two-user state shared by the SINR goldens.
AccessChannelState rich_state() {
  AccessChannelState st;
  st.quality.resize(2, 3);
  st.quality << 0.5, 0.3, 0.05,
                0.1, 0.4, 0.35;
  st.fading.resize(2, 3);
  st.fading << 0.6, 0.4, 0.1,
               0.2, 0.5, 0.45;
  st.clusters.resize(2, 2);
  st.clusters << 0, 1,
                 1, 2;
  return st;
}

NetworkConfig sinr_cfg() {
  NetworkConfig cfg;
  cfg.antennas_per_ap = 2;
  cfg.noise_psd_dbm_hz = 20.0;  // with 1 Hz bandwidth: 0.1 W noise
  cfg.access_bandwidth_hz = 1.0;
  return cfg;
}

}  // namespace

TEST_CASE("uplink SINR closed forms") {
  NetworkConfig cfg = sinr_cfg();
  CHECK(cfg.access_noise_w() == doctest::Approx(0.1).epsilon(1e-12));

  SUBCASE("zero transmit power yields zero SINR") {
    AccessChannelState st = rich_state();
    Vector p(2);
    p << 0.0, 0.1;
    CHECK(uplink_sinr(0, p, st, cfg) == 0.0);
  }

  SUBCASE("single user reduces to antennas * p * sum(quality) / noise") {
    AccessChannelState st;
    st.quality.resize(1, 2);
    st.quality << 0.5, 0.3;
    st.fading.resize(1, 2);
    st.fading << 0.6, 0.4;
    st.clusters.resize(1, 2);
    st.clusters << 0, 1;
    Vector p(1);
    p << 0.1;
    const double want = 2.0 * 0.1 * 0.8 / 0.1;
    CHECK(uplink_sinr(0, p, st, cfg) == doctest::Approx(want).epsilon(1e-12));
  }

  SUBCASE("two users, single-AP clusters, hand-evaluated") {
    AccessChannelState st;
    st.quality.resize(2, 2);
    st.quality << 0.5, 0.0,
                  0.0, 0.4;
    st.fading.resize(2, 2);
    st.fading << 0.6, 0.1,
                 0.2, 0.5;
    st.clusters.resize(2, 1);
    st.clusters << 0,
                   1;
    Vector p(2);
    p << 0.1, 0.05;
    // rho * p0 * q00^2 / (p1 * q00 * beta10 + noise * q00) = 10/11
    CHECK(uplink_sinr(0, p, st, cfg) ==
          doctest::Approx(0.9090909090909091).epsilon(1e-12));
  }

  SUBCASE("overlapping clusters, frozen goldens for both users") {
    AccessChannelState st = rich_state();
    Vector p(2);
    p << 0.1, 0.08;
    CHECK(uplink_sinr(0, p, st, cfg) == doctest::Approx(1.28).epsilon(1e-12));
    CHECK(uplink_sinr(1, p, st, cfg) ==
          doctest::Approx(0.9523809523809522).epsilon(1e-12));
  }

  SUBCASE("literal interferer-cluster variant changes only the cross term") {
    AccessChannelState st = rich_state();
    Vector p(2);
    p << 0.1, 0.08;
    cfg.interference_literal_clusters = true;
    CHECK(uplink_sinr(0, p, st, cfg) ==
          doctest::Approx(1.1786372007366483).epsilon(1e-12));
  }
}

TEST_CASE("uplink SINR monotonicity in powers") {
  NetworkConfig cfg = sinr_cfg();
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    AccessChannelState st;
    st.quality.resize(3, 4);
    st.fading.resize(3, 4);
    for (int m = 0; m < 3; ++m)
      for (int n = 0; n < 4; ++n) {
        st.fading(m, n) = uniform_range(rng, 0.05, 1.0);
        st.quality(m, n) = st.fading(m, n) * uniform_range(rng, 0.3, 0.99);
      }
    st.clusters = form_clusters(st.quality, 2);
    Vector p(3);
    for (int m = 0; m < 3; ++m) p(m) = uniform_range(rng, 0.01, 0.1);
    const double base = uplink_sinr(0, p, st, cfg);
    Vector p_up = p;
    p_up(0) *= 1.5;
    CHECK(uplink_sinr(0, p_up, st, cfg) > base);
    Vector p_int = p;
    p_int(1) *= 1.5;
    CHECK(uplink_sinr(0, p_int, st, cfg) < base);
  }
}

TEST_CASE("uplink rate is Shannon over the access bandwidth") {
  CHECK(uplink_rate(3.0, 1e6) == doctest::Approx(2e6).epsilon(1e-12));
  CHECK(uplink_rate(0.0, 20e6) == 0.0);
}

TEST_CASE("reference noise power over 20 MHz") {
  const NetworkConfig cfg = reference_cfg();
  CHECK(cfg.access_noise_w() ==
        doctest::Approx(7.962143411069971e-14).epsilon(1e-12));
}

TEST_CASE("built access state is internally consistent") {
  NetworkConfig cfg = reference_cfg();
  cfg.user_count = 6;
  cfg.ap_count = 12;
  const Topology topo = place_nodes(cfg, derive_seed(11, Stream::Placement));
  Rng shadow = make_rng(11, Stream::Shadowing);
  const AccessChannelState st = build_access_state(cfg, topo, shadow);
  CHECK(st.fading.rows() == 6);
  CHECK(st.fading.cols() == 12);
  CHECK(st.clusters.cols() == cfg.cluster_size);
  CHECK((st.quality.array() > 0.0).all());
  CHECK((st.quality.array() < st.fading.array()).all());
  // Same seeds reproduce the state bit for bit.
  Rng shadow2 = make_rng(11, Stream::Shadowing);
  const AccessChannelState st2 = build_access_state(cfg, topo, shadow2);
  CHECK((st.fading - st2.fading).cwiseAbs().maxCoeff() == 0.0);
  CHECK((st.clusters - st2.clusters).cwiseAbs().maxCoeff() == 0);
}
