// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "risplace/channel.hpp"
#include "risplace/error.hpp"
#include "support.hpp"

using namespace risplace;
using risplace::testing::make_channel_set;
using risplace::testing::random_cmat;
using risplace::testing::random_instance;

namespace {

constexpr double kPi = std::numbers::pi;

// Downlink row of user k is h_bu^H + theta^T cascade; SINR written out term by term.
double sinr_oracle(int k, const ChannelSet& cs, const CMat& W, const CVec& theta, double noise) {
  const int K = cs.users();
  const int M = cs.bs_antennas();
  const int N = cs.ris_elements();
  double signal = 0.0;
  double interference = 0.0;
  for (int i = 0; i < K; ++i) {
    cplx z = 0.0;
    for (int m = 0; m < M; ++m) {
      cplx row = std::conj(cs.h_bu[k][m]);
      for (int n = 0; n < N; ++n) row += theta[n] * std::conj(cs.h_ru[k][n]) * cs.h_br(n, m);
      z += row * W(m, i);
    }
    (i == k ? signal : interference) += std::norm(z);
  }
  return signal / (interference + noise);
}

double amplitude(double loss_db) { return std::pow(10.0, -loss_db / 20.0); }

}  // namespace

TEST_CASE("path loss examples") {
  CHECK(pathloss_ris_leg(1, 1) == doctest::Approx(28.0).epsilon(1e-12));
  CHECK(pathloss_ris_leg(10, 2.4) == doctest::Approx(57.604).epsilon(1e-4));
  CHECK(pathloss_ris_leg(100, 2.4) == doctest::Approx(79.604).epsilon(1e-4));
  CHECK(std::abs(pathloss_direct(10, 2.4) - 69.3) <= 0.05);
  CHECK(pathloss_direct(1, 1) == doctest::Approx(22.7).epsilon(1e-12));
  CHECK(pathloss_direct(20, 2.4) == doctest::Approx(80.33).epsilon(1e-4));

  CHECK(pathloss_ris_leg(100, 2.4) - pathloss_ris_leg(10, 2.4) == doctest::Approx(22.0));
  CHECK_THROWS_AS(pathloss_direct(0, 2.4), Error);
  CHECK_THROWS_AS(pathloss_ris_leg(-1, 2.4), Error);
}

TEST_CASE("noise power examples") {
  CHECK(noise_power_dbm(1, 0) == doctest::Approx(-174.0));
  CHECK(noise_power_dbm(10e6, 5) == doctest::Approx(-99.0));
  CHECK(noise_power_dbm(20e6, 5) == doctest::Approx(-95.99).epsilon(1e-4));
  RfParams rf;
  CHECK(linear_to_db(rf.noise_mw()) == doctest::Approx(-99.0));
}

TEST_CASE("steering vector examples") {
  const CVec a = steering_vector(4, 0.0, 0.5);
  for (int m = 0; m < 4; ++m) CHECK(std::abs(a[m] - cplx(1, 0)) < 1e-15);

  const CVec b = steering_vector(2, kPi / 2, 0.5);
  CHECK(std::abs(b[0] - cplx(1, 0)) < 1e-15);
  CHECK(std::abs(b[1] - cplx(-1, 0)) < 1e-12);

  const CVec c = steering_vector(33, 0.7, 0.37);
  for (int m = 0; m < 33; ++m) CHECK(std::abs(c[m]) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("link angles") {
  const std::vector<Point2> user{{5, 5}};
  CHECK(link_angles({0, 0}, {0, 10}, {}).bs_departure == doctest::Approx(0.0));
  CHECK(link_angles({0, 0}, {10, 0}, {}).bs_departure == doctest::Approx(kPi / 2));
  CHECK(link_angles({-3, -3}, {0, 0}, user).ris_departure[0] == doctest::Approx(kPi / 4));
  CHECK_THROWS_AS(link_angles({1, 1}, {1, 1}, {}), Error);

  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 200; ++i) {
    const double a = broadside_angle({u(eng), u(eng)}, {u(eng), u(eng)}, u(eng));
    CHECK(a > -kPi);
    CHECK(a <= kPi);
  }
}

TEST_CASE("sample_channels examples") {
  RfParams rf;
  rf.bs_antennas = 4;
  rf.ris_elements = 8;
  const Point2 bs{0, 0};
  const Point2 ris{0, 20};
  const std::vector<Point2> users{{20, 0}, {15, 10}};

  SUBCASE("every link blocked") {
    const std::vector<Obstacle> walls{make_wall({3, 0}, 100, kPi / 2), make_wall({0, 3}, 100, 0)};
    const auto cs = sample_channels(bs, walls, rf, ris, users, {11, 12});
    for (int k = 0; k < 2; ++k) {
      CHECK(cs.h_bu[k].squaredNorm() == 0.0);
      CHECK(cs.cascade[k].squaredNorm() == 0.0);
    }
    CHECK(cs.h_br.squaredNorm() == 0.0);
    const CMat W = CMat::Ones(4, 2);
    for (double g : sinrs(cs, W, CVec::Ones(8), rf.noise_mw())) CHECK(g == 0.0);
  }

  SUBCASE("deterministic part in the pure LOS limit") {
    RfParams los = rf;
    los.t1_db = 400;
    los.t2_db = 400;
    const auto cs = sample_channels(bs, std::vector<Obstacle>{}, los, ris, users, {1, 2});
    const CMat expected = amplitude(pathloss_ris_leg(20, rf.carrier_ghz)) *
                          steering_vector(8, broadside_angle(ris, bs, 0.0), 0.5) *
                          steering_vector(4, broadside_angle(bs, ris, 0.0), 0.5).adjoint();
    CHECK((cs.h_br - expected).norm() <= 1e-12 * expected.norm());
  }

  SUBCASE("fixed seeds reproduce the draw") {
    const auto a = sample_channels(bs, std::vector<Obstacle>{}, rf, ris, users, {5, 6});
    const auto b = sample_channels(bs, std::vector<Obstacle>{}, rf, ris, users, {5, 6});
    CHECK(a.h_br == b.h_br);
    for (int k = 0; k < 2; ++k) {
      CHECK(a.h_bu[k] == b.h_bu[k]);
      CHECK(a.h_ru[k] == b.h_ru[k]);
      CHECK(a.cascade[k] == b.cascade[k]);
    }
    const auto c = sample_channels(bs, std::vector<Obstacle>{}, rf, ris, users, {5, 7});
    CHECK(a.h_bu[0] == c.h_bu[0]);
    CHECK_FALSE(a.h_br == c.h_br);
  }

  SUBCASE("no RIS means zero reflected links") {
    const auto cs = sample_channels(bs, std::vector<Obstacle>{}, rf, std::nullopt, users, {5, 6});
    CHECK(cs.h_br.squaredNorm() == 0.0);
    CHECK(cs.bs_ris_blocked);
    CHECK(cs.h_bu[0].squaredNorm() > 0.0);
  }

  SUBCASE("cascade structure") {
    const auto cs = sample_channels(bs, std::vector<Obstacle>{}, rf, ris, users, {8, 9});
    for (int k = 0; k < 2; ++k) {
      const CMat expect = cs.h_ru[k].conjugate().asDiagonal() * cs.h_br;
      CHECK(cs.cascade[k] == expect);
    }
  }
}

TEST_CASE("sinr and wsr examples") {
  const double P = 2.0;
  const double noise = 0.5;
  CVec h(1);
  h[0] = 1.0;
  CMat H(1, 1);
  H(0, 0) = 1.0;
  CVec r(1);
  r[0] = 1.0;
  const auto cs = make_channel_set({h}, H, {r});
  CMat W(1, 1);
  W(0, 0) = std::sqrt(P);
  CHECK(sinr(0, cs, W, CVec::Ones(1), noise) == doctest::Approx(4 * P / noise));

  const auto zero = make_channel_set({CVec::Zero(2)}, CMat::Zero(3, 2), {CVec::Zero(3)});
  CHECK(sinr(0, zero, CMat::Ones(2, 1), CVec::Ones(3), noise) == 0.0);
  CHECK(wsr(zero, CMat::Ones(2, 1), CVec::Ones(3), noise) == 0.0);

  const std::vector<double> one{1.0};
  const std::vector<double> two{3.0, 1.0};
  CHECK(wsr_from_sinrs(one) == doctest::Approx(1.0));
  CHECK(wsr_from_sinrs(two) == doctest::Approx(1.5));

  CHECK_THROWS_AS(sinr(0, cs, CMat::Ones(2, 1), CVec::Ones(1), noise), Error);
}

TEST_CASE("sinr matches the term-by-term oracle") {
  std::mt19937_64 eng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cs = random_instance(100 + trial, 3, 5, 3);
    const CMat W = random_cmat(eng, 3, 3);
    const CVec theta = reflection(Eigen::VectorXd::Random(5) * kPi);
    for (int k = 0; k < 3; ++k)
      CHECK(sinr(k, cs, W, theta, 0.3) == doctest::Approx(sinr_oracle(k, cs, W, theta, 0.3)).epsilon(1e-10));
  }
}

TEST_CASE("Rayleigh part has unit average power") {
  RfParams rf;
  rf.bs_antennas = 8;
  rf.ris_elements = 1;
  const std::vector<Point2> users{{10, 0}};
  const double amp = amplitude(pathloss_direct(10, rf.carrier_ghz));
  double acc = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const auto cs = sample_channels({0, 0}, std::vector<Obstacle>{}, rf, std::nullopt, users,
                                    {static_cast<std::uint64_t>(i), 0});
    acc += cs.h_bu[0].squaredNorm() / (amp * amp) / rf.bs_antennas;
  }
  CHECK(std::abs(acc / draws - 1.0) < 0.05);
}

TEST_CASE("Rician mean converges to the LOS component") {
  RfParams rf;
  rf.bs_antennas = 4;
  rf.ris_elements = 4;
  const Point2 bs{0, 0};
  const Point2 ris{12, 16};
  const std::vector<Point2> users{{10, 0}};
  const double t1 = rf.rician_t1();
  const CMat expected = amplitude(pathloss_ris_leg(20, rf.carrier_ghz)) * std::sqrt(t1 / (1 + t1)) *
                        steering_vector(4, broadside_angle(ris, bs, 0.0), 0.5) *
                        steering_vector(4, broadside_angle(bs, ris, 0.0), 0.5).adjoint();
  CMat mean = CMat::Zero(4, 4);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i)
    mean += sample_channels(bs, std::vector<Obstacle>{}, rf, ris, users, {0, static_cast<std::uint64_t>(i)}).h_br;
  mean /= draws;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) CHECK(std::abs(mean(r, c) - expected(r, c)) < 0.05 * std::abs(expected(r, c)));
}

TEST_CASE("sinr invariances") {
  std::mt19937_64 eng(99);
  std::uniform_real_distribution<double> ph(-kPi, kPi);
  for (int trial = 0; trial < 30; ++trial) {
    const auto cs = random_instance(500 + trial, 4, 6, 3);
    const CMat W = random_cmat(eng, 4, 3);
    const CVec theta = reflection(Eigen::VectorXd::Random(6) * kPi);

    const CMat rotated = W * std::polar(1.0, ph(eng));
    for (int k = 0; k < 3; ++k)
      CHECK(sinr(k, cs, rotated, theta, 0.2) == doctest::Approx(sinr(k, cs, W, theta, 0.2)).epsilon(1e-12));

    // Reverse the user order in every per-user input.
    std::vector<CVec> h_bu(cs.h_bu.rbegin(), cs.h_bu.rend());
    std::vector<CVec> h_ru(cs.h_ru.rbegin(), cs.h_ru.rend());
    const auto perm = make_channel_set(h_bu, cs.h_br, h_ru);
    const CMat Wp = W.rowwise().reverse();
    CHECK(wsr(perm, Wp, theta, 0.2) == doctest::Approx(wsr(cs, W, theta, 0.2)).epsilon(1e-12));

    // Doubling noise and power together leaves every SINR unchanged.
    for (int k = 0; k < 3; ++k)
      CHECK(sinr(k, cs, std::sqrt(2.0) * W, theta, 0.4) ==
            doctest::Approx(sinr_oracle(k, cs, W, theta, 0.2)).epsilon(1e-12));
  }
}

TEST_CASE("blocked BS-RIS link leaves only the direct path") {
  RfParams rf;
  rf.bs_antennas = 4;
  rf.ris_elements = 8;
  const Point2 bs{0, 0};
  const Point2 ris{0, 20};
  const std::vector<Point2> users{{20, 0}, {14, 14}};
  const std::vector<Obstacle> wall{make_wall({0, 10}, 4, 0)};
  const auto cs = sample_channels(bs, wall, rf, ris, users, {3, 4});
  CHECK(cs.bs_ris_blocked);
  std::mt19937_64 eng(1);
  const CMat W = random_cmat(eng, 4, 2, 0.5);
  const CVec theta = reflection(Eigen::VectorXd::Random(8));
  for (int k = 0; k < 2; ++k) {
    double signal = 0.0;
    double interference = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double g = std::norm(cs.h_bu[k].dot(W.col(i)));
      (i == k ? signal : interference) += g;
    }
    CHECK(sinr(k, cs, W, theta, rf.noise_mw()) ==
          doctest::Approx(signal / (interference + rf.noise_mw())).epsilon(1e-12));
  }
}
