// SPDX-License-Identifier: Apache-2.0
// Shared fixtures for the unit and acceptance suites.
#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "risplace/beamform.hpp"
#include "risplace/channel.hpp"
#include "risplace/geom.hpp"

namespace risplace::testing {

inline ChannelSet make_channel_set(const std::vector<CVec>& h_bu, const CMat& h_br, const std::vector<CVec>& h_ru) {
  ChannelSet cs;
  cs.h_bu = h_bu;
  cs.h_br = h_br;
  cs.h_ru = h_ru;
  for (const auto& r : h_ru) cs.cascade.push_back(r.conjugate().asDiagonal() * h_br);
  const std::size_t K = h_bu.size();
  cs.direct_loss_db.assign(K, 0.0);
  cs.ris_user_loss_db.assign(K, 0.0);
  cs.direct_blocked.assign(K, false);
  cs.ris_user_blocked.assign(K, false);
  cs.bs_ris_blocked = false;
  return cs;
}

inline CVec random_cvec(std::mt19937_64& eng, int n, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale * std::sqrt(0.5));
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = {nd(eng), nd(eng)};
  return v;
}

inline CMat random_cmat(std::mt19937_64& eng, int rows, int cols, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale * std::sqrt(0.5));
  CMat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = {nd(eng), nd(eng)};
  return m;
}

/// Unit-variance Rayleigh channels with M antennas, N elements, K users.
inline ChannelSet random_instance(std::uint64_t seed, int M, int N, int K) {
  std::mt19937_64 eng(seed);
  std::vector<CVec> h_bu;
  std::vector<CVec> h_ru;
  for (int k = 0; k < K; ++k) h_bu.push_back(random_cvec(eng, M));
  const CMat h_br = random_cmat(eng, N, M);
  for (int k = 0; k < K; ++k) h_ru.push_back(random_cvec(eng, N));
  return make_channel_set(h_bu, h_br, h_ru);
}

/// A solver state with every block populated at random.
inline FpState random_state(std::mt19937_64& eng, const ChannelSet& cs, double pmax) {
  const int K = cs.users();
  FpState s = initial_state(cs, pmax);
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> pos(0.1, 2.0);
  for (int n = 0; n < cs.ris_elements(); ++n) s.phases[n] = u(eng);
  s.W = random_cmat(eng, cs.bs_antennas(), K);
  s.W *= std::sqrt(pmax) / s.W.norm();
  for (int k = 0; k < K; ++k) {
    s.alpha[k] = pos(eng);
    s.beta[k] = std::polar(pos(eng), u(eng));
  }
  return s;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
}

}  // namespace risplace::testing
