// SPDX-License-Identifier: Apache-2.0
#include "risplace/channel.hpp"

#include <numbers>
#include <string>

#include "risplace/error.hpp"
#include "risplace/rng.hpp"

namespace risplace {

namespace {

void require_positive_distance(double d) {
  if (!(d > 0) || !std::isfinite(d))
    throw Error(ErrorCode::NonPositiveDistance, "path loss needs a positive distance, got " + std::to_string(d));
}

// Circularly-symmetric complex Gaussian with unit variance.
CVec cscg(Engine& eng, int n) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  CVec v(n);
  for (int i = 0; i < n; ++i) {
    const double re = nd(eng);
    const double im = nd(eng);
    v[i] = {re, im};
  }
  return v;
}

CMat cscg(Engine& eng, int rows, int cols) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  CMat m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) {
      const double re = nd(eng);
      const double im = nd(eng);
      m(r, c) = {re, im};
    }
  return m;
}

double amplitude(double loss_db) { return std::sqrt(db_to_linear(-loss_db)); }

void check_dims(const ChannelSet& cs, const CMat& W, const CVec& theta) {
  if (W.rows() != cs.bs_antennas() || W.cols() != cs.users() || theta.size() != cs.ris_elements())
    throw Error(ErrorCode::DimensionMismatch,
                "beamformer must be M x K and theta of length N for this channel set");
}

}  // namespace

double RfParams::noise_mw() const {
  return db_to_linear(noise_power_dbm(bandwidth_hz, noise_figure_db));
}

double RfParams::fraunhofer_m() const {
  const double lambda = wavelength_m();
  return fraunhofer_distance(bs_antennas, lambda, spacing * lambda);
}

double pathloss_ris_leg(double distance_m, double carrier_ghz) {
  require_positive_distance(distance_m);
  return 22.0 * std::log10(distance_m) + 28.0 + 20.0 * std::log10(carrier_ghz);
}

double pathloss_direct(double distance_m, double carrier_ghz) {
  require_positive_distance(distance_m);
  return 36.7 * std::log10(distance_m) + 22.7 + 26.0 * std::log10(carrier_ghz);
}

double noise_power_dbm(double bandwidth_hz, double noise_figure_db) {
  if (!(bandwidth_hz > 0)) throw Error(ErrorCode::ValidationError, "bandwidth must be positive", "bandwidth_hz");
  return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

CVec steering_vector(int n, double angle, double spacing) {
  CVec a(n);
  const double step = 2.0 * std::numbers::pi * spacing * std::sin(angle);
  for (int m = 0; m < n; ++m) a[m] = std::polar(1.0, step * m);
  return a;
}

double broadside_angle(Point2 from, Point2 to, double axis) {
  const Point2 d = to - from;
  if (d.x == 0.0 && d.y == 0.0)
    throw Error(ErrorCode::CoincidentPoints, "link endpoints coincide");
  const Point2 along{std::cos(axis), std::sin(axis)};
  const Point2 normal{-along.y, along.x};
  return std::atan2(dot(d, along), dot(d, normal));
}

LinkAngles link_angles(Point2 bs, Point2 ris, std::span<const Point2> users, double axis) {
  LinkAngles out;
  out.bs_departure = broadside_angle(bs, ris, axis);
  out.ris_arrival = broadside_angle(ris, bs, axis);
  out.ris_departure.reserve(users.size());
  for (const Point2& u : users) out.ris_departure.push_back(broadside_angle(ris, u, axis));
  return out;
}

ChannelSet sample_channels(Point2 bs, std::span<const Obstacle> obstacles, const RfParams& rf,
                           std::optional<Point2> ris, std::span<const Point2> users,
                           ChannelSeeds seeds) {
  const int K = static_cast<int>(users.size());
  const int M = rf.bs_antennas;
  const int N = rf.ris_elements;
  ChannelSet cs;
  cs.h_bu.reserve(K);
  cs.h_ru.reserve(K);
  cs.cascade.reserve(K);

  for (int k = 0; k < K; ++k) {
    const double d = std::max(distance(bs, users[k]), kMinLinkDistance);
    const double loss = pathloss_direct(d, rf.carrier_ghz);
    const bool blocked = segment_blocked(bs, users[k], obstacles);
    Engine eng = make_engine(seeds.direct, Stream::DirectLink, {static_cast<std::uint64_t>(k)});
    CVec h = amplitude(loss) * cscg(eng, M);
    if (blocked) h.setZero();
    cs.h_bu.push_back(std::move(h));
    cs.direct_loss_db.push_back(loss);
    cs.direct_blocked.push_back(blocked);
  }

  cs.h_br = CMat::Zero(N, M);
  if (!ris) {
    cs.bs_ris_loss_db = 0.0;
    cs.bs_ris_blocked = true;
    for (int k = 0; k < K; ++k) {
      cs.h_ru.push_back(CVec::Zero(N));
      cs.cascade.push_back(CMat::Zero(N, M));
      cs.ris_user_loss_db.push_back(0.0);
      cs.ris_user_blocked.push_back(true);
    }
    return cs;
  }

  const Point2 site = *ris;
  const double t1_los = std::sqrt(rf.rician_t1() / (1.0 + rf.rician_t1()));
  const double t1_nlos = std::sqrt(1.0 / (1.0 + rf.rician_t1()));
  const double t2_los = std::sqrt(rf.rician_t2() / (1.0 + rf.rician_t2()));
  const double t2_nlos = std::sqrt(1.0 / (1.0 + rf.rician_t2()));

  {
    const double d = std::max(distance(bs, site), kMinLinkDistance);
    cs.bs_ris_loss_db = pathloss_ris_leg(d, rf.carrier_ghz);
    cs.bs_ris_blocked = segment_blocked(bs, site, obstacles);
    const double arrive = broadside_angle(site, bs, rf.array_axis);
    const double depart = broadside_angle(bs, site, rf.array_axis);
    const CMat los = steering_vector(N, arrive, rf.spacing) * steering_vector(M, depart, rf.spacing).adjoint();
    Engine eng = make_engine(seeds.reflect, Stream::BsRisLink);
    cs.h_br = amplitude(cs.bs_ris_loss_db) * (t1_los * los + t1_nlos * cscg(eng, N, M));
    if (cs.bs_ris_blocked) cs.h_br.setZero();
  }

  for (int k = 0; k < K; ++k) {
    const double d = std::max(distance(site, users[k]), kMinLinkDistance);
    const double loss = pathloss_ris_leg(d, rf.carrier_ghz);
    const bool blocked = site == users[k] ? false : segment_blocked(site, users[k], obstacles);
    const double depart = site == users[k] ? 0.0 : broadside_angle(site, users[k], rf.array_axis);
    Engine eng = make_engine(seeds.reflect, Stream::RisUserLink, {static_cast<std::uint64_t>(k)});
    CVec h = amplitude(loss) * (t2_los * steering_vector(N, depart, rf.spacing) + t2_nlos * cscg(eng, N));
    if (blocked) h.setZero();
    cs.cascade.push_back(h.conjugate().asDiagonal() * cs.h_br);
    cs.h_ru.push_back(std::move(h));
    cs.ris_user_loss_db.push_back(loss);
    cs.ris_user_blocked.push_back(blocked);
  }
  return cs;
}

CVec reflection(const Eigen::VectorXd& phases) {
  CVec t(phases.size());
  for (Eigen::Index n = 0; n < phases.size(); ++n) t[n] = std::polar(1.0, phases[n]);
  return t;
}

CVec effective_channel(const ChannelSet& cs, int k, const CVec& theta) {
  return cs.h_bu[k] + cs.cascade[k].adjoint() * theta.conjugate();
}

double sinr(int k, const ChannelSet& cs, const CMat& W, const CVec& theta, double noise_mw) {
  check_dims(cs, W, theta);
  if (k < 0 || k >= cs.users()) throw Error(ErrorCode::DimensionMismatch, "user index out of range");
  const CVec hk = effective_channel(cs, k, theta);
  const Eigen::RowVectorXcd z = hk.adjoint() * W;
  double interference = 0.0;
  for (int i = 0; i < cs.users(); ++i)
    if (i != k) interference += std::norm(z[i]);
  return std::norm(z[k]) / (interference + noise_mw);
}

std::vector<double> sinrs(const ChannelSet& cs, const CMat& W, const CVec& theta, double noise_mw) {
  std::vector<double> out;
  out.reserve(cs.users());
  for (int k = 0; k < cs.users(); ++k) out.push_back(sinr(k, cs, W, theta, noise_mw));
  return out;
}

double wsr_from_sinrs(std::span<const double> gammas) {
  if (gammas.empty()) return 0.0;
  double acc = 0.0;
  for (double g : gammas) acc += std::log2(1.0 + g);
  return acc / static_cast<double>(gammas.size());
}

double wsr(const ChannelSet& cs, const CMat& W, const CVec& theta, double noise_mw) {
  const auto g = sinrs(cs, W, theta, noise_mw);
  return wsr_from_sinrs(g);
}

}  // namespace risplace
