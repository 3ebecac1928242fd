// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "risplace/geom.hpp"

namespace risplace {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

struct RfParams {
  double carrier_ghz = 2.4;
  double bandwidth_hz = 10e6;
  double noise_figure_db = 5.0;
  double pmax_dbm = 0.0;
  double t1_db = 10.0;  // Rician factor of the BS-RIS leg
  double t2_db = 10.0;  // Rician factor of the RIS-user legs
  int bs_antennas = 16;
  int ris_elements = 100;
  double spacing = 0.5;     // element spacing in wavelengths, both arrays
  double array_axis = 0.0;  // radians; both arrays lie along this axis

  double pmax_mw() const { return db_to_linear(pmax_dbm); }
  double rician_t1() const { return db_to_linear(t1_db); }
  double rician_t2() const { return db_to_linear(t2_db); }
  double wavelength_m() const { return 0.299792458 / carrier_ghz; }
  double noise_mw() const;
  double fraunhofer_m() const;
  bool operator==(const RfParams&) const = default;
};

/// UMi path loss of the BS-RIS and RIS-user legs, in dB.
double pathloss_ris_leg(double distance_m, double carrier_ghz);
/// UMi path loss of the direct BS-user link, in dB.
double pathloss_direct(double distance_m, double carrier_ghz);
/// Thermal noise floor -174 dBm/Hz + 10 log10(B) + NF, in dBm.
double noise_power_dbm(double bandwidth_hz, double noise_figure_db);

/// ULA response exp(j 2 pi spacing m sin(angle)), m = 0..n-1.
CVec steering_vector(int n, double angle, double spacing);

struct LinkAngles {
  double ris_arrival{};         // at the RIS, from the BS
  double bs_departure{};        // at the BS, toward the RIS
  std::vector<double> ris_departure;  // at the RIS, toward each user
};

/// Azimuth of the link direction from a -> b, measured from the broadside
/// normal of an array lying along `axis`.
double broadside_angle(Point2 from, Point2 to, double axis);

LinkAngles link_angles(Point2 bs, Point2 ris, std::span<const Point2> users, double axis = 0.0);

/// One realization of every link for K users. `cascade[k]` is
/// diag(conj(h_ru[k])) * h_br, so that the effective downlink row of user k
/// for element coefficients theta is h_bu[k]^H + theta^T cascade[k].
struct ChannelSet {
  std::vector<CVec> h_bu;     // K x (M)
  CMat h_br;                  // N x M
  std::vector<CVec> h_ru;     // K x (N)
  std::vector<CMat> cascade;  // K x (N x M)

  std::vector<double> direct_loss_db;
  double bs_ris_loss_db{};
  std::vector<double> ris_user_loss_db;
  std::vector<bool> direct_blocked;
  bool bs_ris_blocked{true};
  std::vector<bool> ris_user_blocked;

  int users() const { return static_cast<int>(h_bu.size()); }
  int bs_antennas() const { return static_cast<int>(h_br.cols()); }
  int ris_elements() const { return static_cast<int>(h_br.rows()); }
};

/// Seeds of the two independent link families. Direct links depend only on
/// the user draw; the reflected legs depend on the RIS site as well.
struct ChannelSeeds {
  std::uint64_t direct{};
  std::uint64_t reflect{};
};

/// Links shorter than this are evaluated at this distance, keeping the
/// path-loss formulas inside their positive-loss range.
inline constexpr double kMinLinkDistance = 1.0;

/// Draws a ChannelSet. Without a RIS site the reflected links are all zero.
ChannelSet sample_channels(Point2 bs, std::span<const Obstacle> obstacles, const RfParams& rf,
                           std::optional<Point2> ris, std::span<const Point2> users,
                           ChannelSeeds seeds);

/// Per-element reflection coefficients exp(j phase).
CVec reflection(const Eigen::VectorXd& phases);

/// h_bu[k] + cascade[k]^H conj(theta): the conjugate of user k's effective row.
CVec effective_channel(const ChannelSet& cs, int k, const CVec& theta);

double sinr(int k, const ChannelSet& cs, const CMat& W, const CVec& theta, double noise_mw);
std::vector<double> sinrs(const ChannelSet& cs, const CMat& W, const CVec& theta, double noise_mw);

/// Equal-weight sum rate (1/K) sum log2(1 + gamma_k) in bit/s/Hz.
double wsr(const ChannelSet& cs, const CMat& W, const CVec& theta, double noise_mw);
double wsr_from_sinrs(std::span<const double> gammas);

}  // namespace risplace
