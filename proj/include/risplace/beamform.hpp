// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "risplace/channel.hpp"

namespace risplace {

enum class Extrapolation { None, Nesterov, Fixed };

struct SolverConfig {
  int max_iters = 500;
  double rel_tol = 1e-4;
  Extrapolation extrapolation = Extrapolation::Nesterov;
  double fixed_epsilon = 0.0;    // used with Extrapolation::Fixed
  std::optional<double> kappa0;  // unset: start from the W-step Lipschitz constant
  double backtrack_factor = 2.0;
  bool operator==(const SolverConfig&) const = default;
};

/// Iterate of the joint beamforming solver.
///
/// The RIS is stored as phases; the per-element coefficient of element n is
/// exp(j phases[n]), so unit modulus holds by construction. `alpha`, `beta`,
/// `zeta` and `mu` are the auxiliaries of the fractional-programming
/// surrogate, one entry per user.
struct FpState {
  CMat W;
  CMat W_prev;
  Eigen::VectorXd phases;
  Eigen::VectorXd alpha;
  CVec beta;
  Eigen::VectorXd zeta;
  Eigen::VectorXd mu;

  int iteration = 0;
  std::vector<double> objective_history;  // surrogate after each iteration, bits
  std::vector<double> wsr_history;        // bit/s/Hz after each iteration

  double eta = 1.0;        // Nesterov sequence
  double kappa = 0.0;      // last accepted phase-step curvature
  double lipschitz = 0.0;  // last W-step Lipschitz constant
  int w_restarts = 0;      // extrapolated W steps rejected for losing ascent

  CVec theta() const { return reflection(phases); }
};

/// Matched filter to the phase-zero effective channels with equal power
/// split; users without any channel get a zero column.
FpState initial_state(const ChannelSet& cs, double pmax_mw);

/// Surrogate objective in bits (the natural-log surrogate divided by ln 2).
/// Equals the weighted sum rate when alpha and beta are jointly optimal.
double surrogate_f(const FpState& s, const ChannelSet& cs, double noise_mw);

/// Closed-form alpha from zeta_k = sqrt(K) Re{conj(beta_k) z_kk}.
void update_alpha(FpState& s, const ChannelSet& cs);
/// Closed-form beta with mu_k = sqrt((1 + alpha_k) / K).
void update_beta(FpState& s, const ChannelSet& cs, double noise_mw);
/// Jointly optimal (alpha, beta): the common fixed point of the two rules
/// above, where alpha_k equals the SINR of user k.
void update_auxiliaries(FpState& s, const ChannelSet& cs, double noise_mw);

/// Ascent direction of the surrogate with respect to W (bits). A small
/// change dW moves the surrogate by Re tr(G^H dW).
CMat w_gradient(const FpState& s, const ChannelSet& cs);
/// Gradient of the surrogate with respect to the RIS phases (bits).
Eigen::VectorXd phase_gradient(const FpState& s, const ChannelSet& cs);
/// Lipschitz constant of the W-gradient of the natural-log surrogate.
double w_lipschitz(const FpState& s, const ChannelSet& cs);

/// Extrapolated projected-gradient step on W followed by projection onto
/// the total power ball.
void update_w(FpState& s, const ChannelSet& cs, double pmax_mw, const SolverConfig& cfg);
/// Backtracked gradient-ascent step on the phases.
void update_theta(FpState& s, const ChannelSet& cs, const SolverConfig& cfg, double noise_mw);

FpState solve(const ChannelSet& cs, double pmax_mw, double noise_mw, const SolverConfig& cfg);
FpState solve(const ChannelSet& cs, const RfParams& rf, const SolverConfig& cfg);

/// Smallest per-user SINR; +infinity without users.
double min_sinr(const ChannelSet& cs, const FpState& s, double noise_mw);

}  // namespace risplace
