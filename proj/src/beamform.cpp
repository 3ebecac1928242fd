// SPDX-License-Identifier: Apache-2.0
#include "risplace/beamform.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "risplace/error.hpp"

namespace risplace {

namespace {

constexpr double kLn2 = std::numbers::ln2;

// Columns are the effective channels h_bu[k] + cascade[k]^H conj(theta).
CMat effective_channels(const ChannelSet& cs, const CVec& theta) {
  const int K = cs.users();
  CMat H(cs.bs_antennas(), K);
  const CVec tc = theta.conjugate();
  for (int k = 0; k < K; ++k) H.col(k) = cs.h_bu[k] + cs.cascade[k].adjoint() * tc;
  return H;
}

double weight_of(const FpState& s, int k, int K) { return std::sqrt((1.0 + s.alpha[k]) / K); }

// Natural-log surrogate given the cross-gain matrix Z(k, i) = hbar_k^H w_i.
double surrogate_nats(const FpState& s, const CMat& Z, double noise_mw) {
  const int K = static_cast<int>(Z.rows());
  double f = 0.0;
  for (int k = 0; k < K; ++k) {
    const double a = s.alpha[k];
    const cplx b = s.beta[k];
    f += (std::log1p(a) - a) / K;
    f += 2.0 * weight_of(s, k, K) * std::real(std::conj(b) * Z(k, k));
    f -= std::norm(b) * (Z.row(k).squaredNorm() + noise_mw);
  }
  return f;
}

// sum_k |beta_k|^2 hbar_k hbar_k^H
CMat beta_weighted_gram(const FpState& s, const CMat& Hbar) {
  Eigen::VectorXd w2 = s.beta.cwiseAbs2();
  return Hbar * w2.asDiagonal() * Hbar.adjoint();
}

CMat w_gradient_nats(const FpState& s, const CMat& Hbar, const CMat& W) {
  const int K = static_cast<int>(Hbar.cols());
  const CMat A = beta_weighted_gram(s, Hbar);
  CMat G = -2.0 * (A * W);
  for (int k = 0; k < K; ++k) G.col(k) += 2.0 * weight_of(s, k, K) * s.beta[k] * Hbar.col(k);
  return G;
}

double largest_eigenvalue(const CMat& A) {
  if (A.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(A, Eigen::EigenvaluesOnly);
  return std::max(es.eigenvalues().maxCoeff(), 0.0);
}

void project_power(CMat& W, double pmax_mw) {
  const double p = W.squaredNorm();
  if (p > pmax_mw && p > 0.0) W *= std::sqrt(pmax_mw / p);
}

double phase_objective(const FpState& s, const ChannelSet& cs, const Eigen::VectorXd& phases,
                       double noise_mw) {
  const CMat Hbar = effective_channels(cs, reflection(phases));
  return surrogate_nats(s, Hbar.adjoint() * s.W, noise_mw);
}

Eigen::VectorXd phase_gradient_nats(const FpState& s, const ChannelSet& cs) {
  const int K = cs.users();
  const int N = cs.ris_elements();
  const CVec theta = s.theta();
  const CMat Z = effective_channels(cs, theta).adjoint() * s.W;
  CVec V = CVec::Zero(N);
  for (int k = 0; k < K; ++k) {
    const double b2 = std::norm(s.beta[k]);
    const CVec u = weight_of(s, k, K) * std::conj(s.beta[k]) * s.W.col(k) -
                   b2 * (s.W * Z.row(k).conjugate().transpose());
    V += cs.cascade[k] * u;
  }
  Eigen::VectorXd g(N);
  for (int n = 0; n < N; ++n) g[n] = -2.0 * std::imag(theta[n] * V[n]);
  return g;
}

}  // namespace

FpState initial_state(const ChannelSet& cs, double pmax_mw) {
  const int K = cs.users();
  const int M = cs.bs_antennas();
  const int N = cs.ris_elements();
  FpState s;
  s.phases = Eigen::VectorXd::Zero(N);
  s.alpha = Eigen::VectorXd::Zero(K);
  s.beta = CVec::Zero(K);
  s.zeta = Eigen::VectorXd::Zero(K);
  s.mu = Eigen::VectorXd::Zero(K);
  s.W = CMat::Zero(M, K);
  const CMat Hbar = effective_channels(cs, s.theta());
  for (int k = 0; k < K; ++k) {
    const double n = Hbar.col(k).norm();
    if (n > 0.0) s.W.col(k) = std::sqrt(pmax_mw / K) * Hbar.col(k) / n;
  }
  s.W_prev = s.W;
  return s;
}

double surrogate_f(const FpState& s, const ChannelSet& cs, double noise_mw) {
  if (s.W.rows() != cs.bs_antennas() || s.W.cols() != cs.users() ||
      s.phases.size() != cs.ris_elements() || s.alpha.size() != cs.users() ||
      s.beta.size() != cs.users())
    throw Error(ErrorCode::DimensionMismatch, "solver state does not match the channel set");
  const CMat Z = effective_channels(cs, s.theta()).adjoint() * s.W;
  return surrogate_nats(s, Z, noise_mw) / kLn2;
}

void update_alpha(FpState& s, const ChannelSet& cs) {
  const int K = cs.users();
  const CMat Hbar = effective_channels(cs, s.theta());
  s.zeta.resize(K);
  s.alpha.resize(K);
  for (int k = 0; k < K; ++k) {
    const cplx zkk = Hbar.col(k).dot(s.W.col(k));  // hbar^H w
    const double zeta = std::sqrt(static_cast<double>(K)) * std::real(std::conj(s.beta[k]) * zkk);
    s.zeta[k] = zeta;
    const double root = std::sqrt(zeta * zeta + 4.0);
    // Rationalized form for negative zeta avoids cancellation.
    s.alpha[k] = zeta >= 0.0 ? 0.5 * zeta * (zeta + root) : 2.0 * zeta / (root - zeta);
  }
}

void update_beta(FpState& s, const ChannelSet& cs, double noise_mw) {
  const int K = cs.users();
  const CMat Z = effective_channels(cs, s.theta()).adjoint() * s.W;
  s.mu.resize(K);
  s.beta.resize(K);
  for (int k = 0; k < K; ++k) {
    s.mu[k] = weight_of(s, k, K);
    s.beta[k] = s.mu[k] * Z(k, k) / (Z.row(k).squaredNorm() + noise_mw);
  }
}

void update_auxiliaries(FpState& s, const ChannelSet& cs, double noise_mw) {
  const int K = cs.users();
  const CMat Z = effective_channels(cs, s.theta()).adjoint() * s.W;
  s.alpha.resize(K);
  s.zeta.resize(K);
  for (int k = 0; k < K; ++k) {
    const double signal = std::norm(Z(k, k));
    const double rest = Z.row(k).squaredNorm() - signal;
    s.alpha[k] = signal / (std::max(rest, 0.0) + noise_mw);
  }
  update_beta(s, cs, noise_mw);
  for (int k = 0; k < K; ++k)
    s.zeta[k] = std::sqrt(static_cast<double>(K)) * std::real(std::conj(s.beta[k]) * Z(k, k));
}

CMat w_gradient(const FpState& s, const ChannelSet& cs) {
  const CMat Hbar = effective_channels(cs, s.theta());
  return w_gradient_nats(s, Hbar, s.W) / kLn2;
}

Eigen::VectorXd phase_gradient(const FpState& s, const ChannelSet& cs) {
  return phase_gradient_nats(s, cs) / kLn2;
}

double w_lipschitz(const FpState& s, const ChannelSet& cs) {
  const CMat Hbar = effective_channels(cs, s.theta());
  return 2.0 * largest_eigenvalue(beta_weighted_gram(s, Hbar));
}

void update_w(FpState& s, const ChannelSet& cs, double pmax_mw, const SolverConfig& cfg) {
  const CMat Hbar = effective_channels(cs, s.theta());
  const double L = 2.0 * largest_eigenvalue(beta_weighted_gram(s, Hbar));
  s.lipschitz = L;
  if (!(L > 0.0)) {
    // All beta vanish: the surrogate no longer depends on W.
    s.W_prev = s.W;
    return;
  }
  auto f1 = [&](const CMat& W) { return surrogate_nats(s, Hbar.adjoint() * W, 0.0); };

  double eps = 0.0;
  double next_eta = s.eta;
  switch (cfg.extrapolation) {
    case Extrapolation::None: break;
    case Extrapolation::Fixed: eps = cfg.fixed_epsilon; break;
    case Extrapolation::Nesterov:
      next_eta = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * s.eta * s.eta));
      eps = (s.eta - 1.0) / next_eta;
      break;
  }

  const double base = f1(s.W);
  CMat candidate;
  bool accepted = false;
  if (eps > 0.0) {
    const CMat W_hat = s.W + eps * (s.W - s.W_prev);
    candidate = W_hat + w_gradient_nats(s, Hbar, W_hat) / L;
    project_power(candidate, pmax_mw);
    accepted = f1(candidate) >= base;
    if (!accepted) ++s.w_restarts;
  }
  if (accepted) {
    s.eta = next_eta;
  } else {
    candidate = s.W + w_gradient_nats(s, Hbar, s.W) / L;
    project_power(candidate, pmax_mw);
    // A plain step opens (or restarts) the momentum sequence.
    s.eta = eps > 0.0 ? 1.0 : next_eta;
    if (f1(candidate) < base) candidate = s.W;
  }
  s.W_prev = s.W;
  s.W = std::move(candidate);
}

void update_theta(FpState& s, const ChannelSet& cs, const SolverConfig& cfg, double noise_mw) {
  if (cs.ris_elements() == 0) return;
  const Eigen::VectorXd g = phase_gradient_nats(s, cs);
  if (!(g.squaredNorm() > 0.0)) return;

  double kappa = s.kappa > 0.0 ? s.kappa / cfg.backtrack_factor
                               : cfg.kappa0.value_or(s.lipschitz > 0.0 ? s.lipschitz : 1.0);
  const double base = phase_objective(s, cs, s.phases, noise_mw);
  constexpr int kMaxBacktracks = 80;
  constexpr int kMaxExpansions = 40;
  auto accept = [&](Eigen::VectorXd trial, double k) {
    for (Eigen::Index n = 0; n < trial.size(); ++n) trial[n] = std::remainder(trial[n], 2.0 * std::numbers::pi);
    s.phases = std::move(trial);
    s.kappa = k;
  };
  for (int i = 0; i < kMaxBacktracks; ++i) {
    Eigen::VectorXd trial = s.phases + g / kappa;
    double value = phase_objective(s, cs, trial, noise_mw);
    if (value < base) {
      kappa *= cfg.backtrack_factor;
      continue;
    }
    if (i == 0) {
      // The first trial already ascends: lengthen the step while the surrogate keeps rising.
      for (int e = 0; e < kMaxExpansions; ++e) {
        const double longer = kappa / cfg.backtrack_factor;
        Eigen::VectorXd next = s.phases + g / longer;
        const double v = phase_objective(s, cs, next, noise_mw);
        if (!(v > value)) break;
        kappa = longer;
        trial = std::move(next);
        value = v;
      }
    }
    accept(std::move(trial), kappa);
    return;
  }
}

FpState solve(const ChannelSet& cs, double pmax_mw, double noise_mw, const SolverConfig& cfg) {
  FpState s = initial_state(cs, pmax_mw);
  double previous = wsr(cs, s.W, s.theta(), noise_mw);
  for (int t = 1; t <= cfg.max_iters; ++t) {
    update_auxiliaries(s, cs, noise_mw);
    update_w(s, cs, pmax_mw, cfg);
    update_theta(s, cs, cfg, noise_mw);

    const double f = surrogate_f(s, cs, noise_mw);
    const double rate = wsr(cs, s.W, s.theta(), noise_mw);
    if (!std::isfinite(f) || !std::isfinite(rate))
      throw Error(ErrorCode::NonFiniteObjective, "beamforming objective became non-finite at iteration " + std::to_string(t));
    s.objective_history.push_back(f);
    s.wsr_history.push_back(rate);
    s.iteration = t;
    if (std::abs(rate - previous) <= cfg.rel_tol * std::abs(previous)) break;
    previous = rate;
  }
  return s;
}

FpState solve(const ChannelSet& cs, const RfParams& rf, const SolverConfig& cfg) {
  return solve(cs, rf.pmax_mw(), rf.noise_mw(), cfg);
}

double min_sinr(const ChannelSet& cs, const FpState& s, double noise_mw) {
  double m = std::numeric_limits<double>::infinity();
  for (double g : sinrs(cs, s.W, s.theta(), noise_mw)) m = std::min(m, g);
  return m;
}

}  // namespace risplace
