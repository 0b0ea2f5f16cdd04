#pragma once

// Belief-propagation (Bethe) recursion on the d-regular tree: the map on the
// spin simplex, its log-likelihood form for Potts, fixed-point solving, and
// the Jacobian.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "bethe/error.hpp"
#include "bethe/functional.hpp"
#include "bethe/spec.hpp"

namespace bethe {

enum class Verdict { Yes, No, Marginal };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Marginal: return "marginal";
  }
  return "?";
}

struct FixedPointReport {
  SimplexMeasure h;
  double residual = kInf;
  bool converged = false;
  long iterations = 0;
  double z_h = 0.0;   // BP normalizer at h
  double bz_h = 0.0;  // <psi>_{h x h}
  double phi_vx = 0.0;
  double phi_e = 0.0;
  double phi = 0.0;
  std::optional<std::string> ltype;  // e.g. "2-"; empty means generic
  std::optional<Verdict> localmax_hessian;
  std::optional<Verdict> localmax_rho;
  std::optional<Verdict> stable;
  std::optional<double> jac_spectral_radius;
};

struct BpImage {
  SimplexMeasure h;
  double z = 0.0;  // sum_s psibar(s) (psi h)(s)^{d-1}
};

inline void check_degree(int d) {
  if (d < 3) fail(ErrorCode::InvalidArgument, "degree must be >= 3");
}

/// (BP h)(s) ∝ psibar(s) (sum_t psi(s,t) h(t))^{d-1}.
inline BpImage bp_map(const FactorSpec& spec, int d, const SimplexMeasure& h) {
  check_degree(d);
  if (h.size() != spec.q) fail(ErrorCode::DimensionMismatch, "measure size != q");
  const auto ph = detail::psi_apply(spec, h);
  std::vector<double> logn(spec.q);
  for (int s = 0; s < spec.q; ++s) {
    logn[s] = spec.xibar(s) + (ph[s] > 0.0 ? (d - 1) * std::log(ph[s]) : -kInf);
  }
  const double logz = detail::log_sum_exp(logn);
  if (logz == -kInf) fail(ErrorCode::ZeroMass, "BP image has zero mass");
  std::vector<double> out(spec.q);
  for (int s = 0; s < spec.q; ++s) out[s] = std::exp(logn[s] - logz);
  return {SimplexMeasure::from_weights(std::move(out)), std::exp(logz)};
}

/// Relative violation of psibar(s)/h(s) (psi h)(s)^{d-1} = z, with z the
/// geometric mean of the left-hand sides. Zero exactly at fixed points.
inline double bp_residual(const FactorSpec& spec, int d, const SimplexMeasure& h) {
  check_degree(d);
  if (!h.interior()) fail(ErrorCode::BoundaryPoint, "residual needs interior h");
  const auto ph = detail::psi_apply(spec, h);
  std::vector<double> loglhs(spec.q);
  double mean = 0.0;
  for (int s = 0; s < spec.q; ++s) {
    loglhs[s] = spec.xibar(s) - std::log(h[s]) + (d - 1) * std::log(ph[s]);
    mean += loglhs[s];
  }
  mean /= spec.q;
  double res = 0.0;
  for (int s = 0; s < spec.q; ++s) {
    res = std::max(res, std::abs(std::expm1(loglhs[s] - mean)));
  }
  return res;
}

/// Potts BP on biased measures in the log-likelihood coordinate
/// r = log(h1/h2): r -> B + (d-1) log((e^{beta+r}+q-1)/(e^r+e^beta+q-2)).
inline double bp_loglik(const PottsParams& params, int d, double r) {
  const double q = params.q;
  const double eb = std::exp(params.beta);
  // log of the ratio as log1p of (numerator - denominator)/denominator, so that
  // r = 0 maps to exactly 0.
  const double em1 = std::expm1(params.beta);
  double ratio_log;
  if (r == kInf) {
    ratio_log = params.beta;
  } else if (r > 0.0) {
    const double er = std::exp(-r);
    ratio_log = std::log1p(em1 * -std::expm1(-r) / (1.0 + (eb + q - 2) * er));
  } else {
    const double er = std::exp(r);
    ratio_log = std::log1p(em1 * std::expm1(r) / (er + eb + q - 2));
  }
  return params.B + (d - 1) * ratio_log;
}

struct SolveOptions {
  double tol = 1e-12;
  long max_iter = 100000;
  double damping = 1.0;  // weight of the new iterate, in (0,1]
};

/// Fixed-point iteration of bp_map until the residual drops to tol. A run that
/// exhausts max_iter is returned with converged = false and its last iterate.
inline FixedPointReport solve_bp(const FactorSpec& spec, int d,
                                 const SimplexMeasure& init,
                                 const SolveOptions& opts = {}) {
  check_degree(d);
  if (!(opts.tol > 0.0)) fail(ErrorCode::InvalidArgument, "tol must be > 0");
  if (!(opts.damping > 0.0 && opts.damping <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "damping must lie in (0,1]");
  }
  FixedPointReport rep;
  SimplexMeasure h = init;
  for (long it = 1; it <= opts.max_iter; ++it) {
    auto img = bp_map(spec, d, h);
    if (opts.damping < 1.0) {
      std::vector<double> mix(spec.q);
      for (int s = 0; s < spec.q; ++s) {
        mix[s] = (1.0 - opts.damping) * h[s] + opts.damping * img.h[s];
      }
      h = SimplexMeasure::from_weights(std::move(mix));
    } else {
      h = std::move(img.h);
    }
    rep.iterations = it;
    rep.residual = h.interior() ? bp_residual(spec, d, h) : kInf;
    if (rep.residual <= opts.tol) {
      rep.converged = true;
      break;
    }
  }
  rep.h = h;
  rep.z_h = bp_map(spec, d, h).z;
  rep.bz_h = pair_normalizer(spec, h);
  const auto parts = phi(spec, d, h);
  rep.phi_vx = parts.vx;
  rep.phi_e = parts.e;
  rep.phi = parts.total;
  return rep;
}

struct ExtremalPair {
  double r_free = 0.0;
  double r_max = 0.0;
  double b_free = 0.0;
  double b_max = 0.0;
  SimplexMeasure h_free;
  SimplexMeasure h_max;
  long iterations_free = 0;
  long iterations_max = 0;
  double residual_free = 0.0;  // |bp_loglik(r) - r| at the returned point
  double residual_max = 0.0;
  bool converged = false;
  bool monotone = true;  // every consecutive pair of iterates moved the right way
};

namespace detail {

struct LoglikRun {
  double r = 0.0;
  long iterations = 0;
  double residual = 0.0;
  bool converged = false;
  bool monotone = true;
};

// Iterates bp_loglik from r0. When the plain iteration stalls (critical
// slowing down), the fixed point it is heading to is the first root of
// bp_loglik(r) - r in the direction of travel, found by bracketing.
inline LoglikRun iterate_loglik(const PottsParams& params, int d, double r0,
                                bool increasing, double tol, long max_iter) {
  LoglikRun run;
  double r = r0;
  double prev = r0;
  for (long it = 1; it <= max_iter; ++it) {
    const double next = bp_loglik(params, d, r);
    const double slack = 1e-12 * std::max(1.0, std::abs(r));
    if (increasing ? next < r - slack : next > r + slack) run.monotone = false;
    prev = r;
    r = next;
    run.iterations = it;
    run.residual = std::abs(bp_loglik(params, d, r) - r);
    if (run.residual <= tol) {
      run.r = r;
      run.converged = true;
      return run;
    }
  }
  auto g = [&](double x) { return bp_loglik(params, d, x) - x; };
  const double dir = increasing ? 1.0 : -1.0;
  double lo = r;
  double step = std::max(std::abs(r - prev), 1e-14);
  double hi = r + dir * step;
  for (int k = 0; k < 200 && dir * g(hi) > 0.0; ++k) {
    lo = hi;
    step *= 2.0;
    hi = r + dir * step;
  }
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (dir * g(mid) > 0.0) lo = mid; else hi = mid;
  }
  r = std::abs(g(lo)) < std::abs(g(hi)) ? lo : hi;
  run.r = r;
  run.residual = std::abs(g(r));
  run.converged = run.residual <= tol;
  return run;
}

}  // namespace detail

/// The minimal (from the uniform start, b = 0) and maximal (from the point
/// mass on spin 1, b = 1) biased fixed points, computed in the r coordinate.
inline ExtremalPair bp_extremal(const PottsParams& params, int d, double tol = 1e-12,
                                long max_iter = 100000) {
  check_potts(params);
  check_degree(d);
  ExtremalPair out;
  const auto lo = detail::iterate_loglik(params, d, 0.0, true, tol, max_iter);
  const auto hi = detail::iterate_loglik(params, d, kInf, false, tol, max_iter);
  out.r_free = lo.r;
  out.r_max = hi.r;
  out.iterations_free = lo.iterations;
  out.iterations_max = hi.iterations;
  out.residual_free = lo.residual;
  out.residual_max = hi.residual;
  out.converged = lo.converged && hi.converged;
  out.monotone = lo.monotone && hi.monotone;
  out.b_free = loglik_to_bias(out.r_free, params.q);
  out.b_max = loglik_to_bias(out.r_max, params.q);
  out.h_free = biased_from_loglik(out.r_free, params.q);
  out.h_max = biased_from_loglik(out.r_max, params.q);
  return out;
}

struct JacobianResult {
  Eigen::MatrixXd jacobian;                          // q x q, acts on R^q
  std::vector<std::complex<double>> eigenvalues;     // on the zero-sum subspace
  double spectral_radius = 0.0;
};

namespace detail {

// Orthonormal basis (q x (q-1)) of {x : sum x = 0}.
inline Eigen::MatrixXd zero_sum_basis(int q) {
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(q, 1);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(ones);
  Eigen::MatrixXd full = qr.householderQ() * Eigen::MatrixXd::Identity(q, q);
  return full.rightCols(q - 1);
}

}  // namespace detail

/// Analytic differential of bp_map at h (chain rule through the normalizer)
/// and its spectrum restricted to zero-sum perturbations.
inline JacobianResult bp_jacobian(const FactorSpec& spec, int d, const SimplexMeasure& h) {
  check_degree(d);
  if (!h.interior()) fail(ErrorCode::BoundaryPoint, "Jacobian needs interior h");
  const int q = spec.q;
  const auto ph = detail::psi_apply(spec, h);
  const auto img = bp_map(spec, d, h);
  // column u: sum_r BP_r psi(r,u)/(psi h)(r)
  std::vector<double> col(q, 0.0);
  for (int u = 0; u < q; ++u) {
    for (int r = 0; r < q; ++r) col[u] += img.h[r] * spec.weight(r, u) / ph[r];
  }
  JacobianResult out;
  out.jacobian.resize(q, q);
  for (int s = 0; s < q; ++s) {
    for (int u = 0; u < q; ++u) {
      out.jacobian(s, u) =
          (d - 1) * img.h[s] * (spec.weight(s, u) / ph[s] - col[u]);
    }
  }
  const Eigen::MatrixXd basis = detail::zero_sum_basis(q);
  const Eigen::MatrixXd restricted = basis.transpose() * out.jacobian * basis;
  Eigen::EigenSolver<Eigen::MatrixXd> es(restricted, false);
  for (int k = 0; k < restricted.rows(); ++k) {
    out.eigenvalues.push_back(es.eigenvalues()(k));
    out.spectral_radius = std::max(out.spectral_radius, std::abs(es.eigenvalues()(k)));
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
            [](auto a, auto b) { return a.real() > b.real(); });
  return out;
}

}  // namespace bethe
