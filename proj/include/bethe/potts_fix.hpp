#pragma once

// Complete enumeration of Potts BP fixed points by type, local-maximizer
// tests for the edge-measure functional, and the 2_- stability inequality.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bethe/bp.hpp"
#include "bethe/error.hpp"
#include "bethe/functional.hpp"
#include "bethe/spec.hpp"

namespace bethe {

// ---------------------------------------------------------------------------
// F(x) = x^{-1} (x/theta + 1)^{d-1}, decreasing on (0, v], increasing on
// [v, inf), v = theta/(d-2). All inversions run on log x so tiny roots keep
// full relative precision.
// ---------------------------------------------------------------------------

inline double log_F(double x, double theta, int d) {
  return -std::log(x) + (d - 1) * std::log1p(x / theta);
}

inline double F_eval(double x, double theta, int d) {
  if (!(x > 0.0)) fail(ErrorCode::OutOfRange, "F needs x > 0");
  return std::exp(log_F(x, theta, d));
}

namespace detail {

// Bisection on t = log x for log F(e^t) = target; `decreasing` selects the
// branch orientation on [t_lo, t_hi].
inline double invert_log_F(double target, double theta, int d, double t_lo,
                           double t_hi, bool decreasing) {
  for (int k = 0; k < 400; ++k) {
    const double mid = 0.5 * (t_lo + t_hi);
    if (mid <= t_lo || mid >= t_hi) break;
    const double val = log_F(std::exp(mid), theta, d);
    const bool below_root = decreasing ? (val > target) : (val < target);
    if (below_root) t_lo = mid; else t_hi = mid;
  }
  return std::exp(0.5 * (t_lo + t_hi));
}

inline constexpr double kBranchSlack = 1e-14;

}  // namespace detail

/// Inverse of F on (0, v]. Throws OutOfBranchRange below F(v).
inline double F_minus_inv_log(double log_y, double theta, int d) {
  const double v = theta / (d - 2);
  const double log_fv = log_F(v, theta, d);
  if (std::abs(log_y - log_fv) <= detail::kBranchSlack * std::max(1.0, std::abs(log_fv))) {
    return v;
  }
  if (log_y < log_fv) fail(ErrorCode::OutOfBranchRange, "F_-^{-1}: value below F(v)");
  // F(x) >= 1/x, so log F(e^t) >= -t and t_lo = -log_y - 1 lies left of the root.
  const double t_lo = std::min(-log_y - 1.0, std::log(v) - 1.0);
  return detail::invert_log_F(log_y, theta, d, t_lo, std::log(v), true);
}

/// Inverse of F on [v, 1]. Throws OutOfBranchRange outside [F(v), F(1)].
inline double F_plus_inv_log(double log_y, double theta, int d) {
  const double v = theta / (d - 2);
  if (v > 1.0) fail(ErrorCode::OutOfBranchRange, "F_+ branch [v,1] is empty");
  const double log_fv = log_F(v, theta, d);
  const double log_f1 = log_F(1.0, theta, d);
  const double slack_v = detail::kBranchSlack * std::max(1.0, std::abs(log_fv));
  const double slack_1 = detail::kBranchSlack * std::max(1.0, std::abs(log_f1));
  if (std::abs(log_y - log_fv) <= slack_v) return v;
  if (log_y < log_fv) fail(ErrorCode::OutOfBranchRange, "F_+^{-1}: value below F(v)");
  if (log_y > log_f1) {
    if (log_y - log_f1 <= slack_1) return 1.0;
    fail(ErrorCode::OutOfBranchRange, "F_+^{-1}: value above F(1)");
  }
  return detail::invert_log_F(log_y, theta, d, std::log(v), 0.0, false);
}

inline double F_minus_inv(double y, double theta, int d) {
  if (!(y > 0.0)) fail(ErrorCode::OutOfBranchRange, "F_-^{-1}: y must be > 0");
  return F_minus_inv_log(std::log(y), theta, d);
}

inline double F_plus_inv(double y, double theta, int d) {
  if (!(y > 0.0)) fail(ErrorCode::OutOfBranchRange, "F_+^{-1}: y must be > 0");
  return F_plus_inv_log(std::log(y), theta, d);
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

struct LTypeLabel {
  int ell = 1;
  int sign = +1;  // +1: Q on the increasing branch, -1: decreasing

  std::string str() const { return std::to_string(ell) + (sign > 0 ? "+" : "-"); }
  friend bool operator==(const LTypeLabel&, const LTypeLabel&) = default;
};

/// One fixed point of the Potts recursion of l_± type: spin 1 carries Q,
/// (ell-1) spins carry p_plus >= v, (q-ell) spins carry p_minus <= v. When
/// m = 1 the measure is stored sorted in decreasing order, and coincident
/// solutions keep every label they were found under.
struct LTypeSolution {
  LTypeLabel label;
  std::vector<LTypeLabel> labels;
  double Q = 0.0;
  double p_plus = std::numeric_limits<double>::quiet_NaN();   // NaN when ell = 1
  double p_minus = std::numeric_limits<double>::quiet_NaN();  // NaN when ell = q
  double z_h = 0.0;
  SimplexMeasure h;
  double v = 0.0;
  double p0 = std::numeric_limits<double>::quiet_NaN();  // F_+^{-1}(m F(v)); NaN if undefined
  double residual = 0.0;

  bool has_label(int ell, int sign) const {
    return std::find(labels.begin(), labels.end(), LTypeLabel{ell, sign}) != labels.end();
  }
};

struct ClassifyOptions {
  int grid_points = 2000;
  double dedup_tol = 1e-8;
};

namespace detail {

struct TypeEquation {
  int q, d, ell, sign;
  double theta, log_m;

  // Builds the candidate measure from the scan parameter p; for ell >= 2, p
  // is p_plus, for ell = 1, p is p_minus.
  struct Point {
    double Q, p_plus, p_minus, log_z;
  };

  Point point(double p) const {
    Point pt;
    const double log_z = log_F(p, theta, d);
    pt.log_z = log_z;
    const double log_zq = log_z - log_m;
    pt.Q = sign > 0 ? F_plus_inv_log(log_zq, theta, d) : F_minus_inv_log(log_zq, theta, d);
    if (ell == 1) {
      pt.p_plus = std::numeric_limits<double>::quiet_NaN();
      pt.p_minus = p;
    } else {
      pt.p_plus = p;
      pt.p_minus = (q - ell) > 0 ? F_minus_inv_log(log_z, theta, d)
                                 : std::numeric_limits<double>::quiet_NaN();
    }
    return pt;
  }

  double mass(const Point& pt) const {
    double total = pt.Q;
    if (ell >= 2) total += (ell - 1) * pt.p_plus;
    if (q - ell > 0) total += (q - ell) * pt.p_minus;
    return total;
  }

  double g(double p) const { return mass(point(p)) - 1.0; }
};

inline std::vector<double> scan_grid(double lo, double hi, int n, bool logscale) {
  std::vector<double> grid;
  if (!(hi > lo)) {
    grid.push_back(lo);
    return grid;
  }
  for (int i = 0; i <= n; ++i) {
    const double f = static_cast<double>(i) / n;
    grid.push_back(logscale ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)))
                            : lo + f * (hi - lo));
  }
  // Geometric refinement toward both ends, where roots crowd against the
  // branch point or against p = 1.
  const double width = hi - lo;
  for (int k = 1; k <= 160; ++k) {
    const double off = width * std::pow(10.0, -k / 10.0);
    if (off <= 0.0) break;
    grid.push_back(lo + off);
    grid.push_back(hi - off);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  grid.erase(std::remove_if(grid.begin(), grid.end(),
                            [&](double x) { return x < lo || x > hi; }),
             grid.end());
  return grid;
}

inline double refine_root(const TypeEquation& eq, double a, double b, double ga,
                          bool logscale) {
  for (int k = 0; k < 300; ++k) {
    const double mid = logscale ? std::sqrt(a) * std::sqrt(b) : 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double gm = eq.g(mid);
    if (gm == 0.0) return mid;
    if ((gm > 0.0) == (ga > 0.0)) {
      a = mid;
      ga = gm;
    } else {
      b = mid;
    }
  }
  return std::abs(eq.g(a)) <= std::abs(eq.g(b)) ? a : b;
}

}  // namespace detail

/// All Potts BP fixed points, found type by type: for each ell and sign the
/// mass equation g(p) = 1 is scanned for sign changes on its full domain and
/// each bracket refined by bisection. Requires beta > 0.
inline std::vector<LTypeSolution> classify_fixed_points(const PottsParams& params, int d,
                                                        const ClassifyOptions& opts = {}) {
  check_potts(params);
  check_degree(d);
  if (!(params.beta > 0.0)) {
    fail(ErrorCode::InfiniteTheta, "classification needs beta > 0 (finite theta)");
  }
  const int q = params.q;
  const double theta = params.theta();
  const double v = theta / (d - 2);
  const double log_m = params.B;
  const bool symmetric = params.B == 0.0;
  const double log_fv = log_F(v, theta, d);
  const double log_f1 = log_F(1.0, theta, d);
  const bool plus_branch = v < 1.0;
  double p0 = std::numeric_limits<double>::quiet_NaN();
  if (plus_branch && log_m + log_fv <= log_f1) p0 = F_plus_inv_log(log_m + log_fv, theta, d);
  // Every fixed-point entry is at least 1/(q e^{B + (d-1) beta}).
  const double floor_p = 0.5 / (q * std::exp(params.B + (d - 1) * params.beta));

  std::vector<LTypeSolution> found;
  auto add = [&](const detail::TypeEquation& eq, double p) {
    const auto pt = eq.point(p);
    std::vector<double> w(q);
    w[0] = pt.Q;
    for (int s = 1; s < q; ++s) w[s] = (s < eq.ell) ? pt.p_plus : pt.p_minus;
    LTypeSolution sol;
    sol.label = {eq.ell, eq.sign};
    sol.labels = {sol.label};
    sol.Q = pt.Q;
    sol.p_plus = pt.p_plus;
    sol.p_minus = pt.p_minus;
    sol.v = v;
    sol.p0 = p0;
    if (symmetric) std::sort(w.begin(), w.end(), std::greater<>());
    sol.h = SimplexMeasure::from_weights(std::move(w));
    sol.residual = bp_residual(potts_spec(params), d, sol.h);
    sol.z_h = bp_map(potts_spec(params), d, sol.h).z;
    for (auto& other : found) {
      if (sup_distance(other.h, sol.h) < opts.dedup_tol) {
        for (const auto& lab : sol.labels) {
          if (!other.has_label(lab.ell, lab.sign)) other.labels.push_back(lab);
        }
        return;
      }
    }
    found.push_back(std::move(sol));
  };

  for (int ell = 1; ell <= q; ++ell) {
    for (int sign : {+1, -1}) {
      detail::TypeEquation eq{q, d, ell, sign, theta, log_m};
      double lo, hi;
      bool logscale;
      if (ell == 1) {
        if (sign > 0 && !plus_branch) continue;
        // p = p_minus with F(p)/m >= F(v) and, on the + sign, F(p)/m <= F(1).
        hi = std::min({F_minus_inv_log(log_m + log_fv, theta, d), v, 1.0});
        lo = floor_p;
        if (sign > 0) lo = std::max(lo, F_minus_inv_log(log_m + log_f1, theta, d));
        logscale = true;
      } else {
        if (std::isnan(p0)) continue;
        lo = p0;
        hi = 1.0;
        logscale = false;
      }
      if (!(hi > lo)) continue;
      const auto grid = detail::scan_grid(lo, hi, opts.grid_points, logscale);
      double prev_p = grid.front();
      double prev_g = eq.g(prev_p);
      if (prev_g == 0.0) add(eq, prev_p);
      for (std::size_t i = 1; i < grid.size(); ++i) {
        const double p = grid[i];
        const double gp = eq.g(p);
        if (gp == 0.0) {
          add(eq, p);
        } else if (prev_g != 0.0 && (gp > 0.0) != (prev_g > 0.0)) {
          add(eq, detail::refine_root(eq, prev_p, p, prev_g, logscale));
        }
        prev_p = p;
        prev_g = gp;
      }
    }
  }
  std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    return a.h[0] > b.h[0];
  });
  return found;
}

// ---------------------------------------------------------------------------
// Local maximizer tests
// ---------------------------------------------------------------------------

enum class Definiteness { NegDef, Marginal, Indefinite };

inline const char* to_string(Definiteness v) {
  switch (v) {
    case Definiteness::NegDef: return "negdef";
    case Definiteness::Marginal: return "marginal";
    case Definiteness::Indefinite: return "indefinite";
  }
  return "?";
}

inline constexpr double kMarginalBand = 1e-9;

/// 2(d-1) <(dbar/hbar)^2>_hbar - d <(delta/bh)^2>_bh for a symmetric delta
/// (row-major q x q).
inline double hessian_form(const EdgeMeasure& bh, int d, std::span<const double> delta) {
  const int q = bh.q();
  const auto hbar = bh.marginal();
  double vx = 0.0, e = 0.0;
  for (int s = 0; s < q; ++s) {
    double row = 0.0;
    for (int t = 0; t < q; ++t) {
      const double x = delta[s * q + t];
      row += x;
      if (x != 0.0) e += x * x / bh(s, t);
    }
    vx += row * row / hbar[s];
  }
  return 2.0 * (d - 1) * vx - d * e;
}

struct HessianResult {
  Definiteness verdict = Definiteness::Marginal;
  // Largest ratio 2(d-1)<(dbar/hbar)^2> / (d <(delta/bh)^2>) over admissible
  // delta; the Hessian is negative definite iff it is below 1.
  double max_ratio = 0.0;
  // Hessian form at the maximizing direction, scaled to sum delta^2 = 1.
  double extremal_value = 0.0;
  std::vector<double> direction;  // row-major q x q, sum of squares 1
};

inline Verdict localmax_verdict(Definiteness v) {
  switch (v) {
    case Definiteness::NegDef: return Verdict::Yes;
    case Definiteness::Indefinite: return Verdict::No;
    case Definiteness::Marginal: return Verdict::Marginal;
  }
  return Verdict::Marginal;
}

/// Definiteness of the second variation of bold Phi at the interior
/// stationary point bh, over symmetric zero-sum perturbations.
///
/// delta is coordinatized by its upper triangle, off-diagonal entries scaled
/// by sqrt(2) so that sum delta^2 is the Euclidean norm. In these coordinates
/// both quadratic forms are assembled; the edge form is diagonal, so the
/// symmetric-definite pencil is reduced exactly by diagonal scaling before the
/// zero-sum constraint is projected out.
inline HessianResult hessian_localmax(const EdgeMeasure& bh, const PottsParams& params, int d) {
  const auto spec = potts_spec(params);
  const int q = bh.q();
  if (q != params.q) fail(ErrorCode::DimensionMismatch, "edge measure size != q");
  for (double x : bh.values()) {
    if (!(x > 0.0)) fail(ErrorCode::BoundaryPoint, "Hessian test needs interior bh");
  }
  const auto h = unembed(bh, spec);
  if (bp_residual(spec, d, h) > 1e-6) {
    fail(ErrorCode::NotStationary, "bh does not correspond to a BP fixed point");
  }
  const auto hbar = bh.marginal();

  struct Coord { int s, t; double scale; };
  std::vector<Coord> coords;
  for (int s = 0; s < q; ++s) {
    for (int t = s; t < q; ++t) {
      coords.push_back({s, t, s == t ? 1.0 : 1.0 / std::sqrt(2.0)});
    }
  }
  const int n = static_cast<int>(coords.size());

  // delta_{st} = scale * x_k for both (s,t) and (t,s).
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(q, n);  // x -> dbar
  Eigen::VectorXd edge_diag(n);                        // d sum delta^2/bh
  Eigen::VectorXd constraint(n);                       // sum delta
  for (int k = 0; k < n; ++k) {
    const auto [s, t, c] = coords[k];
    if (s == t) {
      rows(s, k) += c;
      edge_diag(k) = d * c * c / bh(s, s);
      constraint(k) = c;
    } else {
      rows(s, k) += c;
      rows(t, k) += c;
      edge_diag(k) = d * 2.0 * c * c / bh(s, t);
      constraint(k) = 2.0 * c;
    }
  }
  Eigen::MatrixXd vertex_form = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < q; ++s) {
    vertex_form += (2.0 * (d - 1) / hbar[s]) * rows.row(s).transpose() * rows.row(s);
  }
  // y = E^{1/2} x
  const Eigen::VectorXd inv_sqrt = edge_diag.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd scaled = inv_sqrt.asDiagonal() * vertex_form * inv_sqrt.asDiagonal();
  Eigen::VectorXd c_scaled = inv_sqrt.cwiseProduct(constraint);
  c_scaled.normalize();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(c_scaled);
  const Eigen::MatrixXd full = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd basis = full.rightCols(n - 1);
  const Eigen::MatrixXd reduced = basis.transpose() * scaled * basis;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(reduced);
  const int top = static_cast<int>(es.eigenvalues().size()) - 1;

  HessianResult out;
  out.max_ratio = es.eigenvalues()(top);
  const Eigen::VectorXd y = basis * es.eigenvectors().col(top);
  Eigen::VectorXd x = inv_sqrt.cwiseProduct(y);
  x.normalize();
  out.direction.assign(q * q, 0.0);
  for (int k = 0; k < n; ++k) {
    const auto [s, t, c] = coords[k];
    out.direction[s * q + t] = c * x(k);
    out.direction[t * q + s] = c * x(k);
  }
  out.extremal_value = hessian_form(bh, d, out.direction);
  const double gap = out.max_ratio - 1.0;
  if (gap < -kMarginalBand) out.verdict = Definiteness::NegDef;
  else if (gap > kMarginalBand) out.verdict = Definiteness::Indefinite;
  else out.verdict = Definiteness::Marginal;
  return out;
}

struct RhoResult {
  double rho = 0.0;
  double threshold = 0.0;  // d / (2(d-1))
  Verdict localmax = Verdict::Marginal;
};

/// Symmetric correlation coefficient of the exchangeable pair with law bh:
/// the largest Var E[phi(X,Y)|X] / Var phi(X,Y) over symmetric phi, as a
/// Rayleigh quotient on symmetric functions (supported where bh > 0) with
/// constants projected out. If d >= 3 is given the local-max verdict
/// rho <= d/(2(d-1)) is filled in.
inline RhoResult rho_corr(const EdgeMeasure& bh, int d = 0) {
  const int q = bh.q();
  const auto hbar = bh.marginal();
  for (double x : hbar) {
    if (!(x > 0.0)) fail(ErrorCode::BoundaryPoint, "rho needs an interior marginal");
  }
  struct Coord { int s, t; double weight; };
  std::vector<Coord> coords;
  for (int s = 0; s < q; ++s) {
    for (int t = s; t < q; ++t) {
      const double w = s == t ? bh(s, s) : 2.0 * bh(s, t);
      if (w > 0.0) coords.push_back({s, t, w});
    }
  }
  const int n = static_cast<int>(coords.size());
  if (n < 2) fail(ErrorCode::DegenerateVariance, "every symmetric phi is a.s. constant");
  // y_k = sqrt(w_k) phi_k, so Var phi = |y|^2 on {sum sqrt(w_k) y_k = 0}.
  // E[phi | X = s] = sum_k K(s,k) y_k.
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(q, n);
  Eigen::VectorXd c(n);
  for (int k = 0; k < n; ++k) {
    const auto [s, t, w] = coords[k];
    const double root = std::sqrt(w);
    c(k) = root;
    if (s == t) {
      K(s, k) += bh(s, s) / (hbar[s] * root);
    } else {
      K(s, k) += bh(s, t) / (hbar[s] * root);
      K(t, k) += bh(s, t) / (hbar[t] * root);
    }
  }
  Eigen::MatrixXd numer = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < q; ++s) numer += hbar[s] * K.row(s).transpose() * K.row(s);
  c.normalize();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(c);
  const Eigen::MatrixXd full = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd basis = full.rightCols(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(basis.transpose() * numer * basis,
                                                    Eigen::EigenvaluesOnly);
  RhoResult out;
  out.rho = std::clamp(es.eigenvalues().maxCoeff(), 0.0, 1.0);
  if (d >= 3) {
    out.threshold = d / (2.0 * (d - 1));
    const double gap = out.rho / out.threshold - 1.0;
    if (gap < -kMarginalBand) out.localmax = Verdict::Yes;
    else if (gap > kMarginalBand) out.localmax = Verdict::No;
    else out.localmax = Verdict::Marginal;
  }
  return out;
}

/// Var E[phi(X,Y)|X] / Var phi(X,Y) for one symmetric test function phi
/// (row-major q x q) under the exchangeable pair law bh.
inline double correlation_ratio(const EdgeMeasure& bh, std::span<const double> phi) {
  const int q = bh.q();
  if (phi.size() != static_cast<std::size_t>(q * q)) {
    fail(ErrorCode::DimensionMismatch, "test function must have q*q entries");
  }
  const auto hbar = bh.marginal();
  double mean = 0.0;
  for (int i = 0; i < q * q; ++i) mean += bh.values()[i] * phi[i];
  double var = 0.0, var_cond = 0.0;
  for (int s = 0; s < q; ++s) {
    double cond = 0.0;
    for (int t = 0; t < q; ++t) {
      const double dev = phi[s * q + t] - mean;
      var += bh(s, t) * dev * dev;
      cond += bh(s, t) * dev;
    }
    if (hbar[s] > 0.0) var_cond += cond * cond / hbar[s];
  }
  if (!(var > 0.0)) fail(ErrorCode::DegenerateVariance, "test function is a.s. constant");
  return var_cond / var;
}

struct StabilityResult {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Closed-form test at a 2_- solution with m > 1: the largest eigenvalue of
/// the BP differential is below 1 iff
/// p+^2/(p+ - v) > (d-2)/(d-1) + Q^2/(v - Q) + (q-2) p-^2/(v - p-).
inline StabilityResult stab_condition(const LTypeSolution& sol, const PottsParams& params, int d) {
  if (sol.label.ell != 2 || sol.label.sign != -1 || !(params.B > 0.0)) {
    fail(ErrorCode::WrongType, "stability inequality applies to 2_- solutions with m > 1");
  }
  const double v = params.v(d);
  StabilityResult out;
  out.lhs = sol.p_plus * sol.p_plus / (sol.p_plus - v);
  out.rhs = (d - 2.0) / (d - 1.0) + sol.Q * sol.Q / (v - sol.Q);
  if (params.q > 2) out.rhs += (params.q - 2) * sol.p_minus * sol.p_minus / (v - sol.p_minus);
  out.holds = out.lhs > out.rhs;
  return out;
}

/// Full report for a classified solution: Phi decomposition and both
/// local-maximizer verdicts, the Jacobian spectrum and, for 2_- at m > 1, the
/// closed-form stability verdict.
inline FixedPointReport analyze_solution(const LTypeSolution& sol, const PottsParams& params,
                                         int d) {
  const auto spec = potts_spec(params);
  FixedPointReport rep;
  rep.h = sol.h;
  rep.residual = sol.residual;
  rep.converged = true;
  rep.z_h = bp_map(spec, d, sol.h).z;
  rep.bz_h = pair_normalizer(spec, sol.h);
  const auto parts = phi(spec, d, sol.h);
  rep.phi_vx = parts.vx;
  rep.phi_e = parts.e;
  rep.phi = parts.total;
  rep.ltype = sol.label.str();
  const auto bh = embed(sol.h, spec);
  rep.localmax_hessian = localmax_verdict(hessian_localmax(bh, params, d).verdict);
  rep.localmax_rho = rho_corr(bh, d).localmax;
  const auto jac = bp_jacobian(spec, d, sol.h);
  rep.jac_spectral_radius = jac.spectral_radius;
  if (sol.label.ell == 2 && sol.label.sign == -1 && params.B > 0.0) {
    rep.stable = stab_condition(sol, params, d).holds ? Verdict::Yes : Verdict::No;
  }
  return rep;
}

}  // namespace bethe
