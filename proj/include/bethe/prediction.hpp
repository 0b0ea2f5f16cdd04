#pragma once

// Bethe prediction for the ferromagnetic Potts model, and the biased-tuple
// closed forms behind its symmetrization argument (g_flat, ell_profile).

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "bethe/bp.hpp"
#include "bethe/error.hpp"
#include "bethe/functional.hpp"
#include "bethe/potts_fix.hpp"
#include "bethe/spec.hpp"

namespace bethe {

enum class Flavor { Free, Max };

inline const char* to_string(Flavor f) { return f == Flavor::Free ? "free" : "max"; }

struct Prediction {
  double phi = 0.0;
  double phi_free = 0.0;
  double phi_max = 0.0;
  Flavor argmax = Flavor::Free;  // Free on ties
  ExtremalPair extremal;
  bool cross_checked = false;  // compared against every classified fixed point
};

/// Phi = Phi(h^f) v Phi(h^m). With B > 0 and beta > 0 (and `cross_check`),
/// the maximum over all classified fixed points must agree within 1e-9;
/// disagreement throws std::logic_error.
inline Prediction bethe_prediction(const PottsParams& params, int d, bool cross_check = true) {
  check_potts(params);
  check_degree(d);
  const auto spec = potts_spec(params);
  Prediction out;
  out.extremal = bp_extremal(params, d);
  out.phi_free = phi(spec, d, out.extremal.h_free).total;
  out.phi_max = phi(spec, d, out.extremal.h_max).total;
  out.argmax = out.phi_free >= out.phi_max ? Flavor::Free : Flavor::Max;
  out.phi = std::max(out.phi_free, out.phi_max);
  if (cross_check && params.B > 0.0 && params.beta > 0.0) {
    double best = -kInf;
    for (const auto& sol : classify_fixed_points(params, d)) {
      best = std::max(best, phi(spec, d, sol.h).total);
    }
    if (std::abs(best - out.phi) > 1e-9) {
      throw std::logic_error("bethe_prediction: extremal and classified maxima disagree");
    }
    out.cross_checked = true;
  }
  return out;
}

namespace detail {

// (psi h(b))[0] / C and (psi h(b))[s != 0] / C for the biased measure h(b).
inline double biased_top(const PottsParams& params, double b) {
  return 1.0 + params.gamma() * b;
}
inline double biased_rest(const PottsParams& params, double b) {
  return 1.0 - params.gamma() * b / (params.q - 1);
}

}  // namespace detail

/// log Psi^vx over a tuple of biased measures h(b^1..b^d):
/// C^d [e^B prod(1 + gamma b^j) + (q-1) prod(1 - gamma b^j/(q-1))].
inline double log_psi_vx_biased(const PottsParams& params, std::span<const double> biases) {
  double top = params.B, rest = std::log(params.q - 1.0);
  for (double b : biases) {
    top += std::log(detail::biased_top(params, b));
    rest += std::log(detail::biased_rest(params, b));
  }
  const double mx = std::max(top, rest);
  return biases.size() * std::log(params.C()) + mx +
         std::log(std::exp(top - mx) + std::exp(rest - mx));
}

/// log <psi>_{h(b) x h(b')} = log C + log(1 + gamma b b').
inline double log_pair_biased(const PottsParams& params, double b, double b2) {
  return std::log(params.C()) + std::log1p(params.gamma() * b * b2);
}

/// log Psi(b, b_flat, ..., b_flat) - (d/2) log C, with b_flat the free or the
/// maximal fixed-point bias. Constant in b.
inline double g_flat(const PottsParams& params, int d, Flavor flavor, double b) {
  check_potts(params);
  check_degree(d);
  if (!(b >= 0.0 && b <= 1.0)) fail(ErrorCode::OutOfRange, "bias must lie in [0,1]");
  const auto ext = bp_extremal(params, d);
  const double flat = flavor == Flavor::Free ? ext.b_free : ext.b_max;
  std::vector<double> biases(d, flat);
  biases[0] = b;
  // Every pairing matches b with one copy of b_flat.
  const double log_e = log_pair_biased(params, b, flat) +
                       (0.5 * d - 1.0) * log_pair_biased(params, flat, flat);
  return log_psi_vx_biased(params, biases) - log_e - 0.5 * d * std::log(params.C());
}

/// Profile over ell = number of tuple entries at b^m (the rest at b^f):
/// f_vx(ell) = log(A0 e^{a0 ell} + A1 e^{-a1 ell}) is log Psi^vx,
/// f_e(ell) = a4 ell^2 + a3 ell + a2 is the permutation average of log Psi^e,
/// f = f_vx - f_e.
struct EllProfile {
  int d = 0;
  double b_free = 0.0;
  double b_max = 0.0;
  bool degenerate = false;  // b^f = b^m: f is constant
  double A0 = 0.0, A1 = 0.0;
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;
  double C_mm = 0.0, C_ff = 0.0, C_mf = 0.0;  // log(1 + gamma b b')
  std::vector<double> f_vx, f_e, f;
  bool argmax_at_ends = false;  // max(f(0), f(d)) >= max f - 1e-9
  double boundary_gap_low = 0.0;   // |f(0) - f(1)|
  double boundary_gap_high = 0.0;  // |f(d-1) - f(d)|
};

inline EllProfile ell_profile(const PottsParams& params, int d) {
  check_potts(params);
  check_degree(d);
  if (d % 2 != 0) fail(ErrorCode::OddDegree, "ell profile needs even d");
  const auto ext = bp_extremal(params, d);
  EllProfile out;
  out.d = d;
  out.b_free = ext.b_free;
  out.b_max = ext.b_max;
  out.degenerate = std::abs(ext.b_max - ext.b_free) <= 1e-12;

  const double gamma = params.gamma();
  const double logC = std::log(params.C());
  const double bf = ext.b_free, bm = ext.b_max;
  const double top_f = detail::biased_top(params, bf), top_m = detail::biased_top(params, bm);
  const double rest_f = detail::biased_rest(params, bf), rest_m = detail::biased_rest(params, bm);
  out.A0 = std::exp(d * logC + params.B + d * std::log(top_f));
  out.A1 = std::exp(d * logC + std::log(params.q - 1.0) + d * std::log(rest_f));
  out.a0 = std::log(top_m / top_f);
  out.a1 = -std::log(rest_m / rest_f);
  out.C_mm = std::log1p(gamma * bm * bm);
  out.C_ff = std::log1p(gamma * bf * bf);
  out.C_mf = std::log1p(gamma * bm * bf);
  const double denom = 2.0 * (d - 1);
  out.a4 = (out.C_mm + out.C_ff - 2.0 * out.C_mf) / denom;
  out.a3 = (-out.C_mm + (1.0 - 2.0 * d) * out.C_ff + 2.0 * d * out.C_mf) / denom;
  out.a2 = 0.5 * d * (out.C_ff + logC);

  const double log_A0 = std::log(out.A0), log_A1 = std::log(out.A1);
  for (int ell = 0; ell <= d; ++ell) {
    const double x = log_A0 + out.a0 * ell, y = log_A1 - out.a1 * ell;
    const double mx = std::max(x, y);
    const double fvx = mx + std::log(std::exp(x - mx) + std::exp(y - mx));
    const double fe = out.a4 * ell * ell + out.a3 * ell + out.a2;
    out.f_vx.push_back(fvx);
    out.f_e.push_back(fe);
    out.f.push_back(fvx - fe);
  }
  const double best = *std::max_element(out.f.begin(), out.f.end());
  out.argmax_at_ends = std::max(out.f.front(), out.f.back()) >= best - 1e-9;
  out.boundary_gap_low = std::abs(out.f[0] - out.f[1]);
  out.boundary_gap_high = std::abs(out.f[d - 1] - out.f[d]);
  return out;
}

}  // namespace bethe
