#pragma once

// Model specifications, measures on spins and spin pairs, entropy
// functionals, and the embedding of BP fixed points into edge measures.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bethe/error.hpp"

namespace bethe {

inline constexpr double kNormTol = 1e-12;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Pairwise weights psi (q x q, row-major, symmetric, nonnegative) and vertex
/// weights psibar (length q, strictly positive). Construct through
/// make_spec() to get a validated value with a permissive spin filled in.
struct FactorSpec {
  int q = 0;
  std::vector<double> psi;
  std::vector<double> psibar;
  std::optional<int> sigma_p;

  double weight(int s, int t) const { return psi[s * q + t]; }
  double vertex_weight(int s) const { return psibar[s]; }
  // log psi; -inf where psi vanishes.
  double xi(int s, int t) const {
    const double w = weight(s, t);
    return w > 0.0 ? std::log(w) : -kInf;
  }
  double xibar(int s) const { return std::log(psibar[s]); }
  bool strictly_positive() const {
    return std::all_of(psi.begin(), psi.end(), [](double w) { return w > 0.0; });
  }
};

/// Checks symmetry, positivity of psibar and permissivity. Returns the
/// permissive spin: the supplied sigma_p if it is valid, else the lowest
/// valid index.
inline int validate_spec(const FactorSpec& spec) {
  const int q = spec.q;
  if (q < 2) fail(ErrorCode::InvalidArgument, "alphabet size must be >= 2");
  if (spec.psi.size() != static_cast<std::size_t>(q * q) ||
      spec.psibar.size() != static_cast<std::size_t>(q)) {
    fail(ErrorCode::DimensionMismatch, "psi must be q*q and psibar length q");
  }
  for (int s = 0; s < q; ++s) {
    for (int t = 0; t < q; ++t) {
      const double a = spec.weight(s, t);
      if (!(a >= 0.0) || !std::isfinite(a)) {
        fail(ErrorCode::InvalidArgument, "psi[" + std::to_string(s) + "][" +
                                             std::to_string(t) +
                                             "] is negative or not finite");
      }
      const double b = spec.weight(t, s);
      if (std::abs(a - b) > kNormTol * std::max({1.0, std::abs(a), std::abs(b)})) {
        fail(ErrorCode::NonSymmetric, "psi[" + std::to_string(s) + "][" +
                                          std::to_string(t) + "] != psi[" +
                                          std::to_string(t) + "][" +
                                          std::to_string(s) + "]");
      }
    }
  }
  for (int s = 0; s < q; ++s) {
    if (!(spec.psibar[s] > 0.0) || !std::isfinite(spec.psibar[s])) {
      fail(ErrorCode::NonPositiveVertexWeight,
           "psibar[" + std::to_string(s) + "] is not strictly positive");
    }
  }
  auto permissive = [&](int p) {
    for (int s = 0; s < q; ++s) {
      if (!(spec.weight(s, p) > 0.0)) return false;
    }
    return true;
  };
  if (spec.sigma_p) {
    const int p = *spec.sigma_p;
    if (p < 0 || p >= q || !permissive(p)) {
      fail(ErrorCode::NotPermissive,
           "supplied sigma_p=" + std::to_string(p) + " has a zero in its column");
    }
    return p;
  }
  for (int p = 0; p < q; ++p) {
    if (permissive(p)) return p;
  }
  fail(ErrorCode::NotPermissive, "every column of psi contains a zero");
}

inline FactorSpec make_spec(int q, std::vector<double> psi,
                            std::vector<double> psibar,
                            std::optional<int> sigma_p = std::nullopt) {
  FactorSpec spec{q, std::move(psi), std::move(psibar), sigma_p};
  spec.sigma_p = validate_spec(spec);
  return spec;
}

/// Ferromagnetic Potts parameters. Spin "1" of the model is index 0 here.
struct PottsParams {
  int q = 2;
  double beta = 0.0;
  double B = 0.0;

  double m() const { return std::exp(B); }
  // 1/(e^beta - 1); +inf sentinel at beta = 0.
  double theta() const { return beta > 0.0 ? 1.0 / std::expm1(beta) : kInf; }
  double p() const { return -std::expm1(-beta); }
  double gamma() const {
    const double e = std::exp(beta);
    return (q - 1) * std::expm1(beta) / (e + q - 1);
  }
  double C() const { return (std::exp(beta) + q - 1) / q; }
  // theta/(d-2), the branch point of F.
  double v(int d) const { return theta() / (d - 2); }
};

inline void check_potts(const PottsParams& params) {
  if (params.q < 2) fail(ErrorCode::InvalidArgument, "q must be >= 2");
  if (!(params.beta >= 0.0) || !std::isfinite(params.beta)) {
    fail(ErrorCode::InvalidArgument, "beta must be finite and >= 0");
  }
  if (!(params.B >= 0.0) || !std::isfinite(params.B)) {
    fail(ErrorCode::InvalidArgument, "B must be finite and >= 0");
  }
}

inline FactorSpec potts_spec(const PottsParams& params) {
  check_potts(params);
  const int q = params.q;
  std::vector<double> psi(q * q, 1.0);
  const double eb = std::exp(params.beta);
  for (int s = 0; s < q; ++s) psi[s * q + s] = eb;
  std::vector<double> psibar(q, 1.0);
  psibar[0] = std::exp(params.B);
  return make_spec(q, std::move(psi), std::move(psibar), 0);
}

/// Probability measure on [q].
class SimplexMeasure {
 public:
  SimplexMeasure() = default;

  // Rejects negative entries and totals off by more than kNormTol;
  // renormalizes otherwise.
  explicit SimplexMeasure(std::vector<double> p) : p_(std::move(p)) {
    if (p_.empty()) fail(ErrorCode::InvalidMeasure, "empty measure");
    double total = 0.0;
    for (double x : p_) {
      if (!(x >= 0.0) || !std::isfinite(x)) {
        fail(ErrorCode::InvalidMeasure, "negative or non-finite entry");
      }
      total += x;
    }
    if (std::abs(total - 1.0) > kNormTol) {
      fail(ErrorCode::InvalidMeasure,
           "total mass " + std::to_string(total) + " is not 1");
    }
    for (double& x : p_) x /= total;
  }

  // Normalizes an arbitrary nonnegative vector of positive total mass.
  static SimplexMeasure from_weights(std::vector<double> w) {
    double total = 0.0;
    for (double x : w) {
      if (!(x >= 0.0) || !std::isfinite(x)) {
        fail(ErrorCode::InvalidMeasure, "negative or non-finite weight");
      }
      total += x;
    }
    if (!(total > 0.0)) fail(ErrorCode::ZeroMass, "weights have zero total");
    for (double& x : w) x /= total;
    return SimplexMeasure(std::move(w));
  }

  static SimplexMeasure uniform(int q) {
    return SimplexMeasure(std::vector<double>(q, 1.0 / q));
  }

  static SimplexMeasure point(int q, int s) {
    std::vector<double> p(q, 0.0);
    p[s] = 1.0;
    return SimplexMeasure(std::move(p));
  }

  int size() const { return static_cast<int>(p_.size()); }
  double operator[](int s) const { return p_[s]; }
  std::span<const double> values() const { return p_; }
  const std::vector<double>& vec() const { return p_; }

  bool interior() const {
    return *std::min_element(p_.begin(), p_.end()) > 0.0;
  }

 private:
  std::vector<double> p_;
};

inline double sup_distance(const SimplexMeasure& a, const SimplexMeasure& b) {
  double d = 0.0;
  for (int s = 0; s < a.size(); ++s) d = std::max(d, std::abs(a[s] - b[s]));
  return d;
}

/// Symmetric probability measure on [q]^2, row-major.
class EdgeMeasure {
 public:
  EdgeMeasure() = default;

  EdgeMeasure(int q, std::vector<double> entries)
      : q_(q), e_(std::move(entries)) {
    if (q < 1 || e_.size() != static_cast<std::size_t>(q * q)) {
      fail(ErrorCode::DimensionMismatch, "edge measure must have q*q entries");
    }
    double total = 0.0;
    for (int s = 0; s < q_; ++s) {
      for (int t = 0; t < q_; ++t) {
        const double x = e_[s * q_ + t];
        if (!(x >= 0.0) || !std::isfinite(x)) {
          fail(ErrorCode::InvalidMeasure, "negative or non-finite entry");
        }
        if (std::abs(x - e_[t * q_ + s]) > kNormTol) {
          fail(ErrorCode::NonSymmetric, "edge measure is not symmetric");
        }
        total += x;
      }
    }
    if (std::abs(total - 1.0) > kNormTol) {
      fail(ErrorCode::InvalidMeasure,
           "total mass " + std::to_string(total) + " is not 1");
    }
    for (int s = 0; s < q_; ++s) {
      for (int t = s; t < q_; ++t) {
        const double x = 0.5 * (e_[s * q_ + t] + e_[t * q_ + s]) / total;
        e_[s * q_ + t] = x;
        e_[t * q_ + s] = x;
      }
    }
  }

  int q() const { return q_; }
  double operator()(int s, int t) const { return e_[s * q_ + t]; }
  std::span<const double> values() const { return e_; }

  std::vector<double> marginal() const {
    std::vector<double> m(q_, 0.0);
    for (int s = 0; s < q_; ++s) {
      for (int t = 0; t < q_; ++t) m[s] += e_[s * q_ + t];
    }
    return m;
  }

 private:
  int q_ = 0;
  std::vector<double> e_;
};

inline EdgeMeasure product_measure(const SimplexMeasure& h) {
  const int q = h.size();
  std::vector<double> e(q * q);
  for (int s = 0; s < q; ++s) {
    for (int t = 0; t < q; ++t) e[s * q + t] = h[s] * h[t];
  }
  return EdgeMeasure(q, std::move(e));
}

// Shannon entropy with 0 log 0 = 0.
inline double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

// Relative entropy sum p log(p/r) between nonnegative measures; +inf when p
// charges a zero of r.
inline double rel_entropy(std::span<const double> p, std::span<const double> r) {
  if (p.size() != r.size()) {
    fail(ErrorCode::DimensionMismatch, "rel_entropy operands differ in size");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (r[i] == 0.0) return kInf;
    d += p[i] * std::log(p[i] / r[i]);
  }
  return d;
}

/// <psi>_{h x h}.
inline double pair_normalizer(const FactorSpec& spec, const SimplexMeasure& h) {
  double z = 0.0;
  for (int s = 0; s < spec.q; ++s) {
    for (int t = 0; t < spec.q; ++t) z += spec.weight(s, t) * h[s] * h[t];
  }
  return z;
}

/// (h (x)_psi h)[s][t] = psi[s][t] h[s] h[t] / <psi>_{h x h}.
inline EdgeMeasure embed(const SimplexMeasure& h, const FactorSpec& spec) {
  if (h.size() != spec.q) fail(ErrorCode::DimensionMismatch, "embed: q mismatch");
  const int q = spec.q;
  const double z = pair_normalizer(spec, h);
  if (!(z > 0.0)) fail(ErrorCode::ZeroNormalizer, "<psi>_{h x h} = 0");
  std::vector<double> e(q * q);
  for (int s = 0; s < q; ++s) {
    for (int t = 0; t < q; ++t) e[s * q + t] = spec.weight(s, t) * h[s] * h[t] / z;
  }
  return EdgeMeasure(q, std::move(e));
}

/// Recovers the measure h with embed(h) = bh, using bh[s][s] ∝ psi[s][s] h[s]^2.
/// Requires a strictly positive diagonal of psi.
inline SimplexMeasure unembed(const EdgeMeasure& bh, const FactorSpec& spec) {
  std::vector<double> w(spec.q);
  for (int s = 0; s < spec.q; ++s) {
    if (!(spec.weight(s, s) > 0.0)) {
      fail(ErrorCode::InvalidArgument, "unembed needs psi[s][s] > 0");
    }
    w[s] = std::sqrt(bh(s, s) / spec.weight(s, s));
  }
  return SimplexMeasure::from_weights(std::move(w));
}

/// Biased measure (1+(q-1)b, 1-b, ..., 1-b)/q.
inline SimplexMeasure bias_to_simplex(double b, int q) {
  if (!(b >= 0.0 && b <= 1.0)) fail(ErrorCode::OutOfRange, "bias must lie in [0,1]");
  std::vector<double> h(q, (1.0 - b) / q);
  h[0] = (1.0 + (q - 1) * b) / q;
  return SimplexMeasure(std::move(h));
}

inline double simplex_to_bias(const SimplexMeasure& h) {
  const int q = h.size();
  for (int s = 2; s < q; ++s) {
    if (std::abs(h[s] - h[1]) > kNormTol) {
      fail(ErrorCode::NotBiasedForm, "h is not symmetric among spins 2..q");
    }
  }
  const double b = (q * h[0] - 1.0) / (q - 1);
  if (b < -kNormTol) fail(ErrorCode::OutOfRange, "h is biased away from spin 1");
  return std::clamp(b, 0.0, 1.0);
}

/// Biased measure from the log-likelihood ratio r = log(h[0]/h[1]); exact in
/// the small entries even when b is within rounding of 1.
inline SimplexMeasure biased_from_loglik(double r, int q) {
  std::vector<double> h(q);
  if (r >= 0.0) {
    const double er = std::exp(-r);
    const double denom = 1.0 + (q - 1) * er;
    h[0] = 1.0 / denom;
    for (int s = 1; s < q; ++s) h[s] = er / denom;
  } else {
    const double er = std::exp(r);
    const double denom = er + (q - 1);
    h[0] = er / denom;
    for (int s = 1; s < q; ++s) h[s] = 1.0 / denom;
  }
  return SimplexMeasure::from_weights(std::move(h));
}

inline double loglik_to_bias(double r, int q) {
  if (r >= 0.0) {
    const double er = std::exp(-r);
    return -std::expm1(-r) / (1.0 + (q - 1) * er);
  }
  return std::expm1(r) / (std::exp(r) + q - 1);
}

}  // namespace bethe
