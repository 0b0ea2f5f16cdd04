#pragma once

// The Bethe functional in product coordinates (Psi^vx, Psi^e, their
// symmetrization, Phi) and in edge-measure coordinates (bold Phi).

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "bethe/error.hpp"
#include "bethe/spec.hpp"

namespace bethe {

inline constexpr int kMaxSymDegree = 12;

namespace detail {

inline double log_sum_exp(std::span<const double> x) {
  double mx = -kInf;
  for (double v : x) mx = std::max(mx, v);
  if (mx == -kInf) return -kInf;
  double s = 0.0;
  for (double v : x) s += std::exp(v - mx);
  return mx + std::log(s);
}

// (psi h)[s] = sum_t psi[s][t] h[t]
inline std::vector<double> psi_apply(const FactorSpec& spec, const SimplexMeasure& h) {
  std::vector<double> out(spec.q, 0.0);
  for (int s = 0; s < spec.q; ++s) {
    for (int t = 0; t < spec.q; ++t) out[s] += spec.weight(s, t) * h[t];
  }
  return out;
}

inline double pair_average(const FactorSpec& spec, const SimplexMeasure& a,
                           const SimplexMeasure& b) {
  double z = 0.0;
  for (int s = 0; s < spec.q; ++s) {
    for (int t = 0; t < spec.q; ++t) z += spec.weight(s, t) * a[s] * b[t];
  }
  return z;
}

inline void check_tuple(const FactorSpec& spec, int d,
                        std::span<const SimplexMeasure> tuple) {
  if (d < 3) fail(ErrorCode::InvalidArgument, "degree must be >= 3");
  if (tuple.size() != static_cast<std::size_t>(d)) {
    fail(ErrorCode::DimensionMismatch, "tuple length must equal d");
  }
  for (const auto& h : tuple) {
    if (h.size() != spec.q) fail(ErrorCode::DimensionMismatch, "measure size != q");
  }
}

// Calls fn(pairing) for each perfect pairing of {0..n-1}; pairing[2k],
// pairing[2k+1] are partners.
template <class Fn>
void for_each_pairing(int n, Fn&& fn) {
  std::vector<int> rest(n);
  for (int i = 0; i < n; ++i) rest[i] = i;
  std::vector<int> pairing;
  pairing.reserve(n);
  auto rec = [&](auto&& self, std::vector<int>& avail) -> void {
    if (avail.empty()) {
      fn(static_cast<const std::vector<int>&>(pairing));
      return;
    }
    const int first = avail.front();
    for (std::size_t k = 1; k < avail.size(); ++k) {
      const int partner = avail[k];
      std::vector<int> next;
      next.reserve(avail.size() - 2);
      for (std::size_t j = 1; j < avail.size(); ++j) {
        if (j != k) next.push_back(avail[j]);
      }
      pairing.push_back(first);
      pairing.push_back(partner);
      self(self, next);
      pairing.pop_back();
      pairing.pop_back();
    }
  };
  rec(rec, rest);
}

}  // namespace detail

/// log Psi^vx = log sum_s psibar(s) prod_j (psi h^j)(s), evaluated in
/// O(d q^2) over the center spin.
inline double log_psi_vx(const FactorSpec& spec, int d,
                         std::span<const SimplexMeasure> tuple) {
  detail::check_tuple(spec, d, tuple);
  std::vector<double> terms(spec.q);
  for (int s = 0; s < spec.q; ++s) terms[s] = spec.xibar(s);
  for (const auto& h : tuple) {
    const auto ph = detail::psi_apply(spec, h);
    for (int s = 0; s < spec.q; ++s) {
      terms[s] += ph[s] > 0.0 ? std::log(ph[s]) : -kInf;
    }
  }
  return detail::log_sum_exp(terms);
}

inline double psi_vx(const FactorSpec& spec, int d,
                     std::span<const SimplexMeasure> tuple) {
  return std::exp(log_psi_vx(spec, d, tuple));
}

/// Psi^e = prod_j <psi>_{h^{2j-1} x h^{2j}}.
inline double psi_e(const FactorSpec& spec, int d,
                    std::span<const SimplexMeasure> tuple) {
  detail::check_tuple(spec, d, tuple);
  if (d % 2 != 0) fail(ErrorCode::OddDegree, "Psi^e needs even d");
  double prod = 1.0;
  for (int j = 0; j < d; j += 2) {
    prod *= detail::pair_average(spec, tuple[j], tuple[j + 1]);
  }
  return prod;
}

/// Average of Psi^e over all d! argument orders, computed over the (d-1)!!
/// perfect pairings (each pairing is hit by the same number of orders).
inline double psi_e_sym(const FactorSpec& spec, int d,
                        std::span<const SimplexMeasure> tuple) {
  detail::check_tuple(spec, d, tuple);
  if (d % 2 != 0) fail(ErrorCode::OddDegree, "Psi^e,sym needs even d");
  if (d > kMaxSymDegree) fail(ErrorCode::DegreeTooLarge, "Psi^e,sym limited to d <= 12");
  std::vector<double> pair(d * d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      pair[a * d + b] = detail::pair_average(spec, tuple[a], tuple[b]);
    }
  }
  double total = 0.0;
  long count = 0;
  detail::for_each_pairing(d, [&](const std::vector<int>& p) {
    double prod = 1.0;
    for (int k = 0; k < d; k += 2) prod *= pair[p[k] * d + p[k + 1]];
    total += prod;
    ++count;
  });
  return total / static_cast<double>(count);
}

inline double psi_ratio(const FactorSpec& spec, int d,
                        std::span<const SimplexMeasure> tuple) {
  return psi_vx(spec, d, tuple) / psi_e(spec, d, tuple);
}

inline double psi_sym(const FactorSpec& spec, int d,
                      std::span<const SimplexMeasure> tuple) {
  return psi_vx(spec, d, tuple) / psi_e_sym(spec, d, tuple);
}

struct PhiParts {
  double vx = 0.0;
  double e = 0.0;
  double total = 0.0;
};

/// Phi(h) = log sum_s psibar(s) (psi h)(s)^d - (d/2) log <psi>_{h x h}.
inline PhiParts phi(const FactorSpec& spec, int d, const SimplexMeasure& h) {
  if (d < 2) fail(ErrorCode::InvalidArgument, "degree must be >= 2");
  if (h.size() != spec.q) fail(ErrorCode::DimensionMismatch, "measure size != q");
  const auto ph = detail::psi_apply(spec, h);
  std::vector<double> terms(spec.q);
  for (int s = 0; s < spec.q; ++s) {
    terms[s] = spec.xibar(s) + (ph[s] > 0.0 ? d * std::log(ph[s]) : -kInf);
  }
  PhiParts out;
  out.vx = detail::log_sum_exp(terms);
  out.e = 0.5 * d * std::log(pair_normalizer(spec, h));
  out.total = out.vx - out.e;
  return out;
}

struct BoldPhi {
  double value = 0.0;
  double entropy_form = 0.0;   // <xibar> - (d-1)H(hbar) + (d/2)[<xi> + H(bh)]
  double divergence_form = 0.0;  // -D(hbar||psibar) - (d/2)D(bh||hbar (x)_psi hbar)
};

/// Edge-measure form of the Bethe functional, both algebraic forms. The
/// product hbar (x)_psi hbar in the divergence form is the unnormalized
/// measure psi[s][t] hbar[s] hbar[t]; with that reading the two forms agree
/// identically. Returns -inf when bh charges a zero of psi.
inline BoldPhi bold_phi_forms(const FactorSpec& spec, int d, const EdgeMeasure& bh) {
  const int q = spec.q;
  if (bh.q() != q) fail(ErrorCode::DimensionMismatch, "edge measure size != q");
  const auto hbar = bh.marginal();

  double xi_avg = 0.0;
  bool forbidden = false;
  for (int s = 0; s < q; ++s) {
    for (int t = 0; t < q; ++t) {
      const double w = bh(s, t);
      if (w == 0.0) continue;
      if (!(spec.weight(s, t) > 0.0)) {
        forbidden = true;
        continue;
      }
      xi_avg += w * spec.xi(s, t);
    }
  }
  BoldPhi out;
  if (forbidden) {
    out.value = out.entropy_form = out.divergence_form = -kInf;
    return out;
  }
  double xibar_avg = 0.0;
  for (int s = 0; s < q; ++s) xibar_avg += hbar[s] * spec.xibar(s);
  out.entropy_form = xibar_avg - (d - 1) * entropy(hbar) +
                     0.5 * d * (xi_avg + entropy(bh.values()));

  std::vector<double> tilted(q * q);
  for (int s = 0; s < q; ++s) {
    for (int t = 0; t < q; ++t) tilted[s * q + t] = spec.weight(s, t) * hbar[s] * hbar[t];
  }
  out.divergence_form = -rel_entropy(hbar, spec.psibar) -
                        0.5 * d * rel_entropy(bh.values(), tilted);
  const double scale = std::max(1.0, std::abs(out.entropy_form));
  if (std::abs(out.entropy_form - out.divergence_form) > 1e-10 * scale) {
    throw std::logic_error("bold_phi: entropy and divergence forms disagree");
  }
  out.value = out.entropy_form;
  return out;
}

inline double bold_phi(const FactorSpec& spec, int d, const EdgeMeasure& bh) {
  return bold_phi_forms(spec, d, bh).value;
}

}  // namespace bethe
