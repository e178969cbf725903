#include "mlock/combmath.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mlock/errors.hpp"

namespace mlock::combmath {

namespace {

void require_beta(double beta, const char* who) {
  if (!(beta >= kMinBeta) || !std::isfinite(beta)) {
    throw DomainError(std::string(who) + ": beta must be >= " + std::to_string(kMinBeta) +
                      " (got " + std::to_string(beta) + ")");
  }
}

// Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

void CombParams::validate() const {
  require_beta(beta, "CombParams");
  if (truncation_k < 1) throw DomainError("CombParams: truncation_k must be >= 1");
}

double comb_closed(double s, double beta) {
  require_beta(beta, "comb_closed");
  // cosh(b) - cos(s) = 2 sinh^2(b/2) + 2 sin^2(s/2), free of cancellation.
  const double sh = std::sinh(0.5 * beta);
  const double sn = std::sin(0.5 * s);
  return std::sinh(beta) / (2.0 * (sh * sh + sn * sn));
}

double comb_series(double s, double beta, int truncation_k) {
  require_beta(beta, "comb_series");
  if (truncation_k < 1) throw DomainError("comb_series: K must be >= 1");
  CompensatedSum acc;
  for (int k = truncation_k; k >= 1; --k) {
    acc.add(2.0 * std::exp(-k * beta) * std::cos(k * s));
  }
  acc.add(1.0);
  return acc.value();
}

double comb_series(double s, const CombParams& params) {
  params.validate();
  return comb_series(s, params.beta, params.truncation_k);
}

double comb_tail_bound(double beta, int truncation_k) {
  require_beta(beta, "comb_tail_bound");
  return 2.0 * std::exp(-(truncation_k + 1) * beta) / -std::expm1(-beta);
}

int adaptive_truncation(double beta, double tol) {
  require_beta(beta, "adaptive_truncation");
  if (!(tol > 0.0)) throw DomainError("adaptive_truncation: tol must be positive");
  // Solve 2 e^{-(K+1) b} / (1 - e^{-b}) <= tol for K.
  const double k = std::log(2.0 / (tol * -std::expm1(-beta))) / beta - 1.0;
  int kk = std::max(1, static_cast<int>(std::ceil(k)));
  while (comb_tail_bound(beta, kk) > tol) ++kk;
  return kk;
}

double comb_series_adaptive(double s, double beta, double tol) {
  return comb_series(s, beta, adaptive_truncation(beta, tol));
}

double comb_fourier_coeff(long k, double beta) {
  require_beta(beta, "comb_fourier_coeff");
  return std::exp(-std::abs(static_cast<double>(k)) * beta);
}

double comb_hwhm(double beta) {
  require_beta(beta, "comb_hwhm");
  // cosh(b) - 1 computed as 2 sinh^2(b/2) keeps precision at small beta.
  const double sh = std::sinh(0.5 * beta);
  const double arg = 1.0 - 2.0 * sh * sh;  // 2 - cosh(beta)
  if (arg <= -1.0) return std::numbers::pi;
  return std::acos(arg);
}

double comb_from_ratio(double s, double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("comb_from_ratio: rho must be in [0, 1)");
  const double one_minus = 1.0 - rho;
  const double sn = std::sin(0.5 * s);
  // 1 - 2 rho cos s + rho^2 = (1 - rho)^2 + 4 rho sin^2(s/2).
  return (one_minus * (1.0 + rho)) / (one_minus * one_minus + 4.0 * rho * sn * sn);
}

double comb_finite(double s, double beta, int n_modes) {
  require_beta(beta, "comb_finite");
  if (n_modes < 1) throw DomainError("comb_finite: n_modes must be >= 1");
  CompensatedSum acc;
  const double n = static_cast<double>(n_modes);
  for (int k = n_modes - 1; k >= 1; --k) {
    acc.add(2.0 * (1.0 - k / n) * std::exp(-k * beta) * std::cos(k * s));
  }
  acc.add(1.0);
  return acc.value();
}

}  // namespace mlock::combmath
