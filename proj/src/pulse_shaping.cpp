#include "mlock/pulse_shaping.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mlock/errors.hpp"

namespace mlock::pulse {

void PulseState::validate() const {
  if (!(gamma.real() > 0.0)) throw DomainError("PulseState: Re(gamma) must be positive");
}

void MoebiusElement::validate() const {
  if (determinant() == cplx(0.0, 0.0)) throw DomainError("MoebiusElement: AD - BC must be nonzero");
}

void NormalizedPulse::validate() const {
  if (!(std::abs(g_m) < 1.0)) throw DomainError("NormalizedPulse: |g_m| must be < 1");
  if (!(t_r > 0.0)) throw DomainError("NormalizedPulse: t_r must be positive");
}

MoebiusElement element_time_like(cplx gamma_t) {
  return {cplx(1.0), cplx(0.0), gamma_t, cplx(1.0)};
}

MoebiusElement element_freq_like(cplx gamma_f) {
  if (gamma_f == cplx(0.0, 0.0)) throw DomainError("element_freq_like: gamma_F must be nonzero");
  return {cplx(1.0), 1.0 / gamma_f, cplx(0.0), cplx(1.0)};
}

MoebiusElement compose(const MoebiusElement& first, const MoebiusElement& second) {
  // Coefficient matrices act on 1/gamma; applying `first` then `second` is the
  // product second * first.
  const MoebiusElement out{
      second.a * first.a + second.b * first.c,
      second.a * first.b + second.b * first.d,
      second.c * first.a + second.d * first.c,
      second.c * first.b + second.d * first.d,
  };
  if (out.determinant() == cplx(0.0, 0.0)) {
    throw DomainError("compose: degenerate product (AD - BC = 0)");
  }
  return out;
}

MoebiusElement inverse(const MoebiusElement& e) {
  const cplx det = e.determinant();
  if (det == cplx(0.0, 0.0)) throw DomainError("inverse: degenerate element");
  // Projective inverse; the overall scale is irrelevant but keep det = 1/det(e).
  return {e.d / det, -e.b / det, -e.c / det, e.a / det};
}

cplx apply(const MoebiusElement& e, cplx gamma) {
  const cplx den = e.a + e.b * gamma;
  if (den == cplx(0.0, 0.0) || !std::isfinite(std::abs(den))) {
    throw SingularityError("apply: pole of the Moebius map", gamma);
  }
  const cplx out = (e.c + e.d * gamma) / den;
  if (!std::isfinite(out.real()) || !std::isfinite(out.imag())) {
    throw SingularityError("apply: pole of the Moebius map", gamma);
  }
  return out;
}

PulseState apply(const MoebiusElement& element, const PulseState& pulse) {
  PulseState out = pulse;
  out.gamma = apply(element, pulse.gamma);
  return out;
}

MoebiusElement roundtrip_element(cplx gamma_t, cplx gamma_f) {
  return compose(element_time_like(gamma_t), element_freq_like(gamma_f));
}

MoebiusElement normalized_roundtrip(cplx g_m) {
  return roundtrip_element(g_m * g_m, cplx(1.0));
}

std::vector<cplx> roundtrip_iterate(cplx g0, cplx g_m, int n) {
  if (n < 1) throw DomainError("roundtrip_iterate: n must be >= 1");
  const MoebiusElement loop = normalized_roundtrip(g_m);
  std::vector<cplx> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  out.push_back(g0);
  cplx g = g0;
  for (int i = 0; i < n; ++i) {
    g = apply(loop, g);
    if (!(std::abs(g) <= 1.0)) {
      throw InstabilityError("roundtrip_iterate: |g| > 1 after " + std::to_string(i + 1) +
                             " round trips (outside the perturbative regime)");
    }
    out.push_back(g);
  }
  return out;
}

cplx continuous_solution(cplx g_m, double tau_r, double tau_r0) {
  const cplx z = g_m * (tau_r - tau_r0);
  // tanh(z) has poles where cosh(z) = 0, i.e. z = i pi (k + 1/2).
  const cplx ch = std::cosh(z);
  if (std::abs(ch) < 1e-12 * std::max(1.0, std::abs(std::sinh(z)))) {
    throw SingularityError("continuous_solution: tanh pole", z);
  }
  return g_m * std::tanh(z);
}

double gamma_f_from_band(double delta_lambda, double lambda_l, double n_eff) {
  if (!(delta_lambda > 0.0 && lambda_l > 0.0 && n_eff > 0.0)) {
    throw DomainError("gamma_f_from_band: all inputs must be positive");
  }
  return (2.0 * std::numbers::pi * kSpeedOfLight / (lambda_l * n_eff)) * (delta_lambda / lambda_l);
}

cplx g_m_from(cplx gamma_t, cplx gamma_f) {
  if (gamma_f == cplx(0.0, 0.0)) throw DomainError("g_m_from: gamma_F must be nonzero");
  return std::sqrt(gamma_t / gamma_f);
}

}  // namespace mlock::pulse
