#pragma once

// The comb function T_beta(s) = sinh(beta) / (cosh(beta) - cos(s))
//                            = sum_k exp(i k s - |k| beta),
// a unit-mean periodic pulse train. Several modules use it as an analytic
// reference, so both the closed form and the truncated Fourier series live here.

#include <cstddef>

namespace mlock::combmath {

// Requests below this are rejected: coth(beta/2) stops being representable
// to useful accuracy.
inline constexpr double kMinBeta = 1e-6;

struct CombParams {
  double beta = 1.0;
  int truncation_k = 1;

  void validate() const;
};

double comb_closed(double s, double beta);

// 1 + 2 sum_{k=1..K} exp(-k beta) cos(k s).
double comb_series(double s, double beta, int truncation_k);
double comb_series(double s, const CombParams& params);

// Geometric tail bound 2 exp(-(K+1) beta) / (1 - exp(-beta)).
double comb_tail_bound(double beta, int truncation_k);
// Smallest K whose tail bound is <= tol.
int adaptive_truncation(double beta, double tol = 1e-13);
double comb_series_adaptive(double s, double beta, double tol = 1e-13);

// exp(-|k| beta).
double comb_fourier_coeff(long k, double beta);

// Half width at half maximum of one pulse, arccos(2 - cosh beta); equals
// beta + O(beta^3) for small beta. Once cosh(beta) >= 3 the pulse never drops
// to half its peak and the full half-period pi is returned.
double comb_hwhm(double beta);

// The width convention beta/2 quoted alongside the comb function. Kept next to
// comb_hwhm so reports can print both; the two differ by a factor of two.
inline double comb_linewidth_quoted(double beta) { return 0.5 * beta; }

// Same pulse train parameterised by the neighbour ratio rho = exp(-beta):
// (1 - rho^2) / (1 - 2 rho cos s + rho^2). Stays finite as rho -> 0
// (beta -> infinity), where it tends to 1.
double comb_from_ratio(double s, double rho);

// Finite-N version: sum_{|k|<N} (1 - |k|/N) exp(i k s - |k| beta). This is the
// exact ensemble mean of N^-1 |sum_m exp(i(m s + theta_m))|^2 when neighbour
// phase differences are independent Gaussians of variance 2 beta.
double comb_finite(double s, double beta, int n_modes);

}  // namespace mlock::combmath
