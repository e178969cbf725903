#include <cmath>
#include <random>

#include "doctest.h"
#include "mlock/errors.hpp"
#include "mlock/pulse_shaping.hpp"

using namespace mlock;
using namespace mlock::pulse;

namespace {

bool same(cplx a, cplx b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

// Two elements are equal as maps iff their coefficients agree up to one scale.
bool same_map(const MoebiusElement& x, const MoebiusElement& y, double rel) {
  const cplx s = std::abs(y.a) > std::abs(y.d) ? x.a / y.a : x.d / y.d;
  return same(x.a, s * y.a, rel) && same(x.b, s * y.b, rel) && same(x.c, s * y.c, rel) &&
         same(x.d, s * y.d, rel);
}

MoebiusElement random_element(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (;;) {
    MoebiusElement e{{u(g), u(g)}, {u(g), u(g)}, {u(g), u(g)}, {u(g), u(g)}};
    if (std::abs(e.determinant()) > 0.1) return e;
  }
}

double max_relative_deviation(double g_m) {
  const int n = static_cast<int>(5.0 / g_m);
  const auto traj = roundtrip_iterate(0.0, g_m, n);
  double worst = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double ref = g_m * std::tanh(g_m * i);
    worst = std::max(worst, std::abs(traj[i] - ref) / ref);
  }
  return worst;
}

}  // namespace

TEST_CASE("validation") {
  const PulseState bad{{-1.0, 0.0}}, chirped{{1.0, -3.0}};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK_NOTHROW(chirped.validate());
  const MoebiusElement degenerate{1.0, 2.0, 2.0, 4.0};
  CHECK_THROWS_AS(degenerate.validate(), DomainError);
  const NormalizedPulse strong{0.0, 1.5};
  CHECK_THROWS_AS(strong.validate(), DomainError);
  CHECK_THROWS_AS(element_freq_like(0.0), DomainError);
  CHECK_THROWS_AS(compose(MoebiusElement{1.0, 1.0, 1.0, 1.0}, MoebiusElement{}), DomainError);
}

TEST_CASE("time-like element") {
  const auto id = element_time_like(0.0);
  CHECK(id.a == 1.0);
  CHECK(id.b == 0.0);
  CHECK(id.c == 0.0);
  CHECK(id.d == 1.0);
  CHECK(apply(element_time_like({2.0, 1.0}), cplx(1.0)) == cplx(3.0, 1.0));
  CHECK(apply(element_time_like(1.0), cplx(2.0)) == cplx(3.0));
}

TEST_CASE("frequency-like element") {
  const cplx gf(2.5, 0.7);
  CHECK(same(apply(element_freq_like(gf), gf), gf / 2.0, 1e-15));
  const auto near_id = element_freq_like(1e300);
  CHECK(same(apply(near_id, cplx(3.0, 1.0)), cplx(3.0, 1.0), 1e-15));
}

TEST_CASE("apply") {
  CHECK(apply(MoebiusElement::identity(), cplx(0.3, -2.0)) == cplx(0.3, -2.0));
  CHECK(apply(element_freq_like(1.0), cplx(0.0)) == cplx(0.0));
  CHECK_THROWS_AS(apply(element_freq_like(1.0), cplx(-1.0)), SingularityError);
  PulseState p{{2.0, 0.5}, {3.0, 1.0}, 7.0};
  const auto q = apply(element_time_like(1.0), p);
  CHECK(q.gamma == cplx(3.0, 0.5));
  CHECK(q.e0 == p.e0);
  CHECK(q.omega_p == p.omega_p);
}

TEST_CASE("composite round-trip coefficients are exact") {
  for (cplx gt : {cplx(1e-6), cplx(0.25, 0.1), cplx(3.0, -2.0)}) {
    for (cplx gf : {cplx(1.0), cplx(4.0, 1.0), cplx(0.5, -0.5)}) {
      const cplx gm2 = gt / gf;
      const auto e = compose(element_time_like(gt), element_freq_like(gf));
      CHECK(same(e.a, 1.0 + gm2, 1e-15));
      CHECK(e.b == 1.0 / gf);
      CHECK(same(e.c, gf * gm2, 1e-15));
      CHECK(e.d == 1.0);
      const auto r = roundtrip_element(gt, gf);
      CHECK(r.a == e.a);
      CHECK(r.b == e.b);
      CHECK(r.c == e.c);
      CHECK(r.d == e.d);
    }
  }
  const auto n = normalized_roundtrip(0.1);
  CHECK(same(n.a, 1.01, 1e-15));
  CHECK(n.b == 1.0);
  CHECK(same(n.c, 0.01, 1e-15));
  CHECK(n.d == 1.0);
}

TEST_CASE("property: group structure") {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = random_element(g), y = random_element(g), z = random_element(g);
    CHECK(same_map(compose(compose(x, y), z), compose(x, compose(y, z)), 1e-12));
    CHECK(same_map(compose(x, MoebiusElement::identity()), x, 1e-15));
    CHECK(same_map(compose(MoebiusElement::identity(), x), x, 1e-15));
    CHECK(same_map(compose(x, inverse(x)), MoebiusElement::identity(), 1e-12));
    CHECK(same_map(compose(inverse(x), x), MoebiusElement::identity(), 1e-12));
    const cplx gamma(u(g), u(g));
    try {
      const cplx there = apply(x, gamma);
      CHECK(same(apply(inverse(x), there), gamma, 1e-9));
      CHECK(same(apply(compose(x, y), gamma), apply(y, there), 1e-9));
    } catch (const SingularityError&) {
    }
  }
}

TEST_CASE("round-trip iteration examples") {
  const double g_m = 0.01;
  const double fixed = (-g_m * g_m + std::sqrt(std::pow(g_m, 4) + 4.0 * g_m * g_m)) / 2.0;
  for (cplx g : roundtrip_iterate(g_m, g_m, 500)) CHECK(std::abs(g - g_m) <= g_m * g_m);
  for (cplx g : roundtrip_iterate(fixed, g_m, 100)) CHECK(std::abs(g - fixed) < 1e-16);

  const auto t = roundtrip_iterate(0.0, g_m, 100);
  CHECK(t.size() == 101);
  // Discretisation error is O(g_m): 3.8e-3 relative at g_m = 0.01.
  CHECK(t[100].real() == doctest::Approx(0.01 * std::tanh(1.0)).epsilon(5e-3));
  CHECK(t[100].real() == doctest::Approx(0.0075869385).epsilon(1e-8));

  const auto away = roundtrip_iterate(-g_m * (1.0 + 1e-6), g_m, 200);
  CHECK(std::abs(away[200] + g_m) > 100.0 * std::abs(away[0] + g_m));
  CHECK_THROWS_AS(roundtrip_iterate(-0.9, 0.1, 100), InstabilityError);
  CHECK_THROWS_AS(roundtrip_iterate(0.0, 0.01, 0), DomainError);
}

TEST_CASE("discrete map converges to the continuum solution") {
  const double d2 = max_relative_deviation(1e-2);
  const double d3 = max_relative_deviation(1e-3);
  const double d4 = max_relative_deviation(1e-4);
  CHECK(d3 < 1e-3);
  CHECK(d2 / d3 == doctest::Approx(10.0).epsilon(0.05));
  CHECK(d3 / d4 == doctest::Approx(10.0).epsilon(0.05));
}

TEST_CASE("continuous solution") {
  CHECK(continuous_solution(0.3, 2.0, 2.0) == cplx(0.0));
  CHECK(same(continuous_solution(0.3, 1e3), cplx(0.3), 1e-15));
  const double half_pi = std::acos(-1.0) / 2.0;
  CHECK_THROWS_AS(continuous_solution(cplx(0.0, 1.0), half_pi), SingularityError);

  std::mt19937_64 g(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0), t(0.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const cplx g_m(0.5 + 0.5 * u(g), 0.2 * u(g));
    const double tau = t(g), tau0 = t(g), h = 1e-4;
    const cplx deriv = (continuous_solution(g_m, tau + h, tau0) - continuous_solution(g_m, tau - h, tau0)) / (2.0 * h);
    const cplx gv = continuous_solution(g_m, tau, tau0);
    CHECK(std::abs(deriv - (g_m * g_m - gv * gv)) < 1e-8);
  }
}

TEST_CASE("property: fixed-point stability") {
  for (double g_m : {1e-4, 1e-3, 1e-2, 0.1}) {
    const auto loop = normalized_roundtrip(g_m);
    const double fixed = (-g_m * g_m + std::sqrt(std::pow(g_m, 4) + 4.0 * g_m * g_m)) / 2.0;
    const double other = (-g_m * g_m - std::sqrt(std::pow(g_m, 4) + 4.0 * g_m * g_m)) / 2.0;
    CHECK(apply(loop, cplx(fixed)).real() == doctest::Approx(fixed).epsilon(1e-13));
    CHECK(apply(loop, cplx(other)).real() == doctest::Approx(other).epsilon(1e-13));
    const double h = 1e-3 * g_m * g_m;
    auto slope = [&](double x) { return (apply(loop, cplx(x + h)) - apply(loop, cplx(x - h))).real() / (2.0 * h); };
    CHECK(slope(fixed) < 1.0);
    CHECK(slope(other) > 1.0);
  }
}

TEST_CASE("property: round trips preserve a positive width") {
  std::mt19937_64 g(13);
  std::uniform_real_distribution<double> pos(0.01, 3.0), any(-3.0, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    const auto loop = roundtrip_element({pos(g), any(g)}, {pos(g), any(g)});
    cplx gamma(pos(g), any(g));
    for (int i = 0; i < 20; ++i) {
      gamma = apply(loop, gamma);
      CHECK(gamma.real() > 0.0);
    }
  }
}

TEST_CASE("filter bandwidth") {
  CHECK(gamma_f_from_band(0.2e-9, 1550e-9, 1.47) == doctest::Approx(1.067e11).epsilon(1e-3));
  CHECK(gamma_f_from_band(50e-9, 1550e-9, 1.47) == doctest::Approx(2.667e13).epsilon(1e-3));
  CHECK(gamma_f_from_band(50e-9, 1550e-9, 1.47) / gamma_f_from_band(0.2e-9, 1550e-9, 1.47) ==
        doctest::Approx(250.0).epsilon(1e-14));
  CHECK(gamma_f_from_band(0.4e-9, 1550e-9, 1.47) == doctest::Approx(2.0 * gamma_f_from_band(0.2e-9, 1550e-9, 1.47)));
  CHECK_THROWS_AS(gamma_f_from_band(0.0, 1550e-9, 1.47), DomainError);
}

TEST_CASE("g_m from element strengths") {
  CHECK(same(g_m_from(1e-6, 1.0), cplx(1e-3), 1e-15));
  CHECK(same(g_m_from(cplx(0.0, 2.0), 1.0), cplx(1.0, 1.0), 1e-15));
  CHECK_THROWS_AS(g_m_from(1.0, 0.0), DomainError);
}
