#include <cmath>
#include <cstdint>

#include "doctest.h"
#include "rwre/env.hpp"

using namespace rwre;

namespace {

EnvDistribution q_dist(double q) {
  return EnvDistribution::two_point(0.25, 0.75, q, 0.25);
}

// Independent check for the Legendre transform: brute grid sup of
// t*y - log E[rho^t] over a wide bracket.
double rate_grid(const EnvDistribution& d, double y) {
  double best = -1e300;
  for (double t = 0.0; t <= 64.0; t += 1e-4)
    best = std::max(best, t * y - d.log_mgf(t));
  return best;
}

}  // namespace

TEST_CASE("two-point law q=0.3 satisfies all standing assumptions") {
  auto d = q_dist(0.3);
  auto rep = check_assumptions(d);
  CHECK(rep.uniformly_elliptic);
  CHECK(rep.transient_right);
  CHECK(rep.has_kappa);
  CHECK(rep.kappa_in_unit_interval);
  CHECK(rep.all_hold());
  // E[log rho] = 0.3 ln 3 - 0.7 ln 3 = -0.4 ln 3
  CHECK(rep.mean_log_rho == doctest::Approx(-0.4 * std::log(3.0)).epsilon(1e-12));
  REQUIRE(rep.span.has_value());
  CHECK(*rep.span == doctest::Approx(std::log(3.0)).epsilon(1e-9));
}

TEST_CASE("root of E[rho^t]=1 matches the closed form for the 1/4:3/4 family") {
  // For omega in {1/4, 3/4}, rho in {3, 1/3} and the positive root solves
  // q*u^2 - u + (1-q) = 0 with u = 3^t, so t = log((1-q)/q)/log 3.
  for (double q : {0.28, 0.3, 0.35, 0.4}) {
    auto d = q_dist(q);
    auto sol = solve_kappa(d);
    double closed = std::log((1.0 - q) / q) / std::log(3.0);
    CHECK(std::abs(sol.kappa - closed) < 1e-10);
    CHECK(sol.residual < 1e-10);
    CHECK(sol.in_unit_interval);
  }
  CHECK(solve_kappa(q_dist(0.3)).kappa == doctest::Approx(0.7712437).epsilon(1e-6));
}

TEST_CASE("root above 1 is found and flagged for q=0.2") {
  auto sol = solve_kappa(q_dist(0.2));
  CHECK(sol.kappa == doctest::Approx(std::log(4.0) / std::log(3.0)).epsilon(1e-10));
  CHECK_FALSE(sol.in_unit_interval);
}

TEST_CASE("no positive root exists when every site drifts the same way") {
  // Constant omega = 0.7: rho = 3/7 < 1 everywhere.
  EnvDistribution d({{0.7, 1.0}}, 0.25);
  CHECK_THROWS_AS(solve_kappa(d), NoKappa);
  auto rep = check_assumptions(d);
  CHECK(rep.transient_right);
  CHECK_FALSE(rep.has_kappa);
}

TEST_CASE("half of the root minimizes the moment curve for this family") {
  auto d = q_dist(0.3);
  double kappa = solve_kappa(d).kappa;
  auto se = sub_exponent(d, kappa);
  CHECK(se.kappa0 == doctest::Approx(kappa / 2.0).epsilon(1e-15));
  // For the symmetric two-point family the minimum of t -> E[rho^t] sits
  // exactly at kappa/2 with value 2*sqrt(q(1-q)).
  CHECK(se.v0 == doctest::Approx(2.0 * std::sqrt(0.21)).epsilon(1e-12));
  CHECK(se.v0 < 1.0);
  double grid_min = 1e300;
  for (double t = 0.0; t <= kappa; t += 1e-5)
    grid_min = std::min(grid_min, d.moment_rho(t));
  CHECK(se.v0 == doctest::Approx(grid_min).epsilon(1e-8));
}

TEST_CASE("log moment generating function hand values") {
  auto d = q_dist(0.3);
  CHECK(d.log_mgf(0.0) == doctest::Approx(0.0).epsilon(1e-15));
  // E[rho^1] = 0.3*3 + 0.7/3 = 17/15
  CHECK(d.log_mgf(1.0) == doctest::Approx(std::log(17.0 / 15.0)).epsilon(1e-12));
  // Root property.
  double kappa = solve_kappa(d).kappa;
  CHECK(std::abs(d.moment_rho(kappa) - 1.0) < 1e-10);
  // Large t must not overflow: dominated by the rho=3 atom.
  CHECK(d.log_mgf(1000.0) ==
        doctest::Approx(1000.0 * std::log(3.0) + std::log(0.3)).epsilon(1e-9));
}

TEST_CASE("rate function: hand values, edge and domain") {
  auto d = q_dist(0.3);
  // I(0) = -log min_t E[rho^t] = -log(2 sqrt(0.21))
  CHECK(rate_function(d, 0.0) ==
        doctest::Approx(-std::log(2.0 * std::sqrt(0.21))).epsilon(1e-9));
  // At the top of the support the cost is -log(mass at max).
  CHECK(rate_function(d, std::log(3.0)) ==
        doctest::Approx(-std::log(0.3)).epsilon(1e-9));
  CHECK(std::isinf(rate_function(d, std::log(3.0) + 0.01)));
  CHECK_THROWS_AS(rate_function(d, -0.1), std::invalid_argument);
  // Monotone on [0, max log rho].
  double i0 = rate_function(d, 0.0);
  double i1 = rate_function(d, 0.1);
  double i2 = rate_function(d, 0.2);
  CHECK(i0 < i1);
  CHECK(i1 < i2);
  CHECK(i2 < rate_function(d, std::log(3.0)));
  // Independent grid sup agrees in the interior.
  CHECK(rate_function(d, 0.1) == doctest::Approx(rate_grid(d, 0.1)).epsilon(1e-6));
  CHECK(rate_function(d, 0.2) == doctest::Approx(rate_grid(d, 0.2)).epsilon(1e-6));
}

TEST_CASE("lattice span detection") {
  CHECK(*lattice_span(q_dist(0.3)) == doctest::Approx(std::log(3.0)).epsilon(1e-9));
  // Constant omega = 0.7: V walks on |log(3/7)| Z.
  EnvDistribution c({{0.7, 1.0}}, 0.25);
  CHECK(*lattice_span(c) == doctest::Approx(std::log(7.0 / 3.0)).epsilon(1e-9));
  // Mixing log rho = log 3 with log rho = 1 breaks the lattice.
  double w = 1.0 / (1.0 + std::exp(1.0));  // rho = e
  EnvDistribution nl({{0.25, 0.2}, {w, 0.2}, {0.75, 0.6}}, 0.2);
  CHECK_FALSE(lattice_span(nl).has_value());
}

TEST_CASE("malformed distributions are rejected") {
  CHECK_THROWS_AS(EnvDistribution({}, 0.25), InvalidDistribution);
  CHECK_THROWS_AS(EnvDistribution({{0.25, 0.5}, {0.75, 0.4}}, 0.25),
                  InvalidDistribution);
  CHECK_THROWS_AS(EnvDistribution({{0.0, 0.5}, {0.75, 0.5}}, 0.25),
                  InvalidDistribution);
  CHECK_THROWS_AS(EnvDistribution({{1.0, 1.0}}, 0.25), InvalidDistribution);
  CHECK_THROWS_AS(EnvDistribution({{0.5, 1.0}}, 0.6), InvalidDistribution);
  CHECK_THROWS_AS(EnvDistribution({{0.25, -0.1}, {0.75, 1.1}}, 0.25),
                  InvalidDistribution);
}

TEST_CASE("ellipticity flag reflects the declared margin") {
  // omega = 0.1 sits outside [0.25, 0.75]: structurally valid, flag off.
  EnvDistribution d({{0.1, 0.5}, {0.75, 0.5}}, 0.25);
  CHECK_FALSE(check_assumptions(d).uniformly_elliptic);
}

TEST_CASE("site marks are a pure function of (seed, x, law)") {
  auto d = q_dist(0.3);
  Environment e1(d, 12345), e2(d, 12345), e3(d, 54321);
  bool mismatch = false, differs = false;
  for (long long x = -2000; x <= 2000; ++x) {
    if (e1.omega(x) != e2.omega(x)) mismatch = true;
    if (e1.omega(x) != e3.omega(x)) differs = true;
  }
  CHECK_FALSE(mismatch);
  CHECK(differs);
  // log rho at a site is consistent with omega at the site.
  for (long long x : {-7LL, 0LL, 13LL}) {
    double r = (1.0 - e1.omega(x)) / e1.omega(x);
    CHECK(e1.log_rho_at(x) == doctest::Approx(std::log(r)).epsilon(1e-12));
  }
}

TEST_CASE("empirical mark frequencies match the law") {
  Environment env(q_dist(0.3), 12345);
  std::int64_t low = 0;
  const std::int64_t n = 1000000;
  for (std::int64_t x = 0; x < n; ++x)
    if (env.omega(x) == 0.25) ++low;
  double frac = static_cast<double>(low) / static_cast<double>(n);
  CHECK(std::abs(frac - 0.3) < 0.005);
}

TEST_CASE("constant law always yields its single mark") {
  EnvDistribution d({{0.7, 1.0}}, 0.25);
  Environment env(d, 99);
  for (long long x = -50; x <= 50; ++x) CHECK(env.omega(x) == 0.7);
}
