#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "rwre/rng.hpp"
#include "rwre/stats.hpp"

using namespace rwre;

TEST_CASE("compensated sum recovers what naive addition loses") {
  // Naive left-to-right addition of these four terms yields 0.
  NeumaierSum s;
  s.add(1.0);
  s.add(1e100);
  s.add(1.0);
  s.add(-1e100);
  CHECK(s.value() == 2.0);

  double naive = 0.0;
  for (double v : {1.0, 1e100, 1.0, -1e100}) naive += v;
  CHECK(naive == 0.0);
}

TEST_CASE("compensated sum is chunk-invariant") {
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> xs(4096);
  for (auto& x : xs) x = u(g);
  NeumaierSum one_pass;
  for (double x : xs) one_pass.add(x);
  // Resume from a saved (sum, compensation) state mid-stream.
  NeumaierSum first;
  for (int i = 0; i < 1000; ++i) first.add(xs[i]);
  NeumaierSum resumed(first.raw_sum(), first.compensation());
  for (int i = 1000; i < 4096; ++i) resumed.add(xs[i]);
  CHECK(one_pass.value() == resumed.value());
  CHECK(one_pass.raw_sum() == resumed.raw_sum());
}

TEST_CASE("running moments match closed forms") {
  MeanVar mv;
  for (int i = 1; i <= 5; ++i) mv.add(i);
  CHECK(mv.mean() == doctest::Approx(3.0));
  CHECK(mv.variance() == doctest::Approx(2.5));
  CHECK(mv.se() == doctest::Approx(std::sqrt(2.5 / 5.0)));
}

TEST_CASE("binomial standard error") {
  CHECK(binomial_se(0.5, 100) == doctest::Approx(0.05));
  CHECK(binomial_se(0.0, 100) == 0.0);
  CHECK(binomial_se(0.2, 0) == 0.0);
}

TEST_CASE("KS accepts equal laws and rejects a shift") {
  CounterRng g(derive_key(42, kRoleOracle));
  auto draw = [&](double shift) {
    std::vector<double> v(4000);
    for (auto& x : v) {
      // sum of 8 uniforms, roughly normal
      double s = 0;
      for (int i = 0; i < 8; ++i) s += g.next_u01();
      x = s + shift;
    }
    return v;
  };
  auto a = draw(0.0), b = draw(0.0), c = draw(0.5);
  auto same = ks_two_sample(a, b);
  CHECK(same.p_value > 0.01);
  auto diff = ks_two_sample(a, c);
  CHECK(diff.p_value < 1e-6);
  CHECK(diff.d > same.d);
}

TEST_CASE("KS distance is exact on a hand case") {
  // F puts mass at {1,2}, G at {2,3}: sup gap is 1/2 at x=1 and 5/2.
  std::vector<double> a{1, 1, 2, 2}, b{2, 2, 3, 3};
  CHECK(ks_two_sample(a, b).d == doctest::Approx(0.5));
}

TEST_CASE("Kolmogorov tail endpoints") {
  CHECK(kolmogorov_q(0.0) == 1.0);
  CHECK(kolmogorov_q(10.0) < 1e-30);
  // Classical table point: Q(1.36) is close to 0.05.
  CHECK(kolmogorov_q(1.36) == doctest::Approx(0.049).epsilon(0.05));
}

TEST_CASE("upper incomplete gamma against known values") {
  // Q(1, x) = exp(-x); Q(1/2, x) = erfc(sqrt(x)).
  CHECK(gamma_q(1.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-10));
  CHECK(gamma_q(0.5, 1.0) == doctest::Approx(std::erfc(1.0)).epsilon(1e-10));
  CHECK(gamma_q(3.0, 0.0) == 1.0);
  // chi-square df=2: survival at its mean is exp(-1).
  CHECK(gamma_q(1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
}

TEST_CASE("chi-square goodness of fit calibrates on its own law") {
  // Uniform counts over 10 bins, 10000 draws.
  CounterRng g(derive_key(43, kRoleOracle));
  std::vector<double> obs(10, 0.0), exp(10, 1000.0);
  for (int i = 0; i < 10000; ++i) obs[g() % 10] += 1.0;
  auto r = chi_square_gof(obs, exp);
  CHECK(r.df == 9);
  CHECK(r.p_value > 0.001);
  // A lopsided observation must reject.
  std::vector<double> bad(10, 500.0);
  bad[0] = 5500.0;
  CHECK(chi_square_gof(bad, exp).p_value < 1e-12);
}

TEST_CASE("chi-square pools sparse bins") {
  std::vector<double> obs{3, 2, 995, 1000};
  std::vector<double> exp{2.5, 2.5, 995, 1000};
  auto r = chi_square_gof(obs, exp);
  CHECK(r.df == 2);  // first two bins pooled
  CHECK(r.p_value > 0.5);
}

TEST_CASE("least squares line on exact data") {
  std::vector<double> xs{1, 2, 3, 4}, ys{3, 5, 7, 9};  // y = 2x + 1
  auto f = linear_fit(xs, ys);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("correlation endpoints") {
  std::vector<double> xs{1, 2, 3, 4, 5};
  std::vector<double> up{2, 4, 6, 8, 10}, down{5, 4, 3, 2, 1};
  CHECK(pearson_corr(xs, up) == doctest::Approx(1.0));
  CHECK(pearson_corr(xs, down) == doctest::Approx(-1.0));
}

TEST_CASE("counter rng: draws are pure functions of (key, index)") {
  CounterRng a(derive_key(7, kRoleWalker, 0));
  CounterRng b(derive_key(7, kRoleWalker, 0));
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  // at() matches sequential draws without advancing.
  CounterRng c(derive_key(7, kRoleWalker, 0));
  CHECK(c.at(1) == b.at(1));
  CounterRng d(derive_key(7, kRoleWalker, 1));
  bool differs = false;
  for (int i = 0; i < 16; ++i) differs |= (a() != d());
  CHECK(differs);
}

TEST_CASE("counter rng uniforms look uniform") {
  CounterRng g(derive_key(11, kRoleOracle, 5));
  double s = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) s += g.next_u01();
  CHECK(std::abs(s / n - 0.5) < 0.003);
}
