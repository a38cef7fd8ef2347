#include "rwre/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rwre {

void MeanVar::add(double v) noexcept {
  ++n_;
  double d = v - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (v - mean_);
}

double MeanVar::variance() const noexcept {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double MeanVar::se() const noexcept {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

double binomial_se(double p_hat, std::uint64_t n) noexcept {
  if (n == 0) return 0.0;
  double v = p_hat * (1.0 - p_hat) / static_cast<double>(n);
  return v > 0 ? std::sqrt(v) : 0.0;
}

double kolmogorov_q(double lambda) noexcept {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  double l2 = lambda * lambda;
  for (int j = 1; j <= 100; ++j) {
    double term = sign * std::exp(-2.0 * j * j * l2);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum) || std::abs(term) < 1e-300) break;
    sign = -sign;
  }
  double q = 2.0 * sum;
  return std::min(1.0, std::max(0.0, q));
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  KsResult r;
  r.n = a.size();
  r.m = b.size();
  if (a.empty() || b.empty()) return r;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  r.d = d;
  double ne = na * nb / (na + nb);
  double sqn = std::sqrt(ne);
  r.p_value = kolmogorov_q((sqn + 0.12 + 0.11 / sqn) * d);
  return r;
}

namespace {

double gamma_q_series(double a, double x) {
  // P(a,x) by series, return Q = 1 - P.
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 1; n <= 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  double lg = std::lgamma(a);
  return 1.0 - sum * std::exp(-x + a * std::log(x) - lg);
}

double gamma_q_contfrac(double a, double x) {
  // Q(a,x) by Lentz continued fraction.
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  double lg = std::lgamma(a);
  return std::exp(-x + a * std::log(x) - lg) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("gamma_q: a must be positive");
  if (x < 0.0) throw std::invalid_argument("gamma_q: x must be nonnegative");
  if (x == 0.0) return 1.0;
  double q = (x < a + 1.0) ? gamma_q_series(a, x) : gamma_q_contfrac(a, x);
  return std::min(1.0, std::max(0.0, q));
}

ChiSquareResult chi_square_gof(const std::vector<double>& observed,
                               const std::vector<double>& expected,
                               double min_expected) {
  if (observed.size() != expected.size())
    throw std::invalid_argument("chi_square_gof: size mismatch");
  // Pool consecutive bins until each pooled expected count is large enough.
  std::vector<double> obs, exp;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o_acc += observed[i];
    e_acc += expected[i];
    if (e_acc >= min_expected) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (!exp.empty()) {
      obs.back() += o_acc;
      exp.back() += e_acc;
    } else {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
    }
  }
  ChiSquareResult r;
  if (exp.size() < 2) {
    r.df = 0;
    r.p_value = 1.0;
    return r;
  }
  double stat = 0.0;
  for (std::size_t i = 0; i < exp.size(); ++i) {
    double d = obs[i] - exp[i];
    stat += d * d / exp[i];
  }
  r.stat = stat;
  r.df = exp.size() - 1;
  r.p_value = gamma_q(static_cast<double>(r.df) / 2.0, stat / 2.0);
  return r;
}

LineFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("linear_fit: need two or more paired points");
  double n = static_cast<double>(xs.size());
  NeumaierSum sx, sy;
  for (double x : xs) sx.add(x);
  for (double y : ys) sy.add(y);
  double mx = sx.value() / n, my = sy.value() / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissa");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

double pearson_corr(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("pearson_corr: need two or more paired points");
  double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace rwre
