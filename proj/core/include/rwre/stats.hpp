#pragma once
// Small statistics kit shared by the oracles and the harness: compensated
// summation, running moments, two-sample Kolmogorov-Smirnov, chi-square
// goodness of fit, least-squares line fit.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rwre {

// Neumaier variant of Kahan summation.  Streamed adds give bitwise the
// same (sum, compensation) state as a single pass over the same terms.
class NeumaierSum {
 public:
  constexpr NeumaierSum() = default;
  constexpr NeumaierSum(double sum, double comp) : sum_(sum), comp_(comp) {}

  constexpr void add(double v) noexcept {
    double t = sum_ + v;
    if ((sum_ >= v ? sum_ : -sum_) >= (v >= 0 ? v : -v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }

  constexpr double value() const noexcept { return sum_ + comp_; }
  constexpr double raw_sum() const noexcept { return sum_; }
  constexpr double compensation() const noexcept { return comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Welford running mean / variance.
class MeanVar {
 public:
  void add(double v) noexcept;
  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept;  // sample variance (n-1)
  double se() const noexcept;        // standard error of the mean

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Standard error of a binomial frequency estimate p_hat over n trials.
double binomial_se(double p_hat, std::uint64_t n) noexcept;

struct KsResult {
  double d = 0.0;       // sup-distance between empirical CDFs
  double p_value = 1.0; // asymptotic, with small-sample correction
  std::size_t n = 0, m = 0;
};

// Two-sample KS.  Inputs need not be sorted.  For lattice-valued data the
// asymptotic p-value is conservative, which is the safe direction for the
// equality-in-law checks here.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// One-sided tail of the Kolmogorov distribution, Q(lambda).
double kolmogorov_q(double lambda) noexcept;

struct ChiSquareResult {
  double stat = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
};

// Goodness of fit of observed counts against expected counts (same total).
// Bins with expected < min_expected are pooled into their neighbour.
ChiSquareResult chi_square_gof(const std::vector<double>& observed,
                               const std::vector<double>& expected,
                               double min_expected = 5.0);

// Upper regularized incomplete gamma Q(a, x).
double gamma_q(double a, double x);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys);

double pearson_corr(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace rwre
