#pragma once
// Site-mark model for a nearest-neighbour walk on Z in an i.i.d. random
// environment.  A finite-support law assigns each site x a right-step
// probability omega_x; rho_x = (1 - omega_x)/omega_x drives everything
// downstream (drift sign, the annealed exponent kappa, the potential).
//
// Environments are lazy: omega_x is a pure function of
// (master_seed, x, distribution), so any window can be realized on demand
// and two consumers always agree on a site's mark.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwre/rng.hpp"

namespace rwre {

struct InvalidDistribution : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NoKappa : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EnvAtom {
  double omega;  // right-step probability at a site carrying this mark
  double mass;   // probability of the mark
};

class EnvDistribution {
 public:
  // Finite support; validates ellipticity against epsilon0 on construction.
  EnvDistribution(std::vector<EnvAtom> atoms, double epsilon0);

  static EnvDistribution two_point(double p_low, double p_high, double q,
                                   double epsilon0);

  const std::vector<EnvAtom>& atoms() const noexcept { return atoms_; }
  double epsilon0() const noexcept { return epsilon0_; }
  double log_rho(std::size_t i) const noexcept { return log_rho_[i]; }

  // Mark index for a uniform draw u in [0,1).
  std::size_t index_for(double u) const noexcept;
  double omega_for(double u) const noexcept { return atoms_[index_for(u)].omega; }

  double mean_log_rho() const noexcept { return mean_log_rho_; }
  double max_log_rho() const noexcept { return max_log_rho_; }
  double min_log_rho() const noexcept { return min_log_rho_; }

  // E[rho^t] and its log; exact finite sums.
  double moment_rho(double t) const noexcept;
  double log_mgf(double t) const noexcept;

  std::string describe() const;

 private:
  std::vector<EnvAtom> atoms_;
  std::vector<double> cdf_;
  std::vector<double> log_rho_;
  double epsilon0_;
  double mean_log_rho_;
  double min_log_rho_, max_log_rho_;
};

struct KappaSolution {
  double kappa = 0.0;               // positive root of E[rho^t] = 1
  bool in_unit_interval = false;    // kappa in (0,1)
  double residual = 0.0;            // |E[rho^kappa] - 1|
};

// Positive root of t -> E[rho^t] = 1.  Exists iff E[log rho] < 0 and some
// support point has rho > 1.  Throws NoKappa otherwise.
KappaSolution solve_kappa(const EnvDistribution& dist, double tol = 1e-13);

struct SubExponent {
  double kappa0 = 0.0;  // kappa/2 by convention
  double v0 = 0.0;      // E[rho^kappa0], must be < 1
};

SubExponent sub_exponent(const EnvDistribution& dist, double kappa);

// Legendre transform I(y) = sup_t [ t*y - log E[rho^t] ] for y >= 0.
// Returns +inf for y above max log rho; -log(mass at max) at the edge.
double rate_function(const EnvDistribution& dist, double y);

// Largest a > 0 with every log rho support point in a*Z (so V(n) lives on
// a*Z almost surely), when detectable; nullopt for non-lattice support.
std::optional<double> lattice_span(const EnvDistribution& dist);

struct AssumptionReport {
  bool uniformly_elliptic = false;  // support within [eps0, 1-eps0]
  bool transient_right = false;     // E[log rho] < 0
  bool has_kappa = false;           // positive root exists
  bool kappa_in_unit_interval = false;
  double mean_log_rho = 0.0;
  double kappa = 0.0;               // valid when has_kappa
  double kappa0 = 0.0, v0 = 0.0;    // valid when has_kappa
  std::optional<double> span;
  bool all_hold() const noexcept {
    return uniformly_elliptic && transient_right && kappa_in_unit_interval;
  }
};

AssumptionReport check_assumptions(const EnvDistribution& dist);

// Lazy i.i.d. environment: omega(x) derived by hashing (seed, x).
class Environment {
 public:
  Environment(EnvDistribution dist, std::uint64_t master_seed)
      : dist_(std::move(dist)),
        seed_(master_seed),
        env_key_(derive_key(master_seed, kRoleEnv)) {}

  double omega(long long x) const noexcept {
    return dist_.atoms()[mark(x)].omega;
  }
  double log_rho_at(long long x) const noexcept {
    return dist_.log_rho(mark(x));
  }
  std::size_t mark(long long x) const noexcept {
    return dist_.index_for(u01(mix64(env_key_ + zigzag(x) * kGolden)));
  }

  const EnvDistribution& dist() const noexcept { return dist_; }
  std::uint64_t master_seed() const noexcept { return seed_; }

 private:
  EnvDistribution dist_;
  std::uint64_t seed_;
  std::uint64_t env_key_;
};

}  // namespace rwre
