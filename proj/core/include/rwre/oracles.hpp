#pragma once
// Exact and independent cross-checks for the stochastic machinery.
//
// Everything here either solves the quenched chain exactly (linear algebra
// on a finite interval, closed-form exit probabilities, stationary vectors)
// or re-derives a quantity by a route that shares no code with the module
// it checks (rejection-sampled reference laws, direct increment sampling,
// calibration runs).  Tests compare the two routes; the simulation side is
// never trusted on its own word.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rwre/env.hpp"
#include "rwre/potential.hpp"
#include "rwre/stats.hpp"
#include "rwre/walker.hpp"

namespace rwre {

struct InsufficientTail : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RejectionBudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// P^b[tau(c) < tau(a)] from the potential:
//   sum_{k=a}^{b-1} e^{V(k)} / sum_{k=a}^{c-1} e^{V(k)},
// evaluated with the max exponent factored out and each sum taken in
// ascending order of magnitude under compensation.  Requires a <= b <= c,
// a < c; the window must cover [a, c-1].
double exit_prob_exact(const PotentialPath& path, long a, long b, long c);

// Same probability from the harmonic equations
//   u(x) = omega_x u(x+1) + (1 - omega_x) u(x-1),  u(a) = 0, u(c) = 1,
// solved by a tridiagonal elimination in long double.  No potential used.
double exit_prob_bruteforce(const Environment& env, long a, long b, long c);

struct ExitTimeResult {
  double value = 0.0;       // E^b[tau(a) /\ tau(c)], tridiagonal solve
  double bound_rise = 0.0;  // eps0^{-1}(c-a)^2 exp max{V(k)-V(l): a<=l<=k<=c-1, k>=b}
  double bound_drop = 0.0;  // eps0^{-1}(c-a)^2 exp max{V(l)-V(k): a<=l<=k<=c-1, l<=b-1}
};

// Expected exit time of (a, c) from b, plus the two reflection-argument
// upper bounds it must respect.
ExitTimeResult expected_exit_time(const Environment& env,
                                  const PotentialPath& path, long a, long b,
                                  long c);

struct ExitMcResult {
  double freq_right = 0.0;  // fraction of runs exiting at c
  double se_right = 0.0;
  double time_mean = 0.0;   // mean exit time across runs
  double time_se = 0.0;
  std::uint64_t n_runs = 0;
};

// Monte Carlo exit statistics using the walker step streams; run r uses
// run_id = base_run_id + r.
ExitMcResult mc_exit(const Environment& env, long a, long b, long c,
                     std::uint64_t n_runs, std::uint64_t base_run_id);

struct ConfinementBound {
  double right = 0.0;  // k * exp(min_{[b,c-1]} V - V(c-1)) >= P^b[tau(c) < k]
  double left = 0.0;   // k * exp(min_{[a,b-1]} V - V(a))   >= P^b[tau(a) < k]
};

// Short-horizon escape bounds from the potential barriers on either side
// of b.  Requires a < b < c and window coverage of [a, c-1].
ConfinementBound confinement_bounds(const PotentialPath& path, long a, long b,
                                    long c, std::uint64_t k);

// Fraction of n runs from b that sit on `target` at some time < k.
double mc_hit_before(const Environment& env, long b, long target,
                     std::uint64_t k, std::uint64_t n_runs,
                     std::uint64_t base_run_id);

// Stationary vector of the one-step reflected chain on [a, c]: dense
// elimination on pi P = pi with the mass constraint replacing one
// equation.  Valid for the periodic chain, where power iteration is not.
// Returned vector is indexed by x - a.
std::vector<double> stationary_bruteforce(const ReflectedEnv& renv);

struct InvariantSumRow {
  double mean = 0.0;
  double se = 0.0;
  std::uint64_t n = 0;
};

struct InvariantSumReport {
  InvariantSumRow right;       // sum_{m1 <= x <= t_up} e^{-(V(x)-V(m1))}
  InvariantSumRow left;        // sum over the left climb, when it exists
  double cond_freq = 0.0;      // fraction of replicates with the left event
  std::uint64_t n_total = 0;
  std::uint64_t n_exhausted = 0;
  double c2_hat = 0.0;         // max of the two means
};

// Annealed means of the invariant-measure building sums around a fresh
// ascent of height h.  The left sum is conditional on the climb crossing
// h before the potential returns to its minimum level.
InvariantSumReport invariant_sum_check(const EnvDistribution& dist, double h,
                                       std::uint64_t n_samples,
                                       std::uint64_t seed);

struct TailFit {
  double kappa_hat = 0.0;
  double c_lo = 0.0, c_hi = 0.0;  // envelope constants on the fit range
  double h_min = 0.0, h_max = 0.0;
  std::size_t n_points = 0;
  double span = 0.0;              // grid pitch used; 0 for a continuous grid
};

// Fits log P[H >= h] = log C - kappa h over a grid of levels.  Points keep
// at least 50 exceedances; lattice-valued samples snap to multiples of
// `lattice_hint`, starting at 2 * hint to dodge pre-asymptotic curvature.
// Throws InsufficientTail below 5 usable grid points.
TailFit tail_fit(std::vector<double> samples, double lattice_hint = 0.0);

struct AscentTimeRow {
  double h = 0.0;
  double mean = 0.0;       // mean steps for the 0-reflected walker to reach
  double se = 0.0;         // t_up(h) - 1
  std::uint64_t n = 0;
  std::uint64_t n_capped = 0;
};

struct AscentTimeCalibration {
  std::vector<AscentTimeRow> rows;
  double c0_hat = 0.0;  // max over rows of mean / e^h
};

// Annealed first-passage times to the ascent point, walker reflected at
// the origin.  Calibrates the constant in the e^h growth of that time.
AscentTimeCalibration first_ascent_time_calibration(
    const EnvDistribution& dist, const std::vector<double>& hs,
    std::uint64_t n_runs, std::uint64_t seed, std::uint64_t step_cap);

struct LawSide {
  std::array<KsResult, 3> ks;  // length, terminal value, running max
  std::uint64_t n = 0;
  double accept_rate = 0.0;    // reference-sampler acceptance
};

struct ConditionedLawReport {
  LawSide left, right;
  double joint_corr = 0.0;  // corr(left length, right length)
  std::uint64_t n_joint = 0;
  double cond_freq = 0.0;   // fraction of environments with the left event
};

// Compares the potential around a height-h ascent against rejection-sampled
// i.i.d.-increment walks.  Right of the argmin: the walk conditioned to
// cross h before going strictly below 0 (touching 0 allowed).  Left of the
// argmin: conditioned to cross h before reaching 0 or below.  Three
// functionals per side enter two-sample KS tests.  ref_h_offset shifts the
// reference level only; a nonzero offset is the rejection control.
ConditionedLawReport conditioned_law_tests(const EnvDistribution& dist,
                                           double h, std::uint64_t n_per_side,
                                           std::uint64_t seed,
                                           double ref_h_offset = 0.0);

struct LdRow {
  std::uint64_t k = 0;
  double y = 0.0;
  double freq = 0.0;   // empirical P[V(k) >= k y]
  double se = 0.0;
  double bound = 0.0;  // e^{-k I(y)}
  bool ok = false;     // exceedance count within the 4-sigma band the bound allows
};

// Direct increment-sampling check of the upper large deviation bound for
// the potential, across a (k, y) grid.
std::vector<LdRow> ld_bound_check(const EnvDistribution& dist,
                                  const std::vector<std::uint64_t>& ks,
                                  const std::vector<double>& ys,
                                  std::uint64_t n_samples, std::uint64_t seed);

}  // namespace rwre
