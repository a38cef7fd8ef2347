#pragma once
// Walkers in a fixed environment.  Each walker steps +1 with probability
// omega(x), -1 otherwise.  Step draws are counter-indexed by time on a
// per-(run, walker, role) key, so draw t of one walker never depends on
// who else is being simulated; this is what makes the coupled companion
// walker provably invisible to the primary walker's trajectory.
//
// The reflected companion chain lives on [a, c] with a forced right step
// at a and a forced left step at c; its invariant measure has the closed
// form mu(a) = e^{-V(a)}, mu(c) = e^{-V(c-1)},
// mu(x) = e^{-V(x)} + e^{-V(x-1)} inside (anchored at V(b)), and the
// two-step chain preserves its parity-restricted normalization nu.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rwre/env.hpp"
#include "rwre/potential.hpp"

namespace rwre {

struct ParityMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DegenerateInterval : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::uint64_t kNever = ~0ull;

// Key for a walker's step stream; draw at time t is CounterRng::at(t+1).
std::uint64_t walker_step_key(std::uint64_t master_seed, std::uint64_t run_id,
                              std::uint64_t walker_idx);

// Positions after steps 1..horizon (index t-1 holds the position at time t).
std::vector<long> simulate_path(const Environment& env, long start,
                                std::uint64_t horizon, std::uint64_t step_key);

struct Meeting {
  std::uint64_t time;
  long site;
};

struct EnsembleConfig {
  std::vector<long> starts;            // one per walker, all same parity
  std::uint64_t horizon = 0;
  std::uint64_t checkpoint_stride = 0; // 0 = no checkpoints
  std::size_t meeting_log_cap = 1u << 20;
};

struct EnsembleResult {
  std::vector<Meeting> meetings;  // times when all walkers coincide
  std::uint64_t n_meetings = 0;   // total count even past the log cap
  std::vector<long> finals;
  long min_site = 0, max_site = 0;
  std::vector<std::pair<std::uint64_t, std::vector<long>>> checkpoints;
};

// Runs all walkers synchronously for `horizon` steps; logs every time at
// which all of them share a site (including time 0).
EnsembleResult run_walkers(const Environment& env, const EnsembleConfig& cfg,
                           std::uint64_t run_id);

// Steps until the walker first sits on `target`; nullopt if `cap` steps
// pass first.
std::optional<std::uint64_t> hitting_time(const Environment& env, long start,
                                          long target, std::uint64_t cap,
                                          std::uint64_t run_id);

// Environment with the two-sided reflection on [a, c].
class ReflectedEnv {
 public:
  ReflectedEnv(const Environment& base, long a, long c) : base_(&base), a_(a), c_(c) {
    if (c - a < 2) throw DegenerateInterval("reflection needs c - a >= 2");
  }
  double omega(long long x) const noexcept {
    if (x <= a_) return 1.0;
    if (x >= c_) return 0.0;
    return base_->omega(x);
  }
  long a() const noexcept { return a_; }
  long c() const noexcept { return c_; }

 private:
  const Environment* base_;
  long a_, c_;
};

struct InvariantMeasure {
  long a = 0, b = 0, c = 0;
  std::vector<double> mu;          // mu[x - a], anchored by e^{+V(b)}
  std::vector<long> class_sites;   // sites of the parity class of b, ascending
  std::vector<double> nu;          // normalized mu restricted to that class
  double nu_b = 0.0;
  double class_total = 0.0;        // pre-normalization class mass

  double mu_at(long x) const { return mu[static_cast<std::size_t>(x - a)]; }
  double nu_at(long x) const;      // 0 off the class
  long sample_class(double u) const;  // inverse CDF over class_sites
};

// Requires a < b < c.  b is only an anchor for the exponentials; any site
// of the interval gives the same measure up to one scale factor.
InvariantMeasure reflected_invariant_measure(const PotentialPath& path, long a,
                                             long b, long c);

struct CouplingResult {
  std::uint64_t tau_meet = kNever;
  std::uint64_t tau_exit = kNever;
  long s_start = 0, shat_start = 0;
  long s_final = 0, shat_final = 0;
  bool parity_ok = true;     // S - S_hat stayed in one parity class
  bool no_cross_ok = true;   // sign of S_hat - S only changed through 0
  bool glue_ok = true;       // equality held from tau_meet to tau_exit
  bool hat_in_range_ok = true;
  std::vector<long> s_path, shat_path;  // filled when record_paths
};

// Companion construction: S starts at b with the plain environment, S_hat
// starts from nu and obeys the reflection on [a, c].  They move
// independently until they first share a site, then S_hat shadows S until
// S leaves [a, c], then they move independently again (fresh stream).
CouplingResult couple(const Environment& env, const InvariantMeasure& im,
                      std::uint64_t horizon, std::uint64_t run_id,
                      bool record_paths = false);

struct OccupationEstimate {
  std::uint64_t at_step = 0;
  double p_hat = 0.0;
  double se = 0.0;
  std::uint64_t n_runs = 0;
};

// Monte Carlo P[S_{at_step} = site | S_0 = start], one estimate per
// requested step, all steps served by the same trajectories.  Steps must
// match the parity of site - start.
std::vector<OccupationEstimate> occupation_probability(
    const Environment& env, long start, long site,
    const std::vector<std::uint64_t>& at_steps, std::uint64_t n_runs,
    std::uint64_t base_run_id);

}  // namespace rwre
