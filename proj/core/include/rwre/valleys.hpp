#pragma once
// Valley census over a potential path.  A schedule fixes target depths
// f_i and slacks z_i from a super-factorial site budget N_i; valley i is
// the first excursion after valley i-1 whose height reaches f_i, and its
// anatomy [a, alpha, b, gamma, c] brackets the bottom b by climb sites at
// depths f+z, f/2 on the left and f/2, f+z on the right.  Six per-valley
// events grade how regular the valley is; the deep-index selector walks
// the flagged census and emits a sparse subsequence with a polynomial
// growth floor.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "rwre/potential.hpp"

namespace rwre {

struct ValleySchedule {
  double epsilon = 0.0;  // must lie in (0, (1-kappa)/(2 kappa))
  double kappa = 0.0;
  double c0 = 1.0;       // budget scale in N_i
  double c2 = 1.0;       // invariant-sum scale (event 5 threshold is 7*c2)
  double c4 = 0.0;       // width scale (event 3 threshold is c4*(f+z))
};

// Validates the epsilon range; c4 defaults to 1.05 * 2(kappa+kappa0)/|log v0|,
// the smallest admissible width constant with a 5% margin.
ValleySchedule make_schedule(const EnvDistribution& dist, double epsilon,
                             double c0 = 1.0, double c2 = 1.0,
                             std::optional<double> c4 = std::nullopt);

struct ScheduleEntry {
  long i = 0;
  double n_real = 0.0;      // c0 * i^(1+eps) * (i!)^((1+eps)/kappa)
  std::uint64_t n = 0;      // floor(n_real), valid when n_fits
  bool n_fits = false;      // floor representable and trustworthy (< 2^62)
  double log_n = 0.0;       // log of the floored budget when it fits
  double f = 0.0;           // depth target log(N_i/c0) - (1+eps) log i
  double z = 0.0;           // slack (log i)/kappa
};

ScheduleEntry schedule_entry(const ValleySchedule& sched, long i);

struct ValleyRecord {
  long i = 0;
  long sigma = 0;           // excursion index whose height reaches f_i
  long prev_end = 0;        // epoch e_{sigma(i-1)+1}, left cap for a/alpha
  long excursion_end = 0;   // epoch e_{sigma+1}
  long a = 0, alpha = 0, b = 0, gamma = 0, c = 0;
  std::optional<long> beta_minus, beta_plus;  // climb sites at depth f
  double v_b = 0.0;         // V(b)
  double height = 0.0;      // excursion height H_sigma
  bool a_capped = false;    // a fell back to prev_end (no climb site found)
  bool alpha_capped = false;
  bool c_capped = false;    // c fell back to excursion_end - 1
  bool degenerate = false;  // f_i <= 0: thresholds collapse, anatomy unreliable
  ScheduleEntry sched;
};

// Locate valleys i = 1..i_max along the ladder; returns the prefix it
// could complete before the window or the ladder ran out (soft).
std::vector<ValleyRecord> locate_valleys(const PotentialPath& path,
                                         const LadderDecomposition& lad,
                                         const ValleySchedule& sched, long i_max);

struct OmegaFlags {
  bool uncapped_left = false;   // 1: a is a genuine climb site
  bool ascent_window = false;   // 2: b <= T(f_i)-1 <= i*exp(kappa f_i)
  bool narrow = false;          // 3: c - a <= c4*(f_i+z_i)
  bool shoulders_high = false;  // 4: V > V(b)+f_i/4 on ]a,c[ outside ]alpha,gamma[
  bool small_sum = false;       // 5: sum_{alpha..gamma} e^{-(V-V(b))} < 7*c2
  bool extra_deep = false;      // 6: H_sigma >= f_i + z_i
  double invariant_sum = 0.0;   // the event-5 sum
  double whole_sum = 0.0;       // same sum over [a, c] (diagnostic)

  // Regularity required of every index past i0: events 1-3 plus
  // (4 or not-6).
  bool regular() const {
    return uncapped_left && ascent_window && narrow &&
           (shoulders_high || !extra_deep);
  }
  // Membership test for the deep subsequence: events 5 and 6.
  bool member() const { return small_sum && extra_deep; }
};

OmegaFlags omega_events(const PotentialPath& path, const ValleyRecord& rec,
                        const ValleySchedule& sched);

struct DeepValleyIndex {
  std::vector<long> indices;  // i(0), i(1), ... in order
  long i0 = 0;                // largest examined index whose regularity failed
  double exponent = 0.0;      // (1+eps)/(1/kappa - 1 - 3 eps/2)
  bool exhausted = false;     // census ended before n_max+1 picks
};

// Selects i(n), n = 0..n_max: members (events 5 and 6) past i0, with
// i(n) >= max(i(n-1)+1, n, n^exponent).
DeepValleyIndex deep_valley_indices(const std::vector<ValleyRecord>& recs,
                                    const std::vector<OmegaFlags>& flags,
                                    const ValleySchedule& sched, long n_max);

// One row per valley: i,sigma,a,alpha,b,gamma,c,height,N_i,f_i,z_i,flags.
void valleys_csv(std::ostream& os, const std::vector<ValleyRecord>& recs,
                 const std::vector<OmegaFlags>& flags);

}  // namespace rwre
