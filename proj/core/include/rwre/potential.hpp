#pragma once
// Potential of an environment: V(0) = 0 and V(x) - V(x-1) = log rho_x.
// A PotentialPath materializes V over a growable window [lo, hi] with
// compensated prefix sums; extending a side resumes from the stored
// summation state, so chunked growth reproduces a single pass bit for bit.
//
// On top of the path: ladder decomposition into excursions, the running
// rise functional and its first passage, the argmin before that passage,
// the last site left of the argmin that climbs a given height, and first
// entries of V into a level set on either side of the origin.

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rwre/env.hpp"
#include "rwre/stats.hpp"

namespace rwre {

// Hard window-cap overrun; soft exhaustion is signalled by optionals/flags.
struct WindowExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class PotentialPath {
 public:
  explicit PotentialPath(Environment env) : env_(std::move(env)) {}

  static PotentialPath build(const Environment& env, long lo, long hi) {
    PotentialPath p(env);
    p.ensure(lo, hi);
    return p;
  }

  void extend_right(long new_hi);
  void extend_left(long new_lo);
  void ensure(long lo, long hi) {
    extend_left(lo);
    extend_right(hi);
  }

  long lo() const noexcept { return -static_cast<long>(left_.size()); }
  long hi() const noexcept { return static_cast<long>(right_.size()); }

  double v(long x) const {
    if (x == 0) return 0.0;
    if (x > 0) {
      if (x > hi()) throw WindowExhausted("potential window right edge");
      return right_[static_cast<std::size_t>(x - 1)];
    }
    if (x < lo()) throw WindowExhausted("potential window left edge");
    return left_[static_cast<std::size_t>(-x - 1)];
  }

  const Environment& env() const noexcept { return env_; }

 private:
  Environment env_;
  std::vector<double> right_;  // V(1) .. V(hi)
  std::vector<double> left_;   // V(-1) .. V(lo)
  NeumaierSum right_state_;    // sum of log rho_k, k = 1..hi
  NeumaierSum left_state_;     // sum of -log rho_k consumed going left
};

// Excursions between successive ladder epochs: e_0 = 0 and e_{i+1} is the
// first k > e_i with V(k) <= V(e_i) (strict: <).  heights[i] is the max of
// V - V(e_i) over [e_i, e_{i+1}].
struct LadderDecomposition {
  std::vector<long> epochs;
  std::vector<double> heights;
  bool strict = false;
  bool exhausted = false;  // window ended before the requested excursion count
};

// n_excursions = 0 scans the whole window.
LadderDecomposition ladder(const PotentialPath& path, std::size_t n_excursions,
                           bool strict);

// Running rise max_{0<=i<=j<=x} (V(j) - V(i)); quadratic scan, test oracle.
double rise_at(const PotentialPath& path, long x);

struct AscentPoint {
  long t_up = 0;        // first x >= 0 whose running rise reaches h
  long m1 = 0;          // leftmost argmin of V over [0, t_up]
  double v_min = 0.0;   // V(m1)
  double v_top = 0.0;   // V(t_up)
};

// First passage of the running rise to level h; nullopt when the window
// ends first.  h <= 0 returns the origin.
std::optional<AscentPoint> first_ascent(const PotentialPath& path, double h);

// Largest x <= m1 with V(x) - V(m1) >= y; nullopt when no such site lies
// inside the window (the caller grows the window or treats it as "none").
std::optional<long> left_ascent(const PotentialPath& path, long m1, double y);

// Level sets for first-entry scans.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false, hi_open = false;

  static Interval at_least(double h) { return {h, std::numeric_limits<double>::infinity(), false, false}; }
  static Interval below(double x0) { return {-std::numeric_limits<double>::infinity(), x0, false, true}; }
  static Interval at_most(double x0) { return {-std::numeric_limits<double>::infinity(), x0, false, false}; }

  bool contains(double v) const noexcept {
    if (lo_open ? v <= lo : v < lo) return false;
    if (hi_open ? v >= hi : v > hi) return false;
    return true;
  }
};

enum class Side { Right, Left };

// min{x >= 1 : V(s*x) in A} with s = +1 (Right) or -1 (Left), scanning to
// the window edge; nullopt when the window ends before entry.
std::optional<long> hit_level_set(const PotentialPath& path, Side side,
                                  const Interval& a);

// Rows "x,V(x)" over [lo, hi].
void dump_csv(const PotentialPath& path, std::ostream& os, long lo, long hi);

}  // namespace rwre
