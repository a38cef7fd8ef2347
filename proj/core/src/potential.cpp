#include "rwre/potential.hpp"

#include <algorithm>
#include <ostream>

namespace rwre {

void PotentialPath::extend_right(long new_hi) {
  for (long k = hi() + 1; k <= new_hi; ++k) {
    right_state_.add(env_.log_rho_at(k));
    right_.push_back(right_state_.value());
  }
}

void PotentialPath::extend_left(long new_lo) {
  // V(x-1) = V(x) - log rho_x, walking down from the current lo.
  for (long x = lo(); x > new_lo; --x) {
    left_state_.add(-env_.log_rho_at(x));
    left_.push_back(left_state_.value());
  }
}

LadderDecomposition ladder(const PotentialPath& path, std::size_t n_excursions,
                           bool strict) {
  LadderDecomposition d;
  d.strict = strict;
  d.epochs.push_back(0);
  double base = path.v(0);
  double mx = base;
  for (long k = 1; k <= path.hi(); ++k) {
    double v = path.v(k);
    mx = std::max(mx, v);
    bool close = strict ? (v < base) : (v <= base);
    if (close) {
      d.heights.push_back(mx - base);
      d.epochs.push_back(k);
      base = v;
      mx = v;
      if (n_excursions != 0 && d.heights.size() >= n_excursions) return d;
    }
  }
  d.exhausted = n_excursions != 0;
  return d;
}

double rise_at(const PotentialPath& path, long x) {
  double best = 0.0;
  for (long i = 0; i <= x; ++i)
    for (long j = i; j <= x; ++j) best = std::max(best, path.v(j) - path.v(i));
  return best;
}

std::optional<AscentPoint> first_ascent(const PotentialPath& path, double h) {
  AscentPoint p;
  if (h <= 0.0) return p;  // rise 0 already at the origin
  double run_min = 0.0;
  long argmin = 0;
  double rise = 0.0;
  for (long x = 1; x <= path.hi(); ++x) {
    double v = path.v(x);
    rise = std::max(rise, v - run_min);
    if (rise >= h) {
      p.t_up = x;
      p.m1 = argmin;
      p.v_min = run_min;
      p.v_top = v;
      return p;
    }
    if (v < run_min) {  // leftmost argmin: strict improvement only
      run_min = v;
      argmin = x;
    }
  }
  return std::nullopt;
}

std::optional<long> left_ascent(const PotentialPath& path, long m1, double y) {
  double base = path.v(m1);
  for (long x = m1; x >= path.lo(); --x)
    if (path.v(x) - base >= y) return x;
  return std::nullopt;
}

std::optional<long> hit_level_set(const PotentialPath& path, Side side,
                                  const Interval& a) {
  long limit = side == Side::Right ? path.hi() : -path.lo();
  for (long x = 1; x <= limit; ++x) {
    double v = path.v(side == Side::Right ? x : -x);
    if (a.contains(v)) return x;
  }
  return std::nullopt;
}

void dump_csv(const PotentialPath& path, std::ostream& os, long lo, long hi) {
  os << "x,V\n";
  for (long x = lo; x <= hi; ++x) os << x << "," << path.v(x) << "\n";
}

}  // namespace rwre
