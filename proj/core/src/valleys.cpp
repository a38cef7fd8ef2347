#include "rwre/valleys.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace rwre {

ValleySchedule make_schedule(const EnvDistribution& dist, double epsilon,
                             double c0, double c2, std::optional<double> c4) {
  KappaSolution k = solve_kappa(dist);
  if (!k.in_unit_interval)
    throw std::invalid_argument("schedule needs kappa in (0,1)");
  double limit = (1.0 - k.kappa) / (2.0 * k.kappa);
  if (!(epsilon > 0.0 && epsilon < limit))
    throw std::invalid_argument("epsilon must lie in (0, (1-kappa)/(2 kappa))");
  if (!(c0 >= 1.0)) throw std::invalid_argument("c0 must be >= 1");
  if (!(c2 > 0.0)) throw std::invalid_argument("c2 must be positive");
  ValleySchedule s;
  s.epsilon = epsilon;
  s.kappa = k.kappa;
  s.c0 = c0;
  s.c2 = c2;
  if (c4) {
    s.c4 = *c4;
  } else {
    SubExponent se = sub_exponent(dist, k.kappa);
    s.c4 = 1.05 * 2.0 * (k.kappa + se.kappa0) / std::abs(std::log(se.v0));
  }
  double c4_floor = 2.0 * (k.kappa + sub_exponent(dist, k.kappa).kappa0) /
                    std::abs(std::log(sub_exponent(dist, k.kappa).v0));
  if (s.c4 <= c4_floor)
    throw std::invalid_argument("c4 must exceed 2(kappa+kappa0)/|log v0|");
  return s;
}

ScheduleEntry schedule_entry(const ValleySchedule& sched, long i) {
  if (i < 1) throw std::invalid_argument("schedule index starts at 1");
  ScheduleEntry e;
  e.i = i;
  long double li = static_cast<long double>(i);
  long double ln = std::log(static_cast<long double>(sched.c0)) +
                   (1.0L + sched.epsilon) * std::log(li) +
                   ((1.0L + sched.epsilon) / sched.kappa) * std::lgamma(li + 1.0L);
  e.n_real = static_cast<double>(std::exp(ln));
  long double log_n = ln;
  if (ln <= 62.0L * 0.6931471805599453L) {
    // Floor in extended precision, then nudge across log boundaries so the
    // integer is exact even when exp() rounds.
    auto m = static_cast<std::uint64_t>(std::floor(std::exp(ln)));
    while (std::log(static_cast<long double>(m + 1)) <= ln) ++m;
    while (m > 1 && std::log(static_cast<long double>(m)) > ln) --m;
    e.n = m;
    e.n_fits = true;
    log_n = std::log(static_cast<long double>(m));
  }
  e.log_n = static_cast<double>(log_n);
  e.f = static_cast<double>(log_n - std::log(static_cast<long double>(sched.c0)) -
                            (1.0L + sched.epsilon) * std::log(li));
  e.z = static_cast<double>(std::log(li) / sched.kappa);
  return e;
}

namespace {

// Last k in [floor_k, b) with V(k) >= threshold; capped = none found.
std::pair<long, bool> climb_site_down(const PotentialPath& path, long b,
                                      long floor_k, double threshold) {
  for (long k = b - 1; k >= floor_k; --k)
    if (path.v(k) >= threshold) return {k, false};
  return {floor_k, true};
}

}  // namespace

std::vector<ValleyRecord> locate_valleys(const PotentialPath& path,
                                         const LadderDecomposition& lad,
                                         const ValleySchedule& sched,
                                         long i_max) {
  std::vector<ValleyRecord> out;
  long sigma_prev = -1;
  for (long i = 1; i <= i_max; ++i) {
    ValleyRecord r;
    r.i = i;
    r.sched = schedule_entry(sched, i);

    long sigma = -1;
    for (long k = sigma_prev + 1; k < static_cast<long>(lad.heights.size()); ++k)
      if (lad.heights[static_cast<std::size_t>(k)] >= r.sched.f) {
        sigma = k;
        break;
      }
    if (sigma < 0) break;  // ladder exhausted before a deep enough excursion

    r.sigma = sigma;
    r.prev_end = lad.epochs[static_cast<std::size_t>(sigma_prev + 1)];
    r.excursion_end = lad.epochs[static_cast<std::size_t>(sigma + 1)];
    r.b = lad.epochs[static_cast<std::size_t>(sigma)];
    r.v_b = path.v(r.b);
    r.height = lad.heights[static_cast<std::size_t>(sigma)];
    r.degenerate = !(r.sched.f > 0.0);

    auto [a, a_cap] = climb_site_down(path, r.b, r.prev_end,
                                      r.v_b + r.sched.f + r.sched.z);
    r.a = a;
    r.a_capped = a_cap;
    auto [al, al_cap] =
        climb_site_down(path, r.b, r.prev_end, r.v_b + 0.5 * r.sched.f);
    r.alpha = al;
    r.alpha_capped = al_cap;

    // First climb past f/2 on the right.  For f > 0 this sits inside the
    // excursion (its interior max already clears f); only the degenerate
    // f <= 0 shape can miss, and there gamma pins to the excursion edge.
    long gamma = -1;
    for (long k = r.b + 1; k <= r.excursion_end - 1; ++k)
      if (path.v(k) >= r.v_b + 0.5 * r.sched.f) {
        gamma = k;
        break;
      }
    r.gamma = gamma >= 0 ? gamma : std::max(r.b + 1, r.excursion_end - 1);

    long c_climb = -1;
    for (long k = r.b + 1; k <= r.excursion_end; ++k)
      if (path.v(k) >= r.v_b + r.sched.f + r.sched.z) {
        c_climb = k;
        break;
      }
    if (c_climb >= 0 && c_climb <= r.excursion_end - 1) {
      r.c = c_climb;
      r.c_capped = false;
    } else {
      r.c = r.excursion_end - 1;
      r.c_capped = true;
    }

    // Optional depth-f climb sites; the left one may live before the cap.
    for (long k = r.b - 1; k >= path.lo(); --k)
      if (path.v(k) >= r.v_b + r.sched.f) {
        r.beta_minus = k;
        break;
      }
    for (long k = r.b + 1; k <= r.excursion_end; ++k)
      if (path.v(k) >= r.v_b + r.sched.f) {
        r.beta_plus = k;
        break;
      }

    out.push_back(r);
    sigma_prev = sigma;
  }
  return out;
}

OmegaFlags omega_events(const PotentialPath& path, const ValleyRecord& rec,
                        const ValleySchedule& sched) {
  OmegaFlags w;
  w.uncapped_left = !rec.a_capped;

  auto ascent = first_ascent(path, rec.sched.f);
  if (ascent) {
    double cap = static_cast<double>(rec.i) * std::exp(sched.kappa * rec.sched.f);
    w.ascent_window = rec.b <= ascent->t_up - 1 &&
                      static_cast<double>(ascent->t_up - 1) <= cap;
  }

  w.narrow = static_cast<double>(rec.c - rec.a) <=
             sched.c4 * (rec.sched.f + rec.sched.z);

  // Shoulder minimum over ]a, c[ excluding ]alpha, gamma[.
  double shoulder_min = std::numeric_limits<double>::infinity();
  for (long k = rec.a + 1; k <= std::min(rec.alpha, rec.c - 1); ++k)
    shoulder_min = std::min(shoulder_min, path.v(k));
  for (long k = std::max(rec.gamma, rec.a + 1); k <= rec.c - 1; ++k)
    shoulder_min = std::min(shoulder_min, path.v(k));
  w.shoulders_high = shoulder_min > rec.v_b + 0.25 * rec.sched.f;

  NeumaierSum centre;
  for (long k = rec.alpha; k <= std::min(rec.gamma, path.hi()); ++k)
    centre.add(std::exp(-(path.v(k) - rec.v_b)));
  w.invariant_sum = centre.value();
  w.small_sum = w.invariant_sum < 7.0 * sched.c2;

  w.extra_deep = rec.height >= rec.sched.f + rec.sched.z;

  NeumaierSum whole;
  for (long k = rec.a; k <= rec.c; ++k)
    whole.add(std::exp(-(path.v(k) - rec.v_b)));
  w.whole_sum = whole.value();
  return w;
}

DeepValleyIndex deep_valley_indices(const std::vector<ValleyRecord>& recs,
                                    const std::vector<OmegaFlags>& flags,
                                    const ValleySchedule& sched, long n_max) {
  if (recs.size() != flags.size())
    throw std::invalid_argument("census and flags must pair up");
  DeepValleyIndex d;
  d.exponent = (1.0 + sched.epsilon) /
               (1.0 / sched.kappa - 1.0 - 1.5 * sched.epsilon);

  for (std::size_t j = 0; j < recs.size(); ++j)
    if (!flags[j].regular()) d.i0 = std::max(d.i0, recs[j].i);

  long prev = 0;  // i(-1)+1 == 1
  for (long n = 0; n <= n_max; ++n) {
    double nf = static_cast<double>(n);
    double growth = n >= 1 ? std::pow(nf, d.exponent) : 0.0;
    long floor_i = std::max(prev + 1, n >= 1 ? static_cast<long>(n) : 1L);
    if (growth > static_cast<double>(floor_i)) {
      if (growth > 1e18) {
        d.exhausted = true;
        return d;
      }
      floor_i = static_cast<long>(std::ceil(growth));
    }
    long pick = -1;
    for (std::size_t j = 0; j < recs.size(); ++j) {
      if (recs[j].i < floor_i || recs[j].i <= d.i0) continue;
      if (flags[j].member()) {
        pick = recs[j].i;
        break;
      }
    }
    if (pick < 0) {
      d.exhausted = true;
      return d;
    }
    d.indices.push_back(pick);
    prev = pick;
  }
  return d;
}

void valleys_csv(std::ostream& os, const std::vector<ValleyRecord>& recs,
                 const std::vector<OmegaFlags>& flags) {
  os << "i,sigma,a,alpha,b,gamma,c,height,N,f,z,"
        "uncapped_left,ascent_window,narrow,shoulders_high,small_sum,extra_deep\n";
  for (std::size_t j = 0; j < recs.size(); ++j) {
    const auto& r = recs[j];
    const auto& w = flags[j];
    os << r.i << "," << r.sigma << "," << r.a << "," << r.alpha << "," << r.b
       << "," << r.gamma << "," << r.c << "," << r.height << ",";
    if (r.sched.n_fits)
      os << r.sched.n;
    else
      os << r.sched.n_real;
    os << "," << r.sched.f << "," << r.sched.z << "," << w.uncapped_left << ","
       << w.ascent_window << "," << w.narrow << "," << w.shoulders_high << ","
       << w.small_sum << "," << w.extra_deep << "\n";
  }
}

}  // namespace rwre
