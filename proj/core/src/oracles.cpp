#include "rwre/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rwre/rng.hpp"

namespace rwre {

namespace {

constexpr double kZeroTol = 1e-9;   // lattice round-off guard at the 0 barrier
constexpr long kWindowCap = 1L << 22;

double sorted_exp_sum(std::vector<double>& exps, double shift) {
  std::sort(exps.begin(), exps.end());
  NeumaierSum s;
  for (double e : exps) s.add(std::exp(e - shift));
  return s.value();
}

// Tridiagonal solve for the quenched chain on (a, c): for each interior x,
//   -(1 - omega_x) u(x-1) + u(x) - omega_x u(x+1) = rhs(x),
// with u(a) = ua, u(c) = uc folded into the first and last rows.
std::vector<long double> solve_tridiag(const Environment& env, long a, long c,
                                       long double ua, long double uc,
                                       long double rhs_const) {
  const std::size_t n = static_cast<std::size_t>(c - a - 1);
  std::vector<long double> diag(n, 1.0L), rhs(n, rhs_const), low(n), up(n);
  for (std::size_t i = 0; i < n; ++i) {
    long x = a + 1 + static_cast<long>(i);
    long double w = static_cast<long double>(env.omega(x));
    low[i] = -(1.0L - w);
    up[i] = -w;
  }
  rhs.front() -= low.front() * ua;
  rhs.back() -= up.back() * uc;

  for (std::size_t i = 1; i < n; ++i) {
    long double m = low[i] / diag[i - 1];
    diag[i] -= m * up[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  std::vector<long double> u(n);
  u[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) u[i] = (rhs[i] - up[i] * u[i + 1]) / diag[i];
  return u;
}

long step_walk(const Environment& env, long pos, const CounterRng& stream,
               std::uint64_t t) {
  return pos + (u01(stream.at(t + 1)) < env.omega(pos) ? 1 : -1);
}

void grow_until_ascent(PotentialPath& path, double h, AscentPoint& out) {
  for (;;) {
    auto fa = first_ascent(path, h);
    if (fa) {
      out = *fa;
      return;
    }
    if (path.hi() >= kWindowCap)
      throw WindowExhausted("ascent scan past window cap");
    path.extend_right(std::max(256L, path.hi() * 2));
  }
}

}  // namespace

double exit_prob_exact(const PotentialPath& path, long a, long b, long c) {
  if (!(a <= b && b <= c && a < c))
    throw DegenerateInterval("exit_prob_exact needs a <= b <= c, a < c");
  if (b == a) return 0.0;
  double m = -std::numeric_limits<double>::infinity();
  for (long k = a; k <= c - 1; ++k) m = std::max(m, path.v(k));
  std::vector<double> num, den;
  for (long k = a; k <= b - 1; ++k) num.push_back(path.v(k));
  for (long k = a; k <= c - 1; ++k) den.push_back(path.v(k));
  return sorted_exp_sum(num, m) / sorted_exp_sum(den, m);
}

double exit_prob_bruteforce(const Environment& env, long a, long b, long c) {
  if (!(a <= b && b <= c && a < c))
    throw DegenerateInterval("exit_prob_bruteforce needs a <= b <= c, a < c");
  if (b == a) return 0.0;
  if (b == c) return 1.0;
  auto u = solve_tridiag(env, a, c, 0.0L, 1.0L, 0.0L);
  return static_cast<double>(u[static_cast<std::size_t>(b - a - 1)]);
}

ExitTimeResult expected_exit_time(const Environment& env,
                                  const PotentialPath& path, long a, long b,
                                  long c) {
  if (!(a < b && b < c))
    throw DegenerateInterval("expected_exit_time needs a < b < c");
  ExitTimeResult r;
  auto mvec = solve_tridiag(env, a, c, 0.0L, 0.0L, 1.0L);
  r.value = static_cast<double>(mvec[static_cast<std::size_t>(b - a - 1)]);

  double rise = 0.0, prefix_min = path.v(a);
  for (long k = a; k <= c - 1; ++k) {
    prefix_min = std::min(prefix_min, path.v(k));
    if (k >= b) rise = std::max(rise, path.v(k) - prefix_min);
  }
  double drop = 0.0;
  std::vector<double> suffix_min(static_cast<std::size_t>(c - a));
  suffix_min.back() = path.v(c - 1);
  for (long k = c - 2; k >= a; --k)
    suffix_min[static_cast<std::size_t>(k - a)] =
        std::min(path.v(k), suffix_min[static_cast<std::size_t>(k - a + 1)]);
  for (long l = a; l <= b - 1; ++l)
    drop = std::max(drop, path.v(l) - suffix_min[static_cast<std::size_t>(l - a)]);

  double area = static_cast<double>(c - a) * static_cast<double>(c - a) /
                env.dist().epsilon0();
  r.bound_rise = area * std::exp(rise);
  r.bound_drop = area * std::exp(drop);
  return r;
}

ExitMcResult mc_exit(const Environment& env, long a, long b, long c,
                     std::uint64_t n_runs, std::uint64_t base_run_id) {
  if (!(a < b && b < c))
    throw DegenerateInterval("mc_exit needs a < b < c");
  ExitMcResult res;
  res.n_runs = n_runs;
  std::uint64_t right = 0;
  MeanVar times;
  for (std::uint64_t r = 0; r < n_runs; ++r) {
    CounterRng stream(walker_step_key(env.master_seed(), base_run_id + r, 0));
    long pos = b;
    std::uint64_t t = 0;
    while (pos != a && pos != c) {
      pos = step_walk(env, pos, stream, t);
      if (++t >= (1ull << 34))
        throw std::runtime_error("mc_exit step budget blown");
    }
    if (pos == c) ++right;
    times.add(static_cast<double>(t));
  }
  res.freq_right = static_cast<double>(right) / static_cast<double>(n_runs);
  res.se_right = binomial_se(res.freq_right, n_runs);
  res.time_mean = times.mean();
  res.time_se = times.se();
  return res;
}

ConfinementBound confinement_bounds(const PotentialPath& path, long a, long b,
                                    long c, std::uint64_t k) {
  if (!(a < b && b < c))
    throw DegenerateInterval("confinement_bounds needs a < b < c");
  double min_right = path.v(b);
  for (long x = b; x <= c - 1; ++x) min_right = std::min(min_right, path.v(x));
  double min_left = path.v(a);
  for (long x = a; x <= b - 1; ++x) min_left = std::min(min_left, path.v(x));
  ConfinementBound out;
  double kk = static_cast<double>(k);
  out.right = kk * std::exp(min_right - path.v(c - 1));
  out.left = kk * std::exp(min_left - path.v(a));
  return out;
}

double mc_hit_before(const Environment& env, long b, long target,
                     std::uint64_t k, std::uint64_t n_runs,
                     std::uint64_t base_run_id) {
  if (k == 0) return 0.0;
  std::uint64_t hits = 0;
  for (std::uint64_t r = 0; r < n_runs; ++r) {
    CounterRng stream(walker_step_key(env.master_seed(), base_run_id + r, 0));
    long pos = b;
    if (pos == target) {
      ++hits;
      continue;
    }
    for (std::uint64_t t = 0; t + 1 < k; ++t) {
      pos = step_walk(env, pos, stream, t);
      if (pos == target) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(n_runs);
}

std::vector<double> stationary_bruteforce(const ReflectedEnv& renv) {
  const long a = renv.a(), c = renv.c();
  const std::size_t n = static_cast<std::size_t>(c - a + 1);
  // Row y of M holds the balance equation for state y; the last row is
  // replaced by the mass constraint.
  std::vector<std::vector<long double>> m(n, std::vector<long double>(n + 1, 0.0L));
  for (std::size_t y = 0; y + 1 < n; ++y) {
    m[y][y] -= 1.0L;
    for (std::size_t x = 0; x < n; ++x) {
      long sx = a + static_cast<long>(x);
      long double w = static_cast<long double>(renv.omega(sx));
      if (static_cast<long>(y) == sx - a + 1 && w > 0) m[y][x] += w;
      if (static_cast<long>(y) == sx - a - 1 && w < 1) m[y][x] += (1.0L - w);
    }
  }
  for (std::size_t x = 0; x < n; ++x) m[n - 1][x] = 1.0L;
  m[n - 1][n] = 1.0L;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(static_cast<double>(m[r][col])) >
          std::fabs(static_cast<double>(m[piv][col])))
        piv = r;
    std::swap(m[col], m[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0.0L) continue;
      long double f = m[r][col] / m[col][col];
      for (std::size_t cc = col; cc <= n; ++cc) m[r][cc] -= f * m[col][cc];
    }
  }
  std::vector<double> pi(n);
  for (std::size_t x = 0; x < n; ++x)
    pi[x] = static_cast<double>(m[x][n] / m[x][x]);
  return pi;
}

InvariantSumReport invariant_sum_check(const EnvDistribution& dist, double h,
                                       std::uint64_t n_samples,
                                       std::uint64_t seed) {
  InvariantSumReport rep;
  rep.n_total = n_samples;
  MeanVar right, left;
  std::uint64_t n_found = 0, n_left = 0;
  for (std::uint64_t r = 0; r < n_samples; ++r) {
    Environment env(dist, derive_key(seed, kRoleReplicate, r));
    PotentialPath path = PotentialPath::build(env, -64, 256);
    AscentPoint fa;
    try {
      grow_until_ascent(path, h, fa);
    } catch (const WindowExhausted&) {
      ++rep.n_exhausted;
      continue;
    }
    ++n_found;
    NeumaierSum rs;
    for (long x = fa.m1; x <= fa.t_up; ++x)
      rs.add(std::exp(-(path.v(x) - fa.v_min)));
    right.add(rs.value());

    // Left climb: walk down from m1; the event is crossing h before the
    // level of the minimum is reached again (within round-off).
    bool ok = false, fail = false;
    NeumaierSum ls;
    long x = fa.m1 - 1;
    while (!ok && !fail) {
      if (x < path.lo()) {
        if (-path.lo() >= kWindowCap) {
          ++rep.n_exhausted;
          fail = true;
          break;
        }
        path.extend_left(std::min(-256L, path.lo() * 2));
      }
      double w = path.v(x) - fa.v_min;
      if (w >= h) {
        ls.add(std::exp(-w));
        ok = true;
      } else if (w <= kZeroTol) {
        fail = true;
      } else {
        ls.add(std::exp(-w));
        --x;
      }
    }
    if (ok) {
      ++n_left;
      left.add(ls.value());
    }
  }
  rep.right = {right.mean(), right.se(), n_found};
  rep.left = {left.mean(), left.se(), n_left};
  rep.cond_freq = n_found ? static_cast<double>(n_left) / n_found : 0.0;
  rep.c2_hat = std::max(rep.right.mean, rep.left.mean);
  return rep;
}

TailFit tail_fit(std::vector<double> samples, double lattice_hint) {
  const std::size_t n = samples.size();
  if (n < 200) throw InsufficientTail("need at least 200 samples");
  std::sort(samples.begin(), samples.end());
  auto survival = [&](double t) {
    auto it = std::lower_bound(samples.begin(), samples.end(), t);
    return static_cast<std::size_t>(samples.end() - it);
  };

  std::vector<double> xs, ys;
  TailFit fit;
  if (lattice_hint > 0.0) {
    fit.span = lattice_hint;
    for (std::size_t m = 2;; ++m) {
      double g = static_cast<double>(m) * lattice_hint;
      std::size_t count = survival(g - 0.5 * lattice_hint);
      if (count < 50) break;
      xs.push_back(g);
      ys.push_back(std::log(static_cast<double>(count) / n));
    }
  } else {
    double lo = samples[n / 2];
    double hi = samples[n - 50];
    for (int i = 0; i < 12; ++i) {
      double g = lo + (hi - lo) * i / 11.0;
      std::size_t count = survival(g);
      if (count < 50) break;
      if (!xs.empty() && g <= xs.back()) continue;
      xs.push_back(g);
      ys.push_back(std::log(static_cast<double>(count) / n));
    }
  }
  if (xs.size() < 5) throw InsufficientTail("fewer than 5 usable grid points");

  LineFit line = linear_fit(xs, ys);
  fit.kappa_hat = -line.slope;
  fit.h_min = xs.front();
  fit.h_max = xs.back();
  fit.n_points = xs.size();
  fit.c_lo = std::numeric_limits<double>::infinity();
  fit.c_hi = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double cval = std::exp(ys[i] + fit.kappa_hat * xs[i]);
    fit.c_lo = std::min(fit.c_lo, cval);
    fit.c_hi = std::max(fit.c_hi, cval);
  }
  return fit;
}

AscentTimeCalibration first_ascent_time_calibration(
    const EnvDistribution& dist, const std::vector<double>& hs,
    std::uint64_t n_runs, std::uint64_t seed, std::uint64_t step_cap) {
  AscentTimeCalibration cal;
  for (std::size_t ih = 0; ih < hs.size(); ++ih) {
    const double h = hs[ih];
    MeanVar times;
    std::uint64_t capped = 0;
    for (std::uint64_t r = 0; r < n_runs; ++r) {
      Environment env(dist, derive_key(seed, kRoleReplicate, ih, r));
      PotentialPath path = PotentialPath::build(env, 0, 256);
      AscentPoint fa;
      grow_until_ascent(path, h, fa);
      long target = fa.t_up - 1;
      if (target <= 0) {
        times.add(0.0);
        continue;
      }
      CounterRng stream(derive_key(seed, kRoleOracle, ih, r));
      long pos = 0;
      std::uint64_t t = 0;
      for (; t < step_cap && pos != target; ++t) {
        double u = u01(stream.at(t + 1));
        pos += (pos == 0 || u < env.omega(pos)) ? 1 : -1;
        if (pos < 0) throw std::logic_error("reflected walker went negative");
      }
      if (pos != target)
        ++capped;
      else
        times.add(static_cast<double>(t));
    }
    AscentTimeRow row;
    row.h = h;
    row.mean = times.mean();
    row.se = times.se();
    row.n = times.count();
    row.n_capped = capped;
    cal.rows.push_back(row);
    cal.c0_hat = std::max(cal.c0_hat, row.mean / std::exp(h));
  }
  return cal;
}

namespace {

struct SegSample {
  double len = 0.0;
  double term = 0.0;
  double vmax = 0.0;
};

// Lattice laws put whole atoms on single values; round-off from the two
// routes (compensated site sums vs naive increment sums) must not split
// such an atom across a KS step.  Half a microunit dwarfs the 1e-15
// jitter yet never merges genuinely distinct values of interest.
double snap6(double v) { return std::nearbyint(v * 1e6) / 1e6; }

// One proposal of the i.i.d.-increment walk, stopped at the level or the
// zero barrier.  Left walks use -log rho steps and a barrier closed at 0;
// right walks use +log rho steps and a barrier open at 0.
std::optional<SegSample> propose_segment(CounterRng& rng,
                                         const EnvDistribution& dist,
                                         double level, bool left_side) {
  double w = 0.0, vmax = 0.0;
  for (std::uint64_t k = 1; k <= 1u << 20; ++k) {
    double inc = dist.log_rho(dist.index_for(rng.next_u01()));
    w += left_side ? -inc : inc;
    vmax = std::max(vmax, w);
    if (w >= level)
      return SegSample{static_cast<double>(k), snap6(w), snap6(vmax)};
    if (left_side ? (w <= kZeroTol) : (w < -kZeroTol)) return std::nullopt;
  }
  throw std::runtime_error("segment proposal failed to terminate");
}

std::vector<SegSample> reference_segments(const EnvDistribution& dist,
                                          double level, bool left_side,
                                          std::uint64_t n, std::uint64_t key,
                                          double& accept_rate) {
  CounterRng rng(key);
  std::vector<SegSample> out;
  out.reserve(n);
  std::uint64_t proposals = 0;
  const std::uint64_t budget = 20000ull * n;
  while (out.size() < n) {
    if (++proposals > budget)
      throw RejectionBudgetExceeded("reference sampler budget");
    auto s = propose_segment(rng, dist, level, left_side);
    if (s) out.push_back(*s);
  }
  accept_rate = static_cast<double>(n) / static_cast<double>(proposals);
  return out;
}

std::vector<double> pick(const std::vector<SegSample>& v, double SegSample::*f) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& s : v) out.push_back(s.*f);
  return out;
}

}  // namespace

ConditionedLawReport conditioned_law_tests(const EnvDistribution& dist,
                                           double h, std::uint64_t n_per_side,
                                           std::uint64_t seed,
                                           double ref_h_offset) {
  ConditionedLawReport rep;
  std::vector<SegSample> emp_left, emp_right;
  std::vector<double> joint_l, joint_r;
  std::uint64_t envs = 0, lefts = 0;
  const std::uint64_t env_budget = 500ull * n_per_side;

  while (lefts < n_per_side) {
    if (envs >= env_budget)
      throw RejectionBudgetExceeded("environment budget for the left law");
    Environment env(dist, derive_key(seed, kRoleReplicate, envs));
    ++envs;
    PotentialPath path = PotentialPath::build(env, -64, 256);
    AscentPoint fa;
    grow_until_ascent(path, h, fa);

    SegSample right;
    right.len = static_cast<double>(fa.t_up - fa.m1);
    right.term = snap6(fa.v_top - fa.v_min);
    for (long x = fa.m1; x <= fa.t_up; ++x)
      right.vmax = std::max(right.vmax, path.v(x) - fa.v_min);
    right.vmax = snap6(right.vmax);
    if (emp_right.size() < n_per_side) emp_right.push_back(right);

    // Left read: the potential walked downward from the argmin, conditioned
    // to cross h before coming back to the minimum level.
    double vmax = 0.0;
    long x = fa.m1 - 1;
    std::optional<SegSample> left;
    for (;;) {
      if (x < path.lo()) {
        if (-path.lo() >= kWindowCap) break;
        path.extend_left(std::min(-256L, path.lo() * 2));
      }
      double w = path.v(x) - fa.v_min;
      vmax = std::max(vmax, w);
      if (w >= h) {
        left = SegSample{static_cast<double>(fa.m1 - x), snap6(w), snap6(vmax)};
        break;
      }
      if (w <= kZeroTol) break;
      --x;
    }
    if (left) {
      ++lefts;
      emp_left.push_back(*left);
      joint_l.push_back(left->len);
      joint_r.push_back(right.len);
    }
  }
  rep.cond_freq = static_cast<double>(lefts) / static_cast<double>(envs);

  const double lvl = h + ref_h_offset;
  auto ref_left = reference_segments(dist, lvl, true, n_per_side,
                                     derive_key(seed, kRoleOracle, 1),
                                     rep.left.accept_rate);
  auto ref_right = reference_segments(dist, lvl, false, n_per_side,
                                      derive_key(seed, kRoleOracle, 2),
                                      rep.right.accept_rate);

  double SegSample::* const fields[3] = {&SegSample::len, &SegSample::term,
                                         &SegSample::vmax};
  for (int i = 0; i < 3; ++i) {
    rep.left.ks[i] = ks_two_sample(pick(emp_left, fields[i]), pick(ref_left, fields[i]));
    rep.right.ks[i] = ks_two_sample(pick(emp_right, fields[i]), pick(ref_right, fields[i]));
  }
  rep.left.n = emp_left.size();
  rep.right.n = emp_right.size();
  rep.n_joint = joint_l.size();
  rep.joint_corr = pearson_corr(joint_l, joint_r);
  return rep;
}

std::vector<LdRow> ld_bound_check(const EnvDistribution& dist,
                                  const std::vector<std::uint64_t>& ks,
                                  const std::vector<double>& ys,
                                  std::uint64_t n_samples, std::uint64_t seed) {
  std::vector<std::uint64_t> sorted_ks = ks;
  std::sort(sorted_ks.begin(), sorted_ks.end());
  std::vector<std::vector<std::uint64_t>> counts(
      sorted_ks.size(), std::vector<std::uint64_t>(ys.size(), 0));

  const std::uint64_t kmax = sorted_ks.back();
  for (std::uint64_t r = 0; r < n_samples; ++r) {
    CounterRng rng(derive_key(seed, kRoleIncrement, r));
    double sum = 0.0;
    std::size_t next = 0;
    for (std::uint64_t j = 1; j <= kmax && next < sorted_ks.size(); ++j) {
      sum += dist.log_rho(dist.index_for(rng.next_u01()));
      while (next < sorted_ks.size() && sorted_ks[next] == j) {
        for (std::size_t iy = 0; iy < ys.size(); ++iy)
          if (sum >= static_cast<double>(j) * ys[iy]) ++counts[next][iy];
        ++next;
      }
    }
  }

  std::vector<LdRow> rows;
  for (std::size_t ik = 0; ik < sorted_ks.size(); ++ik)
    for (std::size_t iy = 0; iy < ys.size(); ++iy) {
      LdRow row;
      row.k = sorted_ks[ik];
      row.y = ys[iy];
      row.freq = static_cast<double>(counts[ik][iy]) / n_samples;
      row.se = binomial_se(row.freq, n_samples);
      row.bound = std::exp(-static_cast<double>(row.k) *
                           rate_function(dist, row.y));
      // One-sided count test with the fluctuation band taken under the
      // bound itself; a plug-in band misfires when a rare cell draws one
      // or two hits.
      double n = static_cast<double>(n_samples);
      double allowed = n * row.bound +
                       4.0 * std::sqrt(n * row.bound * (1.0 - row.bound));
      row.ok = static_cast<double>(counts[ik][iy]) <= allowed;
      rows.push_back(row);
    }
  return rows;
}

}  // namespace rwre
