#include "rwre/walker.hpp"

#include <algorithm>
#include <cmath>

#include "rwre/rng.hpp"
#include "rwre/stats.hpp"

namespace rwre {

std::uint64_t walker_step_key(std::uint64_t master_seed, std::uint64_t run_id,
                              std::uint64_t walker_idx) {
  return derive_key(master_seed, kRoleWalker, run_id, walker_idx);
}

namespace {

// One nearest-neighbour step at time t (draw index t+1) for any object
// with an omega(x) method.
template <class E>
long step_once(const E& env, long pos, const CounterRng& stream, std::uint64_t t) {
  double u = u01(stream.at(t + 1));
  return pos + (u < env.omega(pos) ? 1 : -1);
}

}  // namespace

std::vector<long> simulate_path(const Environment& env, long start,
                                std::uint64_t horizon, std::uint64_t step_key) {
  CounterRng stream(step_key);
  std::vector<long> out;
  out.reserve(horizon);
  long pos = start;
  for (std::uint64_t t = 0; t < horizon; ++t) {
    pos = step_once(env, pos, stream, t);
    out.push_back(pos);
  }
  return out;
}

EnsembleResult run_walkers(const Environment& env, const EnsembleConfig& cfg,
                           std::uint64_t run_id) {
  if (cfg.starts.empty()) throw std::invalid_argument("no walkers");
  for (long s : cfg.starts)
    if (((s - cfg.starts[0]) & 1L) != 0)
      throw ParityMismatch("starts must share one parity class");

  const std::size_t d = cfg.starts.size();
  std::vector<CounterRng> streams;
  streams.reserve(d);
  for (std::size_t j = 0; j < d; ++j)
    streams.emplace_back(walker_step_key(env.master_seed(), run_id, j));

  EnsembleResult res;
  std::vector<long> pos = cfg.starts;
  res.min_site = *std::min_element(pos.begin(), pos.end());
  res.max_site = *std::max_element(pos.begin(), pos.end());

  auto check_meeting = [&](std::uint64_t t) {
    for (std::size_t j = 1; j < d; ++j)
      if (pos[j] != pos[0]) return;
    ++res.n_meetings;
    if (res.meetings.size() < cfg.meeting_log_cap)
      res.meetings.push_back({t, pos[0]});
  };

  check_meeting(0);
  for (std::uint64_t t = 0; t < cfg.horizon; ++t) {
    for (std::size_t j = 0; j < d; ++j) {
      pos[j] = step_once(env, pos[j], streams[j], t);
      // Parity stays locked to the start: (pos - start - time) is even.
      if (((pos[j] - cfg.starts[j] - static_cast<long>((t + 1) & 1)) & 1L) != 0)
        throw ParityMismatch("walker parity drifted");
      res.min_site = std::min(res.min_site, pos[j]);
      res.max_site = std::max(res.max_site, pos[j]);
    }
    check_meeting(t + 1);
    if (cfg.checkpoint_stride && (t + 1) % cfg.checkpoint_stride == 0)
      res.checkpoints.push_back({t + 1, pos});
  }
  res.finals = pos;
  return res;
}

std::optional<std::uint64_t> hitting_time(const Environment& env, long start,
                                          long target, std::uint64_t cap,
                                          std::uint64_t run_id) {
  if (start == target) return 0;
  CounterRng stream(walker_step_key(env.master_seed(), run_id, 0));
  long pos = start;
  for (std::uint64_t t = 0; t < cap; ++t) {
    pos = step_once(env, pos, stream, t);
    if (pos == target) return t + 1;
  }
  return std::nullopt;
}

double InvariantMeasure::nu_at(long x) const {
  auto it = std::lower_bound(class_sites.begin(), class_sites.end(), x);
  if (it == class_sites.end() || *it != x) return 0.0;
  return nu[static_cast<std::size_t>(it - class_sites.begin())];
}

long InvariantMeasure::sample_class(double u) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < class_sites.size(); ++j) {
    acc += nu[j];
    if (u < acc) return class_sites[j];
  }
  return class_sites.back();
}

InvariantMeasure reflected_invariant_measure(const PotentialPath& path, long a,
                                             long b, long c) {
  if (!(a < b && b < c))
    throw DegenerateInterval("invariant measure needs a < b < c");
  InvariantMeasure im;
  im.a = a;
  im.b = b;
  im.c = c;
  const double vb = path.v(b);
  im.mu.resize(static_cast<std::size_t>(c - a + 1));
  auto e = [&](long x) { return std::exp(-(path.v(x) - vb)); };
  im.mu.front() = e(a);
  im.mu.back() = e(c - 1);
  for (long x = a + 1; x <= c - 1; ++x)
    im.mu[static_cast<std::size_t>(x - a)] = e(x) + e(x - 1);

  NeumaierSum total;
  for (long x = a; x <= c; ++x)
    if (((x - b) & 1L) == 0) {
      im.class_sites.push_back(x);
      total.add(im.mu_at(x));
    }
  im.class_total = total.value();
  im.nu.reserve(im.class_sites.size());
  for (long x : im.class_sites) im.nu.push_back(im.mu_at(x) / im.class_total);
  im.nu_b = im.nu_at(b);
  return im;
}

CouplingResult couple(const Environment& env, const InvariantMeasure& im,
                      std::uint64_t horizon, std::uint64_t run_id,
                      bool record_paths) {
  const long a = im.a, c = im.c;
  ReflectedEnv renv(env, a, c);
  CounterRng s_stream(walker_step_key(env.master_seed(), run_id, 0));
  CounterRng hat_stream(derive_key(env.master_seed(), kRoleHatWalker, run_id));
  CounterRng post_stream(derive_key(env.master_seed(), kRolePostExit, run_id));
  CounterRng init_stream(derive_key(env.master_seed(), kRoleHatInit, run_id));

  CouplingResult r;
  long s = im.b;
  long shat = im.sample_class(init_stream.next_u01());
  r.s_start = s;
  r.shat_start = shat;
  if (record_paths) {
    r.s_path.reserve(horizon);
    r.shat_path.reserve(horizon);
  }

  bool glued = false, exited = false;
  int prev_sign = (shat > s) - (shat < s);
  for (std::uint64_t t = 0; t <= horizon; ++t) {
    if (((shat - s) & 1L) != 0) r.parity_ok = false;
    if (shat < a || shat > c) r.hat_in_range_ok = false;
    if (glued && shat != s) r.glue_ok = false;
    if (!glued && !exited && shat == s) {
      r.tau_meet = t;
      glued = true;
    }
    if (t == horizon) break;

    long s_next = step_once(env, s, s_stream, t);
    long shat_next;
    if (glued) {
      if (s_next >= a && s_next <= c) {
        shat_next = s_next;  // shadowing; no companion draw is indexed here
      } else {
        r.tau_exit = t + 1;
        glued = false;
        exited = true;
        // s left through a boundary; the reflection forces the companion inward.
        shat_next = (s == a) ? a + 1 : c - 1;
      }
    } else {
      const CounterRng& src = exited ? post_stream : hat_stream;
      shat_next = step_once(renv, shat, src, t);
    }
    s = s_next;
    shat = shat_next;

    int sign = (shat > s) - (shat < s);
    if (prev_sign > 0 && sign < 0) r.no_cross_ok = false;
    if (prev_sign < 0 && sign > 0) r.no_cross_ok = false;
    prev_sign = sign;

    if (record_paths) {
      r.s_path.push_back(s);
      r.shat_path.push_back(shat);
    }
  }
  r.s_final = s;
  r.shat_final = shat;
  return r;
}

std::vector<OccupationEstimate> occupation_probability(
    const Environment& env, long start, long site,
    const std::vector<std::uint64_t>& at_steps, std::uint64_t n_runs,
    std::uint64_t base_run_id) {
  if (at_steps.empty()) throw std::invalid_argument("no steps requested");
  for (std::uint64_t k : at_steps)
    if (((site - start - static_cast<long>(k & 1)) & 1L) != 0)
      throw ParityMismatch("site unreachable at that step parity");

  std::vector<std::uint64_t> steps = at_steps;
  std::sort(steps.begin(), steps.end());
  std::uint64_t max_step = steps.back();
  std::vector<std::uint64_t> hits(steps.size(), 0);

  for (std::uint64_t r = 0; r < n_runs; ++r) {
    CounterRng stream(walker_step_key(env.master_seed(), base_run_id + r, 0));
    long pos = start;
    std::size_t next = 0;
    while (next < steps.size() && steps[next] == 0) {
      if (pos == site) ++hits[next];
      ++next;
    }
    for (std::uint64_t t = 0; t < max_step; ++t) {
      pos = step_once(env, pos, stream, t);
      while (next < steps.size() && steps[next] == t + 1) {
        if (pos == site) ++hits[next];
        ++next;
      }
    }
  }

  std::vector<OccupationEstimate> out;
  out.reserve(steps.size());
  for (std::size_t j = 0; j < steps.size(); ++j) {
    OccupationEstimate e;
    e.at_step = steps[j];
    e.n_runs = n_runs;
    e.p_hat = static_cast<double>(hits[j]) / static_cast<double>(n_runs);
    e.se = binomial_se(e.p_hat, n_runs);
    out.push_back(e);
  }
  return out;
}

}  // namespace rwre
