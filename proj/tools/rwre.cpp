// Command line front end: environment checks, valley censuses, multi-walker
// collision runs, oracle verification sweeps and tail fits, all driven by a
// key=value config.  Every artifact carries the config hash and the master
// seed, and seed-level work parallelizes without changing a single output
// byte: seed i's result is a pure function of (config, i), and merges
// happen in seed order.
//
// Exit codes: 0 ok, 1 unexpected error, 2 bad usage or config,
// 3 checks ran and failed.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rwre/config.hpp"
#include "rwre/env.hpp"
#include "rwre/oracles.hpp"
#include "rwre/potential.hpp"
#include "rwre/rng.hpp"
#include "rwre/valleys.hpp"
#include "rwre/walker.hpp"

using json = nlohmann::ordered_json;
using namespace rwre;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCheckFailed = 3;

struct GlobalArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  unsigned jobs = 0;
  std::string out_dir;
};

RunConfig load(const GlobalArgs& g) {
  RunConfig cfg = load_config(g.config_path);
  if (g.seed_set) cfg.master_seed = g.seed;
  if (g.jobs) cfg.jobs = g.jobs;
  if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
  validate(cfg);
  return cfg;
}

char hex_digit(std::uint64_t v) {
  return static_cast<char>(v < 10 ? '0' + v : 'a' + (v - 10));
}

std::string hash_hex(std::uint64_t h) {
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[i] = hex_digit(h & 0xF);
  return s;
}

json stamp(const RunConfig& cfg) {
  json j;
  j["config_hash"] = hash_hex(config_hash(cfg));
  j["master_seed"] = cfg.master_seed;
  return j;
}

void emit(const RunConfig& cfg, const std::string& name, const json& doc) {
  std::string text = doc.dump(2);
  text.push_back('\n');
  std::cout << text;
  if (!cfg.out_dir.empty() && cfg.out_dir != "-") {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream f(std::filesystem::path(cfg.out_dir) / (name + ".json"),
                    std::ios::binary);
    f << text;
  }
}

// Environment for seed slot s; marks and walker streams hang off this key.
std::uint64_t seed_master(const RunConfig& cfg, std::uint64_t s) {
  return derive_key(cfg.master_seed, kRoleReplicate, s);
}

// Runs fn(s) for s in [0, n) on cfg.jobs threads; fn must only touch its
// own slot, so the assembled results match a serial pass byte for byte.
void for_each_seed(const RunConfig& cfg, std::uint64_t n,
                   const std::function<void(std::uint64_t)>& fn) {
  unsigned jobs = std::max(1u, cfg.jobs);
  if (jobs == 1 || n <= 1) {
    for (std::uint64_t s = 0; s < n; ++s) fn(s);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(jobs);
  for (unsigned w = 0; w < jobs; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::uint64_t s; (s = next.fetch_add(1)) < n;) fn(s);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

int cmd_check_env(const RunConfig& cfg) {
  EnvDistribution dist = make_distribution(cfg);
  AssumptionReport rep = check_assumptions(dist);
  json j = stamp(cfg);
  j["distribution"] = dist.describe();
  j["uniformly_elliptic"] = rep.uniformly_elliptic;
  j["transient_right"] = rep.transient_right;
  j["mean_log_rho"] = rep.mean_log_rho;
  j["has_kappa"] = rep.has_kappa;
  if (rep.has_kappa) {
    j["kappa"] = rep.kappa;
    j["kappa_in_unit_interval"] = rep.kappa_in_unit_interval;
    j["kappa0"] = rep.kappa0;
    j["v0"] = rep.v0;
  }
  if (rep.span)
    j["lattice_span"] = *rep.span;
  else
    j["lattice_span"] = nullptr;
  j["all_hold"] = rep.all_hold();
  emit(cfg, "check-env", j);
  return rep.all_hold() ? kExitOk : kExitCheckFailed;
}

int cmd_valleys(const RunConfig& cfg, long i_max, long window) {
  EnvDistribution dist = make_distribution(cfg);
  ValleySchedule sched =
      make_schedule(dist, cfg.epsilon, cfg.c0, cfg.c2,
                    cfg.c4 > 0 ? std::optional<double>(cfg.c4) : std::nullopt);
  std::vector<json> per_seed(cfg.n_seeds);
  for_each_seed(cfg, cfg.n_seeds, [&](std::uint64_t s) {
    Environment env(dist, seed_master(cfg, s));
    PotentialPath path = PotentialPath::build(env, -64, window);
    LadderDecomposition lad = ladder(path, 0, false);
    auto recs = locate_valleys(path, lad, sched, i_max);
    std::vector<OmegaFlags> flags;
    flags.reserve(recs.size());
    for (const auto& r : recs) flags.push_back(omega_events(path, r, sched));
    DeepValleyIndex deep = deep_valley_indices(recs, flags, sched, 1);

    json out;
    out["seed"] = s;
    out["n_valleys"] = recs.size();
    json arr = json::array();
    for (std::size_t k = 0; k < recs.size(); ++k) {
      const auto& r = recs[k];
      const auto& w = flags[k];
      json v;
      v["i"] = r.i;
      v["sigma"] = r.sigma;
      v["a"] = r.a;
      v["alpha"] = r.alpha;
      v["b"] = r.b;
      v["gamma"] = r.gamma;
      v["c"] = r.c;
      v["height"] = r.height;
      v["f"] = r.sched.f;
      v["z"] = r.sched.z;
      v["budget_ok"] = r.sched.n_fits;
      if (r.sched.n_fits) v["n_sites"] = r.sched.n;
      v["regular"] = w.regular();
      v["member"] = w.member();
      v["invariant_sum"] = w.invariant_sum;
      arr.push_back(v);
    }
    out["valleys"] = arr;
    out["i0"] = deep.i0;
    out["deep_indices"] = deep.indices;
    out["deep_exhausted"] = deep.exhausted;
    per_seed[s] = std::move(out);
  });

  json j = stamp(cfg);
  j["schedule"] = {{"epsilon", sched.epsilon},
                   {"kappa", sched.kappa},
                   {"c0", sched.c0},
                   {"c2", sched.c2},
                   {"c4", sched.c4}};
  j["seeds"] = per_seed;
  emit(cfg, "valleys", j);
  return kExitOk;
}

int cmd_collide(const RunConfig& cfg) {
  EnvDistribution dist = make_distribution(cfg);
  ValleySchedule sched =
      make_schedule(dist, cfg.epsilon, cfg.c0, cfg.c2,
                    cfg.c4 > 0 ? std::optional<double>(cfg.c4) : std::nullopt);
  std::vector<long> starts = cfg.starts;
  if (starts.empty()) starts.assign(cfg.d, 0);

  // Valleys whose site budget fits the horizon are the candidates for
  // trapping all d walkers at once.
  long i_max = 0;
  for (long i = 1; i <= 12; ++i) {
    ScheduleEntry e = schedule_entry(sched, i);
    if (!e.n_fits || e.n > cfg.horizon) break;
    i_max = i;
  }

  std::vector<json> per_seed(cfg.n_seeds);
  for_each_seed(cfg, cfg.n_seeds, [&](std::uint64_t s) {
    Environment env(dist, seed_master(cfg, s));
    EnsembleConfig ec;
    ec.starts = starts;
    ec.horizon = cfg.horizon;
    ec.meeting_log_cap = cfg.horizon + 1;
    EnsembleResult res = run_walkers(env, ec, 0);

    std::uint64_t from_100 = 0, at_tenth = 0;
    for (const auto& m : res.meetings) {
      if (m.time >= 100) ++from_100;
      if (m.time <= cfg.horizon / 10) ++at_tenth;
    }

    long hi = std::max({res.max_site + 64, 4096L});
    PotentialPath path = PotentialPath::build(env, std::min(res.min_site - 64, -64L), hi);
    LadderDecomposition lad = ladder(path, 0, false);
    auto recs = locate_valleys(path, lad, sched, i_max);

    json out;
    out["seed"] = s;
    out["n_meetings"] = res.n_meetings;
    out["meetings_from_100"] = from_100;
    out["meetings_to_tenth_horizon"] = at_tenth;
    out["finals"] = res.finals;
    out["span"] = {res.min_site, res.max_site};
    json arr = json::array();
    for (const auto& r : recs) {
      std::uint64_t inside = 0, at_bottom = 0;
      for (const auto& m : res.meetings) {
        if (m.site >= r.a && m.site <= r.c) ++inside;
        if (m.site == r.b) ++at_bottom;
      }
      json v;
      v["i"] = r.i;
      v["a"] = r.a;
      v["b"] = r.b;
      v["c"] = r.c;
      v["meetings_inside"] = inside;
      v["meetings_at_bottom"] = at_bottom;
      arr.push_back(v);
    }
    out["valleys"] = arr;
    per_seed[s] = std::move(out);
  });

  std::uint64_t persistent = 0, growing = 0;
  for (const auto& out : per_seed) {
    if (out["meetings_from_100"].get<std::uint64_t>() >= 10) ++persistent;
    if (out["n_meetings"].get<std::uint64_t>() >
        out["meetings_to_tenth_horizon"].get<std::uint64_t>())
      ++growing;
  }

  json j = stamp(cfg);
  j["d"] = cfg.d;
  j["horizon"] = cfg.horizon;
  j["n_seeds"] = cfg.n_seeds;
  j["seeds_with_10_meetings_from_100"] = persistent;
  j["seeds_with_late_meetings"] = growing;
  j["seeds"] = per_seed;
  emit(cfg, "collide", j);
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, int trials) {
  EnvDistribution dist = make_distribution(cfg);
  json j = stamp(cfg);
  bool all_ok = true;

  {  // Exit probabilities: closed form against the harmonic solve.
    double worst = 0.0;
    std::uint64_t done = 0;
    for (std::uint64_t s = 0; s < 8; ++s) {
      Environment env(dist, seed_master(cfg, s));
      PotentialPath path = PotentialPath::build(env, -48, 48);
      CounterRng rng(derive_key(cfg.master_seed, kRoleOracle, 1, s));
      for (int t = 0; t < trials / 8 + 1; ++t) {
        long a = -40 + static_cast<long>(rng.next_u01() * 30);
        long width = 4 + static_cast<long>(rng.next_u01() * 30);
        long b = a + 1 + static_cast<long>(rng.next_u01() * (width - 1));
        double ex = exit_prob_exact(path, a, b, a + width);
        double bf = exit_prob_bruteforce(env, a, b, a + width);
        worst = std::max(worst, std::abs(ex - bf) / std::max(1e-300, std::max(ex, bf)));
        ++done;
      }
    }
    bool ok = worst <= 1e-10;
    all_ok = all_ok && ok;
    j["exit_prob"] = {{"trials", done}, {"worst_rel_err", worst}, {"ok", ok}};
  }

  {  // Expected exit times against their reflection bounds.
    bool ok = true;
    std::uint64_t done = 0;
    for (std::uint64_t s = 0; s < 4; ++s) {
      Environment env(dist, seed_master(cfg, s));
      PotentialPath path = PotentialPath::build(env, -48, 48);
      CounterRng rng(derive_key(cfg.master_seed, kRoleOracle, 2, s));
      for (int t = 0; t < trials / 8 + 1; ++t) {
        long a = -40 + static_cast<long>(rng.next_u01() * 30);
        long width = 5 + static_cast<long>(rng.next_u01() * 29);
        long b = a + 1 + static_cast<long>(rng.next_u01() * (width - 2));
        ExitTimeResult r = expected_exit_time(env, path, a, b, a + width);
        ok = ok && r.value > 0 && r.value <= r.bound_rise * (1 + 1e-12) &&
             r.value <= r.bound_drop * (1 + 1e-12);
        ++done;
      }
    }
    all_ok = all_ok && ok;
    j["exit_time_bounds"] = {{"trials", done}, {"ok", ok}};
  }

  {  // Large deviation bound for the potential.
    auto rows = ld_bound_check(dist, {20, 50, 100}, {0.0, 0.1, 0.2}, 40000,
                               derive_key(cfg.master_seed, kRoleOracle, 3));
    bool ok = true;
    json arr = json::array();
    for (const auto& r : rows) {
      ok = ok && r.ok;
      arr.push_back({{"k", r.k},
                     {"y", r.y},
                     {"freq", r.freq},
                     {"bound", r.bound},
                     {"ok", r.ok}});
    }
    all_ok = all_ok && ok;
    j["large_deviation"] = {{"rows", arr}, {"ok", ok}};
  }

  {  // Stationary vector of the reflected chain against the closed form.
    bool ok = true;
    Environment env(dist, seed_master(cfg, 0));
    PotentialPath path = PotentialPath::build(env, -32, 32);
    CounterRng rng(derive_key(cfg.master_seed, kRoleOracle, 4));
    for (int t = 0; t < 30; ++t) {
      long a = -24 + static_cast<long>(rng.next_u01() * 24);
      long width = 4 + static_cast<long>(rng.next_u01() * 20);
      long c = a + width;
      long b = a + 1 + static_cast<long>(rng.next_u01() * (width - 1));
      if (b >= c) b = c - 1;
      ReflectedEnv renv(env, a, c);
      auto pi = stationary_bruteforce(renv);
      InvariantMeasure im = reflected_invariant_measure(path, a, b, c);
      double mu_total = 0.0;
      for (long x = a; x <= c; ++x) mu_total += im.mu_at(x);
      for (long x = a; x <= c; ++x) {
        double want = im.mu_at(x) / mu_total;
        ok = ok && std::abs(pi[x - a] - want) <= 1e-9 * std::max(want, 1e-12);
      }
    }
    all_ok = all_ok && ok;
    j["stationary"] = {{"ok", ok}};
  }

  j["all_ok"] = all_ok;
  emit(cfg, "verify", j);
  return all_ok ? kExitOk : kExitCheckFailed;
}

int cmd_tail(const RunConfig& cfg, std::uint64_t n_per_seed) {
  EnvDistribution dist = make_distribution(cfg);
  std::vector<std::vector<double>> heights(cfg.n_seeds);
  for_each_seed(cfg, cfg.n_seeds, [&](std::uint64_t s) {
    Environment env(dist, seed_master(cfg, s));
    PotentialPath path(env);
    long hi = static_cast<long>(4 * n_per_seed);
    path.ensure(0, hi);
    LadderDecomposition lad;
    for (;;) {
      lad = ladder(path, n_per_seed, false);
      if (!lad.exhausted) break;
      hi *= 2;
      path.extend_right(hi);
    }
    heights[s] = lad.heights;
  });
  std::vector<double> all;
  for (const auto& h : heights) all.insert(all.end(), h.begin(), h.end());

  auto span = lattice_span(dist);
  TailFit fit = tail_fit(all, span ? *span : 0.0);
  KappaSolution kap = solve_kappa(dist);

  json j = stamp(cfg);
  j["n_samples"] = all.size();
  j["kappa_hat"] = fit.kappa_hat;
  j["kappa_root"] = kap.kappa;
  j["c_lo"] = fit.c_lo;
  j["c_hi"] = fit.c_hi;
  j["fit_range"] = {fit.h_min, fit.h_max};
  j["n_points"] = fit.n_points;
  j["lattice_span"] = fit.span;
  emit(cfg, "tail", j);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random walks in random environments: simulation and checks"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--config", g.config_path, "key=value config file")->required();
  auto* seed_opt = app.add_option("--seed", g.seed, "override master_seed");
  app.add_option("--jobs", g.jobs, "worker threads for seed-parallel commands");
  app.add_option("--out-dir", g.out_dir, "directory for JSON artifacts");

  auto* c_env = app.add_subcommand("check-env", "distribution assumptions");
  auto* c_val = app.add_subcommand("valleys", "valley census per seed");
  long i_max = 6, window = 1 << 20;
  c_val->add_option("--imax", i_max, "deepest valley index to locate");
  c_val->add_option("--window", window, "potential window size in sites");
  auto* c_col = app.add_subcommand("collide", "d-walker meeting runs");
  auto* c_ver = app.add_subcommand("verify", "oracle cross-check sweep");
  int trials = 200;
  c_ver->add_option("--trials", trials, "random intervals per check");
  auto* c_tail = app.add_subcommand("tail", "excursion height tail fit");
  std::uint64_t n_heights = 20000;
  c_tail->add_option("--n", n_heights, "excursion heights per seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    g.seed_set = seed_opt->count() > 0;
    RunConfig cfg = load(g);
    if (c_env->parsed()) return cmd_check_env(cfg);
    if (c_val->parsed()) return cmd_valleys(cfg, i_max, window);
    if (c_col->parsed()) return cmd_collide(cfg);
    if (c_ver->parsed()) return cmd_verify(cfg, trials);
    if (c_tail->parsed()) return cmd_tail(cfg, n_heights);
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
