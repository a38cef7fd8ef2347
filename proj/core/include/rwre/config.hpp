#pragma once
// key = value run configuration shared by the CLI tools.  Everything that
// influences a run's output is in here, and the canonical hash of the
// parsed struct is stamped into every artifact so outputs can be matched
// to the exact configuration that produced them.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rwre/env.hpp"

namespace rwre {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // Environment law.
  std::string kind = "two_point";     // "two_point" or "finite"
  double p_low = 0.25, p_high = 0.75; // two_point marks
  double q = 0.3;                     // mass of the low mark
  std::vector<double> omegas, masses; // finite support
  double epsilon0 = 0.05;

  // Valley schedule.
  double epsilon = 0.1;
  double c0 = 1.0;
  double c2 = 1.0;
  double c4 = 0.0;  // 0 = derived from the distribution

  // Runs.
  std::uint64_t master_seed = 1;
  std::uint64_t n_seeds = 8;
  std::uint64_t d = 2;
  std::vector<long> starts;  // empty = all walkers at 0
  std::uint64_t horizon = 100000;
  unsigned jobs = 1;
  std::string out_dir = ".";
};

// Parses "key = value" lines; '#' starts a comment; lists are
// comma-separated.  Unknown keys and malformed values throw ConfigError.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

// Cross-field checks beyond what parsing can see.  Throws ConfigError.
void validate(const RunConfig& cfg);

EnvDistribution make_distribution(const RunConfig& cfg);

// Canonical serialization: fixed key order, shortest round-trip floats.
std::string canonical_text(const RunConfig& cfg);

// FNV-1a over the canonical text.
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace rwre
