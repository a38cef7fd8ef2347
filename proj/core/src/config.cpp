#include "rwre/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rwre {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + key + ": '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError("bad integer for " + key + ": '" + v + "'");
  return out;
}

template <class T, class F>
std::vector<T> parse_list(const std::string& key, const std::string& v, F one) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(one(key, trim(item)));
  if (out.empty()) throw ConfigError("empty list for " + key);
  return out;
}

std::string fmt(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

}  // namespace

RunConfig parse_config(std::istream& is) {
  RunConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));

    if (key == "kind") cfg.kind = val;
    else if (key == "p_low") cfg.p_low = parse_double(key, val);
    else if (key == "p_high") cfg.p_high = parse_double(key, val);
    else if (key == "q") cfg.q = parse_double(key, val);
    else if (key == "omegas") cfg.omegas = parse_list<double>(key, val, parse_double);
    else if (key == "masses") cfg.masses = parse_list<double>(key, val, parse_double);
    else if (key == "epsilon0") cfg.epsilon0 = parse_double(key, val);
    else if (key == "epsilon") cfg.epsilon = parse_double(key, val);
    else if (key == "c0") cfg.c0 = parse_double(key, val);
    else if (key == "c2") cfg.c2 = parse_double(key, val);
    else if (key == "c4") cfg.c4 = parse_double(key, val);
    else if (key == "master_seed") cfg.master_seed = parse_u64(key, val);
    else if (key == "n_seeds") cfg.n_seeds = parse_u64(key, val);
    else if (key == "d") cfg.d = parse_u64(key, val);
    else if (key == "starts")
      cfg.starts = parse_list<long>(key, val, [](const std::string& k, const std::string& v2) {
        return static_cast<long>(parse_double(k, v2));
      });
    else if (key == "horizon") cfg.horizon = parse_u64(key, val);
    else if (key == "jobs") cfg.jobs = static_cast<unsigned>(parse_u64(key, val));
    else if (key == "out_dir") cfg.out_dir = val;
    else throw ConfigError("unknown key '" + key + "' at line " + std::to_string(lineno));
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  return parse_config(f);
}

void validate(const RunConfig& cfg) {
  if (cfg.kind != "two_point" && cfg.kind != "finite")
    throw ConfigError("kind must be two_point or finite");
  if (cfg.kind == "finite") {
    if (cfg.omegas.empty() || cfg.omegas.size() != cfg.masses.size())
      throw ConfigError("finite kind needs matching omegas and masses lists");
  }
  if (cfg.d == 0) throw ConfigError("d must be positive");
  if (cfg.d > 64) throw ConfigError("d capped at 64 walkers");
  if (!cfg.starts.empty() && cfg.starts.size() != cfg.d)
    throw ConfigError("starts must have one entry per walker");
  if (cfg.n_seeds == 0) throw ConfigError("n_seeds must be positive");
  if (cfg.jobs == 0) throw ConfigError("jobs must be positive");
  if (cfg.horizon == 0) throw ConfigError("horizon must be positive");
  if (!(cfg.epsilon > 0)) throw ConfigError("epsilon must be positive");
  // Distribution-level constraints (ellipticity, masses) are re-checked by
  // make_distribution, which throws with its own message.
}

EnvDistribution make_distribution(const RunConfig& cfg) {
  if (cfg.kind == "two_point")
    return EnvDistribution::two_point(cfg.p_low, cfg.p_high, cfg.q, cfg.epsilon0);
  std::vector<EnvAtom> atoms;
  for (std::size_t i = 0; i < cfg.omegas.size(); ++i)
    atoms.push_back({cfg.omegas[i], cfg.masses[i]});
  return EnvDistribution(std::move(atoms), cfg.epsilon0);
}

std::string canonical_text(const RunConfig& cfg) {
  std::ostringstream os;
  os << "kind=" << cfg.kind << '\n';
  if (cfg.kind == "two_point") {
    os << "p_low=" << fmt(cfg.p_low) << '\n'
       << "p_high=" << fmt(cfg.p_high) << '\n'
       << "q=" << fmt(cfg.q) << '\n';
  } else {
    os << "omegas=";
    for (std::size_t i = 0; i < cfg.omegas.size(); ++i)
      os << (i ? "," : "") << fmt(cfg.omegas[i]);
    os << "\nmasses=";
    for (std::size_t i = 0; i < cfg.masses.size(); ++i)
      os << (i ? "," : "") << fmt(cfg.masses[i]);
    os << '\n';
  }
  os << "epsilon0=" << fmt(cfg.epsilon0) << '\n'
     << "epsilon=" << fmt(cfg.epsilon) << '\n'
     << "c0=" << fmt(cfg.c0) << '\n'
     << "c2=" << fmt(cfg.c2) << '\n'
     << "c4=" << fmt(cfg.c4) << '\n'
     << "master_seed=" << cfg.master_seed << '\n'
     << "n_seeds=" << cfg.n_seeds << '\n'
     << "d=" << cfg.d << '\n';
  os << "starts=";
  for (std::size_t i = 0; i < cfg.starts.size(); ++i)
    os << (i ? "," : "") << cfg.starts[i];
  os << '\n' << "horizon=" << cfg.horizon << '\n';
  // jobs and out_dir are execution details, not part of the run identity.
  return os.str();
}

std::uint64_t config_hash(const RunConfig& cfg) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical_text(cfg)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace rwre
