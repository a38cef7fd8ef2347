#include "rwre/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rwre {

EnvDistribution::EnvDistribution(std::vector<EnvAtom> atoms, double epsilon0)
    : atoms_(std::move(atoms)), epsilon0_(epsilon0) {
  if (atoms_.empty()) throw InvalidDistribution("empty support");
  if (!(epsilon0_ > 0.0 && epsilon0_ < 0.5))
    throw InvalidDistribution("epsilon0 must lie in (0, 1/2)");
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (!(a.omega > 0.0 && a.omega < 1.0))
      throw InvalidDistribution("omega support must lie in (0,1)");
    if (!(a.mass > 0.0)) throw InvalidDistribution("masses must be positive");
    total += a.mass;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw InvalidDistribution("masses must sum to 1");

  cdf_.reserve(atoms_.size());
  log_rho_.reserve(atoms_.size());
  double acc = 0.0;
  for (const auto& a : atoms_) {
    acc += a.mass;
    cdf_.push_back(acc);
    log_rho_.push_back(std::log((1.0 - a.omega) / a.omega));
  }
  cdf_.back() = 1.0;

  mean_log_rho_ = 0.0;
  min_log_rho_ = std::numeric_limits<double>::infinity();
  max_log_rho_ = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    mean_log_rho_ += atoms_[i].mass * log_rho_[i];
    min_log_rho_ = std::min(min_log_rho_, log_rho_[i]);
    max_log_rho_ = std::max(max_log_rho_, log_rho_[i]);
  }
}

EnvDistribution EnvDistribution::two_point(double p_low, double p_high, double q,
                                           double epsilon0) {
  if (!(q > 0.0 && q < 1.0)) throw InvalidDistribution("q must lie in (0,1)");
  return EnvDistribution({{p_low, q}, {p_high, 1.0 - q}}, epsilon0);
}

std::size_t EnvDistribution::index_for(double u) const noexcept {
  std::size_t i = 0;
  while (i + 1 < cdf_.size() && u >= cdf_[i]) ++i;
  return i;
}

double EnvDistribution::moment_rho(double t) const noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    m += atoms_[i].mass * std::exp(t * log_rho_[i]);
  return m;
}

double EnvDistribution::log_mgf(double t) const noexcept {
  // log E[rho^t] with the max exponent pulled out, safe for large |t|.
  double mx = -std::numeric_limits<double>::infinity();
  for (double lr : log_rho_) mx = std::max(mx, t * lr);
  double s = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    s += atoms_[i].mass * std::exp(t * log_rho_[i] - mx);
  return mx + std::log(s);
}

std::string EnvDistribution::describe() const {
  std::ostringstream os;
  os << "finite{";
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (i) os << ", ";
    os << "omega=" << atoms_[i].omega << ":" << atoms_[i].mass;
  }
  os << "} eps0=" << epsilon0_;
  return os.str();
}

KappaSolution solve_kappa(const EnvDistribution& dist, double tol) {
  if (!(dist.mean_log_rho() < 0.0))
    throw NoKappa("E[log rho] >= 0: walk not transient to the right");
  if (!(dist.max_log_rho() > 0.0))
    throw NoKappa("no support point with rho > 1: E[rho^t] < 1 for all t > 0");

  // log E[rho^t] is convex, zero at t=0 with negative slope, and positive
  // for large t; bracket the positive root then bisect.
  double lo = 0.0, hi = 1.0;
  while (dist.log_mgf(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw NoKappa("root bracket exceeded t = 1e6");
  }
  for (int it = 0; it < 200 && hi - lo > tol * std::max(1.0, hi); ++it) {
    double mid = 0.5 * (lo + hi);
    if (dist.log_mgf(mid) <= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  KappaSolution s;
  s.kappa = 0.5 * (lo + hi);
  s.in_unit_interval = s.kappa > 0.0 && s.kappa < 1.0;
  s.residual = std::abs(dist.moment_rho(s.kappa) - 1.0);
  return s;
}

SubExponent sub_exponent(const EnvDistribution& dist, double kappa) {
  SubExponent se;
  se.kappa0 = 0.5 * kappa;
  se.v0 = dist.moment_rho(se.kappa0);
  return se;
}

namespace {

// Derivative of the log-MGF, computed with the max exponent pulled out.
double log_mgf_prime(const EnvDistribution& dist, double t) {
  const auto& atoms = dist.atoms();
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < atoms.size(); ++i)
    mx = std::max(mx, t * dist.log_rho(i));
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    double w = atoms[i].mass * std::exp(t * dist.log_rho(i) - mx);
    num += w * dist.log_rho(i);
    den += w;
  }
  return num / den;
}

}  // namespace

double rate_function(const EnvDistribution& dist, double y) {
  if (y < 0.0) throw std::invalid_argument("rate_function: y must be >= 0");
  const double mx = dist.max_log_rho();
  const double edge_tol = 1e-12;
  if (y > mx + edge_tol) return std::numeric_limits<double>::infinity();
  if (y >= mx - edge_tol) {
    // Boundary: sup_t [t*mx - log E rho^t] = -log P(log rho = max).
    double mass = 0.0;
    for (std::size_t i = 0; i < dist.atoms().size(); ++i)
      if (dist.log_rho(i) >= mx - edge_tol) mass += dist.atoms()[i].mass;
    return -std::log(mass);
  }

  // Interior: phi(t) = t*y - log_mgf(t) is concave with phi'(0) >= 0;
  // widen until the slope goes negative, then ternary search.
  double hi = 1.0;
  while (y - log_mgf_prime(dist, hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e9) break;
  }
  double lo = 0.0;
  auto phi = [&](double t) { return t * y - dist.log_mgf(t); };
  for (int it = 0; it < 300 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
    double m1 = lo + (hi - lo) / 3.0;
    double m2 = hi - (hi - lo) / 3.0;
    if (phi(m1) < phi(m2))
      lo = m1;
    else
      hi = m2;
  }
  return phi(0.5 * (lo + hi));
}

std::optional<double> lattice_span(const EnvDistribution& dist) {
  std::vector<double> vals;
  for (std::size_t i = 0; i < dist.atoms().size(); ++i)
    if (std::abs(dist.log_rho(i)) > 1e-12) vals.push_back(std::abs(dist.log_rho(i)));
  if (vals.empty()) return std::nullopt;  // rho identically 1, degenerate
  double scale = *std::max_element(vals.begin(), vals.end());
  double tol = 1e-9 * scale;
  double g = vals[0];
  for (std::size_t i = 1; i < vals.size(); ++i) {
    double a = g, b = vals[i];
    // Euclid on reals, stopping at tolerance.
    for (int it = 0; it < 200 && b > tol; ++it) {
      double r = std::fmod(a, b);
      a = b;
      b = r;
    }
    g = a;
    if (g < 1e-6 * scale) return std::nullopt;
  }
  // All support points must sit on g*Z to working precision.
  for (double v : vals) {
    double k = std::round(v / g);
    if (std::abs(v - k * g) > 1e-6 * g) return std::nullopt;
  }
  return g;
}

AssumptionReport check_assumptions(const EnvDistribution& dist) {
  AssumptionReport r;
  r.uniformly_elliptic = true;
  for (const auto& a : dist.atoms())
    if (a.omega < dist.epsilon0() - 1e-15 || a.omega > 1.0 - dist.epsilon0() + 1e-15)
      r.uniformly_elliptic = false;
  r.mean_log_rho = dist.mean_log_rho();
  r.transient_right = dist.mean_log_rho() < 0.0;
  try {
    KappaSolution k = solve_kappa(dist);
    r.has_kappa = true;
    r.kappa = k.kappa;
    r.kappa_in_unit_interval = k.in_unit_interval;
    SubExponent se = sub_exponent(dist, k.kappa);
    r.kappa0 = se.kappa0;
    r.v0 = se.v0;
  } catch (const NoKappa&) {
    r.has_kappa = false;
  }
  r.span = lattice_span(dist);
  return r;
}

}  // namespace rwre
