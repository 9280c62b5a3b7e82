#include "core/kelly.hpp"

#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace wealthlab {

namespace {

void check_p(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::Domain, "growth rate requires 0 < p < 1");
  }
}

}  // namespace

double growth_rate(double p, double gamma) {
  check_p(p);
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::Domain, "growth rate requires 0 <= gamma < 1");
  }
  if (gamma == 0.0) return 0.0;
  return p * std::log1p(gamma) + (1.0 - p) * std::log1p(-gamma);
}

double growth_rate_derivative(double p, double gamma) {
  check_p(p);
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::Domain, "growth rate requires 0 <= gamma < 1");
  }
  return ((2.0 * p - 1.0) - gamma) / (1.0 - gamma * gamma);
}

double kelly_fraction(double p) {
  check_p(p);
  if (p <= 0.5) {
    throw Error(ErrorCode::Domain, "kelly fraction requires an edge (p > 1/2)");
  }
  return 2.0 * p - 1.0;
}

double ruin_threshold(double p, double tol) {
  const double gstar = kelly_fraction(p);  // throws for p <= 1/2
  if (!(tol > 0.0)) {
    throw Error(ErrorCode::Domain, "ruin threshold requires tol > 0");
  }

  // g is positive at gamma* and decreases to -inf on (gamma*, 1).
  double lo = gstar;
  double hi = std::nextafter(1.0, 0.0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (growth_rate(p, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-13) break;
  }
  double x = 0.5 * (lo + hi);

  // Newton polish inside the bisection basin.
  for (int i = 0; i < 64; ++i) {
    const double g = growth_rate(p, x);
    const double gp = growth_rate_derivative(p, x);
    if (std::abs(g) <= tol * std::max(std::abs(gp), 1.0)) return x;
    const double step = g / gp;
    double next = x - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (growth_rate(p, next) > 0.0) {
      lo = next;
    } else {
      hi = next;
    }
    x = next;
  }
  const double g = growth_rate(p, x);
  const double gp = growth_rate_derivative(p, x);
  if (std::abs(g) <= tol * std::max(std::abs(gp), 1.0)) return x;
  throw Error(ErrorCode::SolverFailure, "ruin threshold: tolerance not met");
}

double expected_gain(const ModelParams& params, double x) {
  require_valid(params);
  if (!(x >= 0.0)) {
    throw Error(ErrorCode::Domain, "expected gain requires x >= 0");
  }
  return (2.0 * params.p - 1.0) * params.gamma * x;
}

std::vector<double> bankroll_path(double p, double gamma, double x0,
                                  const std::vector<bool>& outcomes) {
  check_p(p);
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::Domain, "bankroll path requires 0 <= gamma < 1");
  }
  if (!(x0 > 0.0)) {
    throw Error(ErrorCode::Domain, "bankroll path requires x0 > 0");
  }
  std::vector<double> path;
  path.reserve(outcomes.size() + 1);
  path.push_back(x0);
  double x = x0;
  for (bool win : outcomes) {
    x *= win ? (1.0 + gamma) : (1.0 - gamma);
    path.push_back(x);
  }
  return path;
}

GrowthProfile growth_profile(double p, const std::vector<double>& gamma_grid,
                             double tol) {
  GrowthProfile prof;
  prof.p = p;
  prof.gamma_star = kelly_fraction(p);
  prof.gamma_zero = ruin_threshold(p, tol);
  prof.gammas = gamma_grid;
  prof.g.reserve(gamma_grid.size());
  for (double gamma : gamma_grid) prof.g.push_back(growth_rate(p, gamma));
  return prof;
}

}  // namespace wealthlab
