#include "core/spectral.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "core/errors.hpp"

namespace wealthlab {

namespace {

constexpr double kExpSaturation = 700.0;  // exp argument beyond which we saturate
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_coeffs(const LogCoefficients& c) {
  if (!(c.lambda > 0.0) || !(c.mu > 0.0) || !(c.a > 0.0) || !(c.b > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "characteristic problem requires lambda, mu, a, b > 0");
  }
}

}  // namespace

double characteristic_h(const CharacteristicProblem& prob, double rho) {
  const auto& c = prob.coeffs;
  const double up = c.lambda * rho;
  const double dn = -c.mu * rho;
  if (up > kExpSaturation || dn > kExpSaturation) return kInf;
  return c.a * std::exp(up) - 1.0 + c.b * std::exp(dn);
}

double characteristic_h_prime(const CharacteristicProblem& prob, double rho) {
  const auto& c = prob.coeffs;
  const double up = c.lambda * rho;
  const double dn = -c.mu * rho;
  if (up > kExpSaturation) return kInf;
  if (dn > kExpSaturation) return -kInf;
  return c.a * c.lambda * std::exp(up) - c.b * c.mu * std::exp(dn);
}

double stationary_point(const CharacteristicProblem& prob) {
  const auto& c = prob.coeffs;
  check_coeffs(c);
  return std::log((c.mu * c.b) / (c.lambda * c.a)) / (c.lambda + c.mu);
}

double kappa_min(double p, double gamma) {
  if (!(p > 0.0 && p < 1.0) || !(gamma >= 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::Domain, "kappa_min requires 0 < p < 1 and 0 <= gamma < 1");
  }
  return (1.0 - (2.0 * p - 1.0) * gamma) / (1.0 - gamma * gamma);
}

const char* spectral_status_name(SpectralStatus s) {
  switch (s) {
    case SpectralStatus::TwoRootsAdmissible: return "two_roots";
    case SpectralStatus::Boundary: return "boundary";
    case SpectralStatus::SubcriticalRoots: return "subcritical_roots";
    case SpectralStatus::Tangent: return "tangent";
    case SpectralStatus::NoRealRoots: return "no_real_roots";
    case SpectralStatus::Degenerate: return "degenerate";
  }
  return "unknown";
}

namespace {

// Safeguarded Newton on a bracket with h(neg_end) < 0 < h(pos_end).
double refine_root(const CharacteristicProblem& prob, double neg_end, double pos_end,
                   double tol, SpectralResult& result) {
  double x = 0.5 * (neg_end + pos_end);
  for (int i = 0; i < 200; ++i) {
    const double hx = characteristic_h(prob, x);
    if (std::isfinite(hx) && std::abs(hx) <= tol) return x;
    if (hx < 0.0) {
      neg_end = x;
    } else {
      pos_end = x;
    }
    double next = x;
    const double hp = characteristic_h_prime(prob, x);
    if (std::isfinite(hx) && std::isfinite(hp) && hp != 0.0) {
      next = x - hx / hp;
    }
    const double lo = std::min(neg_end, pos_end);
    const double hi = std::max(neg_end, pos_end);
    if (!(next > lo && next < hi)) next = 0.5 * (neg_end + pos_end);
    x = next;
  }
  result.bracket_lo = std::min(neg_end, pos_end);
  result.bracket_hi = std::max(neg_end, pos_end);
  std::ostringstream oss;
  oss << "characteristic root: tolerance " << tol << " not met in 200 iterations;"
      << " last bracket [" << result.bracket_lo << ", " << result.bracket_hi << "]";
  throw Error(ErrorCode::SolverFailure, oss.str());
}

// Expands from rho_0 (where h < 0) in the given direction until h > 0.
double expand_bracket(const CharacteristicProblem& prob, double rho0, double step0,
                      int direction, SpectralResult& result) {
  double t = step0;
  for (int i = 0; i < 200; ++i) {
    const double x = rho0 + direction * t;
    if (characteristic_h(prob, x) > 0.0) return x;
    t *= 2.0;
  }
  result.bracket_lo = direction < 0 ? rho0 - t : rho0;
  result.bracket_hi = direction < 0 ? rho0 : rho0 + t;
  throw Error(ErrorCode::SolverFailure,
              "characteristic root: bracket expansion exceeded 200 doublings");
}

}  // namespace

SpectralResult solve_roots(const CharacteristicProblem& prob, double tol) {
  check_coeffs(prob.coeffs);
  if (!(tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "solve_roots requires tol > 0");
  }

  SpectralResult res;
  res.kappa_min = std::numeric_limits<double>::quiet_NaN();

  const auto& c = prob.coeffs;
  if (c.lambda + c.mu < 1e-12) {
    // gamma -> 0 collapse: h is numerically the constant a + b - 1.
    res.status = SpectralStatus::Degenerate;
    res.rho_0 = 0.0;
    return res;
  }

  res.rho_0 = stationary_point(prob);
  const double h0 = characteristic_h(prob, 0.0);
  const double hmin = characteristic_h(prob, res.rho_0);
  // Classification tolerance for values pinned to 0 by construction.
  const double eps_h = 64.0 * std::numeric_limits<double>::epsilon() * (c.a + c.b + 1.0);

  if (hmin > eps_h) {
    res.status = SpectralStatus::NoRealRoots;
    return res;
  }
  if (std::abs(hmin) <= eps_h) {
    res.status = SpectralStatus::Tangent;
    res.root_left = res.rho_0;
    res.root_right = res.rho_0;
    return res;
  }

  // hmin < 0: exactly two real roots, one on each side of rho_0.
  const double hpp = c.a * c.lambda * c.lambda * std::exp(c.lambda * res.rho_0) +
                     c.b * c.mu * c.mu * std::exp(-c.mu * res.rho_0);
  const double step0 = std::max(std::sqrt(-2.0 * hmin / hpp), 1e-3);

  const double left_out = expand_bracket(prob, res.rho_0, step0, -1, res);
  const double right_out = expand_bracket(prob, res.rho_0, step0, +1, res);
  double root_left = refine_root(prob, res.rho_0, left_out, tol, res);
  double root_right = refine_root(prob, res.rho_0, right_out, tol, res);

  if (h0 < -eps_h) {
    res.status = SpectralStatus::TwoRootsAdmissible;
    res.root_left = root_left;
    res.root_right = root_right;
    res.rho_neg = root_left;
    res.rho_pos = root_right;
    res.alpha = -root_left;
    res.summable = *res.alpha > 1.0;
  } else if (h0 <= eps_h) {
    // Boundary kappa = kappa_0: one root sits at 0 exactly; snap it.
    res.status = SpectralStatus::Boundary;
    if (res.rho_0 < 0.0) {
      root_right = 0.0;
    } else {
      root_left = 0.0;
    }
    res.root_left = root_left;
    res.root_right = root_right;
  } else {
    res.status = SpectralStatus::SubcriticalRoots;
    res.root_left = root_left;
    res.root_right = root_right;
    if (root_right > 0.0) res.rho_pos = root_right;
  }
  return res;
}

SpectralResult admissible_alpha(const ModelParams& params, double tol) {
  CharacteristicProblem prob{log_coefficients(params)};
  SpectralResult res = solve_roots(prob, tol);
  res.kappa_min = kappa_min(params.p, params.gamma);
  return res;
}

}  // namespace wealthlab
