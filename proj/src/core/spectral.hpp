#ifndef WEALTHLAB_CORE_SPECTRAL_HPP
#define WEALTHLAB_CORE_SPECTRAL_HPP

#include <optional>
#include <string>

#include "core/model.hpp"

namespace wealthlab {

// The characteristic map rho -> a e^{lambda rho} - 1 + b e^{-mu rho}.
// Convex, tends to +inf at both ends; its real zeros are the exponents of
// the pure-exponential solutions F(x) = e^{rho x} of the log-variable
// one-round equation a F(x+lambda) - F(x) + b F(x-mu) = 0.
struct CharacteristicProblem {
  LogCoefficients coeffs;
};

// Saturates to +inf instead of overflowing when |lambda*rho| or |mu*rho|
// exceeds the exponent range.
double characteristic_h(const CharacteristicProblem& prob, double rho);

// Derivative a lambda e^{lambda rho} - b mu e^{-mu rho} (same saturation).
double characteristic_h_prime(const CharacteristicProblem& prob, double rho);

// rho_0 = log(mu b / (lambda a)) / (lambda + mu), the unique minimum of h.
double stationary_point(const CharacteristicProblem& prob);

// kappa_0 = (1 - (2p-1) gamma) / (1 - gamma^2): the admissibility threshold.
// h(0) < 0 iff kappa > kappa_0; kappa_0 > 1 iff gamma > 2p-1.
double kappa_min(double p, double gamma);

enum class SpectralStatus {
  TwoRootsAdmissible,  // h(0) < 0: one negative and one positive real root
  Boundary,            // h(0) = 0: rho = 0 is a root; no admissible exponent
  SubcriticalRoots,    // h(0) > 0 but h(rho_0) < 0: two real roots, same sign
  Tangent,             // h(rho_0) = 0: double root at rho_0
  NoRealRoots,         // h(rho_0) > 0
  Degenerate,          // lambda + mu ~ 0: h is effectively constant
};

const char* spectral_status_name(SpectralStatus s);

struct SpectralResult {
  SpectralStatus status = SpectralStatus::NoRealRoots;
  double rho_0 = 0;
  double kappa_min = 0;  // filled when built from ModelParams, else NaN

  // All real roots found, ordered (present per status).
  std::optional<double> root_left;
  std::optional<double> root_right;

  // Admissible decomposition: present only when h(0) < 0 (kappa > kappa_0).
  std::optional<double> rho_neg;
  std::optional<double> rho_pos;
  std::optional<double> alpha;  // -rho_neg
  bool summable = false;        // alpha > 1

  // Last bracket examined; populated on solver failure for diagnosis.
  double bracket_lo = 0;
  double bracket_hi = 0;
};

// Finds the real zeros of h to |h(root)| <= tol. Throws Error(SolverFailure)
// with the last bracket recorded if the residual tolerance cannot be met.
SpectralResult solve_roots(const CharacteristicProblem& prob, double tol = 1e-13);

// Full pipeline from model parameters: builds coefficients, solves, and
// fills kappa_min. alpha is present iff kappa > kappa_0.
SpectralResult admissible_alpha(const ModelParams& params, double tol = 1e-13);

}  // namespace wealthlab

#endif
