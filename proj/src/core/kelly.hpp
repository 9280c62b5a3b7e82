#ifndef WEALTHLAB_CORE_KELLY_HPP
#define WEALTHLAB_CORE_KELLY_HPP

#include <cstdint>
#include <vector>

#include "core/model.hpp"

namespace wealthlab {

// Expected log-growth per round, g(gamma) = p log(1+gamma) + q log(1-gamma).
// Returns exact 0 at gamma == 0. Throws Error(Domain) outside 0 < p < 1 or
// 0 <= gamma < 1.
double growth_rate(double p, double gamma);

// Closed form of g'(gamma) = ((2p-1) - gamma) / (1 - gamma^2).
double growth_rate_derivative(double p, double gamma);

// gamma* = 2p - 1, the wagered fraction maximizing g. Requires p > 1/2.
double kelly_fraction(double p);

// gamma_0, the root of g on (gamma*, 1): beyond it the expected log-growth is
// negative. Bracketed bisection seeded on [gamma*, 1) with a Newton polish;
// stops when |g(x)| <= tol * max(|g'(x)|, 1) (backward-error contract).
// Requires p > 1/2 and tol > 0.
double ruin_threshold(double p, double tol = 1e-12);

// One-round expected wealth gain (2p-1) * gamma * x.
double expected_gain(const ModelParams& params, double x);

// X_k = x0 * prod_{i<k} (1 + eps_i gamma); outcomes[i] true = win.
// Result has outcomes.size() + 1 entries, starting with x0.
std::vector<double> bankroll_path(double p, double gamma, double x0,
                                  const std::vector<bool>& outcomes);

// Sampled g curve with its two distinguished points for a fixed p > 1/2.
struct GrowthProfile {
  double p = 0;
  double gamma_star = 0;
  double gamma_zero = 0;
  std::vector<double> gammas;
  std::vector<double> g;  // g[i] = growth_rate(p, gammas[i])
};

GrowthProfile growth_profile(double p, const std::vector<double>& gamma_grid,
                             double tol = 1e-12);

}  // namespace wealthlab

#endif
