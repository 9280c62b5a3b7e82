#ifndef WEALTHLAB_CORE_MODEL_HPP
#define WEALTHLAB_CORE_MODEL_HPP

#include <string>
#include <vector>

namespace wealthlab {

// The parameter triple every other module reads from.
//   p     : win probability of a single round, 0 < p < 1
//   gamma : fraction of wealth wagered per round, 0 < gamma < 1
//   kappa : dissipative coefficient, kappa >= 1 (1 = conservative)
struct ModelParams {
  double p = 0.6;
  double gamma = 0.2;
  double kappa = 1.0;
};

struct ValidationReport {
  bool valid = true;                    // no hard violations
  std::vector<std::string> violations;  // hard constraint failures
  std::vector<std::string> advisories;  // e.g. "no edge: p <= 1/2"
};

// Reports constraint status; never throws.
ValidationReport validate(const ModelParams& params);

// Throws Error(Domain) when validate() reports a hard violation.
void require_valid(const ModelParams& params);

// Log-variable coefficients of the one-round update:
//   lambda = -log(1 - gamma)   log-step down on a loss
//   mu     =  log(1 + gamma)   log-step up on a win
//   a      =  q / (kappa (1 - gamma))
//   b      =  p / (kappa (1 + gamma))
struct LogCoefficients {
  double lambda = 0;
  double mu = 0;
  double a = 0;
  double b = 0;
};

LogCoefficients log_coefficients(const ModelParams& params);

}  // namespace wealthlab

#endif
