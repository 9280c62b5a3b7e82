#include "core/model.hpp"

#include <cmath>
#include <sstream>

#include "core/errors.hpp"

namespace wealthlab {

ValidationReport validate(const ModelParams& params) {
  ValidationReport rep;
  auto hard = [&rep](const std::string& msg) {
    rep.valid = false;
    rep.violations.push_back(msg);
  };

  if (!(params.p > 0.0 && params.p < 1.0) || !std::isfinite(params.p)) {
    hard("p out of range: requires 0 < p < 1");
  } else if (params.p <= 0.5) {
    rep.advisories.push_back("no edge: p <= 1/2");
  }
  if (!(params.gamma > 0.0 && params.gamma < 1.0) || !std::isfinite(params.gamma)) {
    hard("gamma out of range: requires 0 < gamma < 1");
  }
  if (!(params.kappa >= 1.0) || !std::isfinite(params.kappa)) {
    hard("kappa out of range: requires kappa >= 1");
  }
  return rep;
}

void require_valid(const ModelParams& params) {
  ValidationReport rep = validate(params);
  if (rep.valid) return;
  std::ostringstream oss;
  oss << "invalid model parameters:";
  for (const auto& v : rep.violations) oss << ' ' << v << ';';
  throw Error(ErrorCode::Domain, oss.str());
}

LogCoefficients log_coefficients(const ModelParams& params) {
  require_valid(params);
  const double q = 1.0 - params.p;
  LogCoefficients c;
  c.lambda = -std::log1p(-params.gamma);
  c.mu = std::log1p(params.gamma);
  c.a = q / (params.kappa * (1.0 - params.gamma));
  c.b = params.p / (params.kappa * (1.0 + params.gamma));
  return c;
}

}  // namespace wealthlab
