#ifndef WEALTHLAB_CORE_DENSITY_HPP
#define WEALTHLAB_CORE_DENSITY_HPP

#include <cstdint>
#include <vector>

#include "core/model.hpp"

namespace wealthlab {

// Uniform grid in log-wealth s = log x. Default spans [-20, 60] with 4096
// nodes: wide enough to absorb ~1e3 iterations of drift for typical gamma
// without contaminating the tail window.
struct GridSpec {
  double log_x_min = -20.0;
  double log_x_max = 60.0;
  std::size_t n = 4096;

  double delta() const { return (log_x_max - log_x_min) / static_cast<double>(n - 1); }
  double log_x(std::size_t i) const { return log_x_min + delta() * static_cast<double>(i); }
};

// Density values f(x) >= 0 sampled at grid nodes x_i = e^{s_i}.
// truncation_mass accumulates the mass lost past the grid edges across
// operator applications (explicit accounting instead of silent bias).
struct GridDensity {
  GridSpec grid;
  std::vector<double> values;
  double truncation_mass = 0.0;
};

GridDensity make_density(const GridSpec& spec);  // zero density

// Initial profiles used by the evolve pipeline and tests.
GridDensity fill_truncated_exponential(const GridSpec& spec, double rate, double x_cut);
GridDensity fill_power_law(const GridSpec& spec, double rho);  // f(x) = x^rho
GridDensity fill_log_gaussian(const GridSpec& spec, double center_log_x, double width);

// Trapezoidal integral of f over the grid in linear x:
//   int f(x) dx = int f(e^s) e^s ds.
double l1_mass(const GridDensity& f);

// Node masses under the rectangle rule, m_i = f_i x_i delta. This is the
// measure the push-forward transports exactly.
std::vector<double> node_masses(const GridDensity& f);

enum class OperatorForm {
  PushForward,    // transports node masses under x -> x(1 +/- gamma); conserves
                  // total mass exactly up to edge truncation
  Interpolation,  // evaluates the one-round formula by log-density interpolation
};

// One application of the evolution operator
//   g(x) = (1/kappa) [ p/(1+gamma) f(x/(1+gamma)) + q/(1-gamma) f(x/(1-gamma)) ].
// Off-grid reads contribute 0; the lost mass of this application is added to
// the output's truncation_mass and also returned via *truncation_delta when
// non-null. Node loops are data-parallel with worker-count-independent output.
GridDensity apply_operator(const GridDensity& f, const ModelParams& params,
                           OperatorForm form = OperatorForm::PushForward,
                           double* truncation_delta = nullptr);

enum class IterateMode {
  Plain,         // f <- W(f); mass decays by ~1/kappa per step for kappa > 1
  Renormalized,  // f <- W(f) / ||W(f)||; trace records the pre-normalization mass
  Recycle,       // f <- W(f) + deficit * f0/||f0||: the mass removed by
                 // dissipation and truncation re-enters through the initial
                 // profile, keeping total mass constant. The stationary state
                 // solves the one-round fixed-point equation exactly at every
                 // x beyond the support of f0, which pins its tail exponent.
};

struct MassTraceRow {
  std::uint64_t step = 0;
  double mass = 0.0;
  double truncation_mass = 0.0;
};

struct IterateResult {
  GridDensity density;
  std::vector<MassTraceRow> trace;  // row 0 = initial state, then one per step
};

// For Recycle, the re-injection profile defaults to f0; passing an explicit
// source keeps the profile fixed when the iteration is driven in chunks.
IterateResult iterate(const GridDensity& f0, const ModelParams& params,
                      std::uint64_t n_steps,
                      OperatorForm form = OperatorForm::PushForward,
                      IterateMode mode = IterateMode::Plain,
                      const GridDensity* source = nullptr);

// Least-squares slope of log f against log x over the window spanned by the
// given mass quantiles. alpha_hat = -slope.
struct TailFit {
  double alpha_hat = 0.0;
  double x_lo = 0.0;
  double x_hi = 0.0;
  double r2 = 0.0;
};

// Throws Error(InsufficientData) when the window holds fewer than 8 nodes
// with f > 0.
TailFit fit_tail(const GridDensity& f, double q_lo = 0.95, double q_hi = 0.999);

}  // namespace wealthlab

#endif
