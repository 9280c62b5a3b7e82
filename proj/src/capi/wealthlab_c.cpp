#include "wealthlab/wealthlab.h"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "core/abm.hpp"
#include "core/density.hpp"
#include "core/errors.hpp"
#include "core/io.hpp"
#include "core/kelly.hpp"
#include "core/model.hpp"
#include "core/runner.hpp"
#include "core/spectral.hpp"

namespace {

thread_local std::string t_last_message;
thread_local std::string t_last_json;
thread_local std::string t_last_code = "unknown";

wl_status to_status(wealthlab::ErrorCode code) {
  using wealthlab::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return WL_ERR_INVALID_ARGUMENT;
    case ErrorCode::Domain: return WL_ERR_DOMAIN;
    case ErrorCode::SolverFailure: return WL_ERR_SOLVER_FAILURE;
    case ErrorCode::InsufficientData: return WL_ERR_INSUFFICIENT_DATA;
    case ErrorCode::Io: return WL_ERR_IO;
    case ErrorCode::Config: return WL_ERR_CONFIG;
    case ErrorCode::Resource: return WL_ERR_RESOURCE;
  }
  return WL_ERR_UNKNOWN;
}

void record_error(const std::string& code_name, const std::string& message) {
  t_last_code = code_name;
  t_last_message = message;
  wealthlab::JsonWriter w;
  w.begin_object();
  w.key("error").begin_object();
  w.key("code").value(code_name);
  w.key("message").value(message);
  w.end_object();
  w.end_object();
  t_last_json = w.str();
}

// Runs fn, converting exceptions into status codes + thread-local messages.
template <typename Fn>
wl_status guarded(Fn&& fn) {
  try {
    fn();
    return WL_OK;
  } catch (const wealthlab::Error& e) {
    record_error(wealthlab::error_code_name(e.code()), e.what());
    return to_status(e.code());
  } catch (const std::exception& e) {
    record_error("unknown", e.what());
    return WL_ERR_UNKNOWN;
  } catch (...) {
    record_error("unknown", "unidentified failure");
    return WL_ERR_UNKNOWN;
  }
}

wl_status invalid(const char* message) {
  record_error("invalid_argument", message);
  return WL_ERR_INVALID_ARGUMENT;
}

wealthlab::ModelParams to_params(const wl_params& p) {
  return wealthlab::ModelParams{p.p, p.gamma, p.kappa};
}

wealthlab::LogCoefficients to_coeffs(const wl_log_coeffs& c) {
  wealthlab::LogCoefficients lc;
  lc.lambda = c.lambda;
  lc.mu = c.mu;
  lc.a = c.a;
  lc.b = c.b;
  return lc;
}

void fill_spectral(const wealthlab::SpectralResult& r, wl_spectral_result* out) {
  std::memset(out, 0, sizeof(*out));
  switch (r.status) {
    case wealthlab::SpectralStatus::TwoRootsAdmissible:
      out->status = WL_SPECTRAL_TWO_ROOTS;
      break;
    case wealthlab::SpectralStatus::Boundary:
      out->status = WL_SPECTRAL_BOUNDARY;
      break;
    case wealthlab::SpectralStatus::SubcriticalRoots:
      out->status = WL_SPECTRAL_SUBCRITICAL;
      break;
    case wealthlab::SpectralStatus::Tangent:
      out->status = WL_SPECTRAL_TANGENT;
      break;
    case wealthlab::SpectralStatus::NoRealRoots:
      out->status = WL_SPECTRAL_NO_REAL_ROOTS;
      break;
    case wealthlab::SpectralStatus::Degenerate:
      out->status = WL_SPECTRAL_DEGENERATE;
      break;
  }
  out->rho_0 = r.rho_0;
  out->kappa_min = r.kappa_min;
  if ((out->has_root_left = r.root_left.has_value())) out->root_left = *r.root_left;
  if ((out->has_root_right = r.root_right.has_value())) out->root_right = *r.root_right;
  if ((out->has_rho_neg = r.rho_neg.has_value())) out->rho_neg = *r.rho_neg;
  if ((out->has_rho_pos = r.rho_pos.has_value())) out->rho_pos = *r.rho_pos;
  if ((out->has_alpha = r.alpha.has_value())) out->alpha = *r.alpha;
  out->summable = r.summable ? 1 : 0;
}

}  // namespace

struct wl_density {
  wealthlab::GridDensity d;
};

struct wl_simulation {
  wealthlab::Simulation sim;
};

extern "C" {

const char* wl_status_name(wl_status status) {
  switch (status) {
    case WL_OK: return "ok";
    case WL_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case WL_ERR_DOMAIN: return "domain";
    case WL_ERR_SOLVER_FAILURE: return "solver_failure";
    case WL_ERR_INSUFFICIENT_DATA: return "insufficient_data";
    case WL_ERR_IO: return "io";
    case WL_ERR_CONFIG: return "config";
    case WL_ERR_RESOURCE: return "resource";
    case WL_ERR_UNKNOWN: return "unknown";
  }
  return "unknown";
}

const char* wl_version(void) { return "0.1.0"; }

const char* wl_last_error_message(void) { return t_last_message.c_str(); }
const char* wl_last_error_json(void) { return t_last_json.c_str(); }

/* ---- model ---- */

wl_status wl_params_validate(const wl_params* params, uint32_t* hard_mask,
                             uint32_t* advisory_mask) {
  if (!params) return invalid("params is null");
  return guarded([&] {
    const wealthlab::ValidationReport rep = wealthlab::validate(to_params(*params));
    uint32_t hard = 0, advisory = 0;
    for (const auto& v : rep.violations) {
      if (v.find("p out of range") != std::string::npos) hard |= WL_VIOLATION_P;
      if (v.find("gamma") != std::string::npos) hard |= WL_VIOLATION_GAMMA;
      if (v.find("kappa") != std::string::npos) hard |= WL_VIOLATION_KAPPA;
    }
    for (const auto& a : rep.advisories) {
      if (a.find("no edge") != std::string::npos) advisory |= WL_ADVISORY_NO_EDGE;
    }
    if (hard_mask) *hard_mask = hard;
    if (advisory_mask) *advisory_mask = advisory;
  });
}

wl_status wl_log_coefficients(const wl_params* params, wl_log_coeffs* out) {
  if (!params || !out) return invalid("params/out is null");
  return guarded([&] {
    const wealthlab::LogCoefficients c = wealthlab::log_coefficients(to_params(*params));
    out->lambda = c.lambda;
    out->mu = c.mu;
    out->a = c.a;
    out->b = c.b;
  });
}

/* ---- kelly ---- */

wl_status wl_growth_rate(double p, double gamma, double* out) {
  if (!out) return invalid("out is null");
  return guarded([&] { *out = wealthlab::growth_rate(p, gamma); });
}

wl_status wl_growth_rate_derivative(double p, double gamma, double* out) {
  if (!out) return invalid("out is null");
  return guarded([&] { *out = wealthlab::growth_rate_derivative(p, gamma); });
}

wl_status wl_kelly_fraction(double p, double* out) {
  if (!out) return invalid("out is null");
  return guarded([&] { *out = wealthlab::kelly_fraction(p); });
}

wl_status wl_ruin_threshold(double p, double tol, double* out) {
  if (!out) return invalid("out is null");
  return guarded([&] { *out = wealthlab::ruin_threshold(p, tol); });
}

wl_status wl_expected_gain(const wl_params* params, double x, double* out) {
  if (!params || !out) return invalid("params/out is null");
  return guarded([&] { *out = wealthlab::expected_gain(to_params(*params), x); });
}

wl_status wl_bankroll_path(double p, double gamma, double x0, const uint8_t* outcomes,
                           size_t n_outcomes, double* out_path) {
  if (!out_path || (n_outcomes > 0 && !outcomes)) return invalid("null buffer");
  return guarded([&] {
    std::vector<bool> wins(n_outcomes);
    for (size_t i = 0; i < n_outcomes; ++i) wins[i] = outcomes[i] != 0;
    const std::vector<double> path = wealthlab::bankroll_path(p, gamma, x0, wins);
    std::memcpy(out_path, path.data(), path.size() * sizeof(double));
  });
}

/* ---- spectral ---- */

wl_status wl_char_h(const wl_log_coeffs* coeffs, double rho, double* out) {
  if (!coeffs || !out) return invalid("coeffs/out is null");
  return guarded([&] {
    *out = wealthlab::characteristic_h({to_coeffs(*coeffs)}, rho);
  });
}

wl_status wl_stationary_point(const wl_log_coeffs* coeffs, double* out) {
  if (!coeffs || !out) return invalid("coeffs/out is null");
  return guarded([&] {
    *out = wealthlab::stationary_point({to_coeffs(*coeffs)});
  });
}

wl_status wl_kappa_min(double p, double gamma, double* out) {
  if (!out) return invalid("out is null");
  return guarded([&] { *out = wealthlab::kappa_min(p, gamma); });
}

wl_status wl_solve_roots(const wl_log_coeffs* coeffs, double tol,
                         wl_spectral_result* out) {
  if (!coeffs || !out) return invalid("coeffs/out is null");
  return guarded([&] {
    fill_spectral(wealthlab::solve_roots({to_coeffs(*coeffs)}, tol), out);
  });
}

wl_status wl_admissible_alpha(const wl_params* params, double tol,
                              wl_spectral_result* out) {
  if (!params || !out) return invalid("params/out is null");
  return guarded([&] {
    fill_spectral(wealthlab::admissible_alpha(to_params(*params), tol), out);
  });
}

/* ---- density ---- */

wl_status wl_density_create(double log_x_min, double log_x_max, uint64_t n,
                            wl_density** out) {
  if (!out) return invalid("out is null");
  *out = nullptr;
  return guarded([&] {
    wealthlab::GridSpec spec;
    spec.log_x_min = log_x_min;
    spec.log_x_max = log_x_max;
    spec.n = static_cast<std::size_t>(n);
    *out = new wl_density{wealthlab::make_density(spec)};
  });
}

void wl_density_free(wl_density* d) { delete d; }

wl_status wl_density_clone(const wl_density* d, wl_density** out) {
  if (!d || !out) return invalid("density/out is null");
  *out = new wl_density{d->d};
  return WL_OK;
}

wl_status wl_density_size(const wl_density* d, uint64_t* out) {
  if (!d || !out) return invalid("density/out is null");
  *out = d->d.grid.n;
  return WL_OK;
}

wl_status wl_density_read(const wl_density* d, double* log_x, double* values) {
  if (!d || !log_x || !values) return invalid("null buffer");
  for (std::size_t i = 0; i < d->d.grid.n; ++i) {
    log_x[i] = d->d.grid.log_x(i);
    values[i] = d->d.values[i];
  }
  return WL_OK;
}

wl_status wl_density_set_values(wl_density* d, const double* values, uint64_t n) {
  if (!d || !values) return invalid("null buffer");
  if (n != d->d.grid.n) return invalid("value count does not match grid");
  for (std::size_t i = 0; i < d->d.grid.n; ++i) {
    if (!(values[i] >= 0.0)) return invalid("density values must be >= 0");
  }
  std::copy(values, values + n, d->d.values.begin());
  return WL_OK;
}

wl_status wl_density_fill_truncated_exponential(wl_density* d, double rate,
                                                double x_cut) {
  if (!d) return invalid("density is null");
  return guarded([&] {
    d->d = wealthlab::fill_truncated_exponential(d->d.grid, rate, x_cut);
  });
}

wl_status wl_density_fill_power_law(wl_density* d, double rho) {
  if (!d) return invalid("density is null");
  return guarded([&] { d->d = wealthlab::fill_power_law(d->d.grid, rho); });
}

wl_status wl_density_fill_log_gaussian(wl_density* d, double center_log_x,
                                       double width) {
  if (!d) return invalid("density is null");
  return guarded([&] {
    d->d = wealthlab::fill_log_gaussian(d->d.grid, center_log_x, width);
  });
}

wl_status wl_density_l1_mass(const wl_density* d, double* out) {
  if (!d || !out) return invalid("density/out is null");
  return guarded([&] { *out = wealthlab::l1_mass(d->d); });
}

wl_status wl_density_truncation_mass(const wl_density* d, double* out) {
  if (!d || !out) return invalid("density/out is null");
  *out = d->d.truncation_mass;
  return WL_OK;
}

wl_status wl_density_apply(const wl_density* in, const wl_params* params,
                           int operator_form, wl_density** out,
                           double* truncation_delta) {
  if (!in || !params || !out) return invalid("null argument");
  if (operator_form != WL_OPERATOR_PUSHFORWARD &&
      operator_form != WL_OPERATOR_INTERPOLATION) {
    return invalid("unknown operator form");
  }
  *out = nullptr;
  return guarded([&] {
    const auto form = operator_form == WL_OPERATOR_PUSHFORWARD
                          ? wealthlab::OperatorForm::PushForward
                          : wealthlab::OperatorForm::Interpolation;
    *out = new wl_density{wealthlab::apply_operator(in->d, to_params(*params), form,
                                                    truncation_delta)};
  });
}

wl_status wl_density_iterate(wl_density* d, const wl_params* params,
                             uint64_t n_steps, int operator_form, int iterate_mode,
                             const wl_density* source, double* trace) {
  if (!d || !params) return invalid("null argument");
  if (operator_form != WL_OPERATOR_PUSHFORWARD &&
      operator_form != WL_OPERATOR_INTERPOLATION) {
    return invalid("unknown operator form");
  }
  if (iterate_mode != WL_ITERATE_PLAIN && iterate_mode != WL_ITERATE_RENORMALIZED &&
      iterate_mode != WL_ITERATE_RECYCLE) {
    return invalid("unknown iterate mode");
  }
  return guarded([&] {
    const auto form = operator_form == WL_OPERATOR_PUSHFORWARD
                          ? wealthlab::OperatorForm::PushForward
                          : wealthlab::OperatorForm::Interpolation;
    const auto mode = iterate_mode == WL_ITERATE_PLAIN
                          ? wealthlab::IterateMode::Plain
                          : (iterate_mode == WL_ITERATE_RENORMALIZED
                                 ? wealthlab::IterateMode::Renormalized
                                 : wealthlab::IterateMode::Recycle);
    wealthlab::IterateResult res = wealthlab::iterate(
        d->d, to_params(*params), n_steps, form, mode, source ? &source->d : nullptr);
    if (trace) {
      for (std::size_t i = 0; i < res.trace.size(); ++i) {
        trace[3 * i + 0] = static_cast<double>(res.trace[i].step);
        trace[3 * i + 1] = res.trace[i].mass;
        trace[3 * i + 2] = res.trace[i].truncation_mass;
      }
    }
    d->d = std::move(res.density);
  });
}

wl_status wl_density_fit_tail(const wl_density* d, double q_lo, double q_hi,
                              wl_tail_fit* out) {
  if (!d || !out) return invalid("density/out is null");
  return guarded([&] {
    const wealthlab::TailFit fit = wealthlab::fit_tail(d->d, q_lo, q_hi);
    out->alpha_hat = fit.alpha_hat;
    out->x_lo = fit.x_lo;
    out->x_hi = fit.x_hi;
    out->r2 = fit.r2;
  });
}

wl_status wl_density_write_csv(const wl_density* d, const char* path) {
  if (!d || !path) return invalid("density/path is null");
  return guarded([&] { wealthlab::write_density_csv(path, d->d); });
}

wl_status wl_density_read_csv(const char* path, wl_density** out) {
  if (!path || !out) return invalid("path/out is null");
  *out = nullptr;
  return guarded([&] { *out = new wl_density{wealthlab::read_density_csv(path)}; });
}

/* ---- simulation ---- */

wl_status wl_simulate(const wl_sim_config* cfg, wl_simulation** out) {
  if (!cfg || !out) return invalid("config/out is null");
  if (cfg->n_snapshots > 0 && !cfg->snapshot_rounds) {
    return invalid("snapshot_rounds is null");
  }
  if (cfg->n_quantiles > 0 && !cfg->elite_quantiles) {
    return invalid("elite_quantiles is null");
  }
  *out = nullptr;
  return guarded([&] {
    wealthlab::SimConfig sc;
    sc.p = cfg->params.p;
    sc.gamma = cfg->params.gamma;
    sc.kappa = cfg->params.kappa;
    sc.n_agents = cfg->n_agents;
    sc.n_rounds = cfg->n_rounds;
    sc.seed = cfg->seed;
    sc.ruin_floor = cfg->ruin_floor > 0.0 ? cfg->ruin_floor : 1e-3;
    sc.initial_wealth = cfg->initial_wealth > 0.0 ? cfg->initial_wealth : 1.0;
    sc.snapshot_rounds.assign(cfg->snapshot_rounds,
                              cfg->snapshot_rounds + cfg->n_snapshots);
    sc.elite_quantiles.assign(cfg->elite_quantiles,
                              cfg->elite_quantiles + cfg->n_quantiles);
    sc.rebirth_at_median = cfg->rebirth_at_median != 0;
    if (cfg->memory_budget_bytes > 0) sc.memory_budget_bytes = cfg->memory_budget_bytes;
    *out = new wl_simulation{wealthlab::simulate(sc)};
  });
}

void wl_simulation_free(wl_simulation* sim) { delete sim; }

wl_status wl_sim_n_agents(const wl_simulation* sim, uint64_t* out) {
  if (!sim || !out) return invalid("sim/out is null");
  *out = sim->sim.config().n_agents;
  return WL_OK;
}

wl_status wl_sim_final_wealth(const wl_simulation* sim, double* out) {
  if (!sim || !out) return invalid("sim/out is null");
  std::memcpy(out, sim->sim.wealth().data(),
              sim->sim.wealth().size() * sizeof(double));
  return WL_OK;
}

wl_status wl_sim_mean_log_growth(const wl_simulation* sim, double* mean,
                                 double* standard_error) {
  if (!sim) return invalid("sim is null");
  return guarded([&] { sim->sim.mean_log_growth(mean, standard_error); });
}

wl_status wl_sim_n_snapshots(const wl_simulation* sim, uint64_t* out) {
  if (!sim || !out) return invalid("sim/out is null");
  *out = sim->sim.snapshots().size();
  return WL_OK;
}

wl_status wl_sim_snapshot_round(const wl_simulation* sim, uint64_t index,
                                uint64_t* out) {
  if (!sim || !out) return invalid("sim/out is null");
  if (index >= sim->sim.snapshots().size()) return invalid("snapshot index out of range");
  *out = sim->sim.snapshots()[index].round;
  return WL_OK;
}

wl_status wl_sim_ruin_fraction(const wl_simulation* sim, uint64_t snapshot,
                               double* out) {
  if (!sim || !out) return invalid("sim/out is null");
  if (snapshot >= sim->sim.snapshots().size()) return invalid("snapshot index out of range");
  *out = sim->sim.snapshots()[snapshot].ruin_fraction;
  return WL_OK;
}

wl_status wl_sim_turnover(const wl_simulation* sim, double elite_quantile,
                          uint64_t snapshot_a, uint64_t snapshot_b, double* jaccard,
                          double* fraction_replaced) {
  if (!sim) return invalid("sim is null");
  return guarded([&] {
    const wealthlab::CirculationReport rep =
        wealthlab::circulation(sim->sim, elite_quantile);
    const std::size_t n = rep.snapshots.size();
    if (snapshot_a >= n || snapshot_b >= n) {
      throw wealthlab::Error(wealthlab::ErrorCode::InvalidArgument,
                             "snapshot index out of range");
    }
    const std::size_t lo = std::min(snapshot_a, snapshot_b);
    const std::size_t hi = std::max(snapshot_a, snapshot_b);
    // turnover holds ordered pairs (ai <= bi) in row-major order
    std::size_t idx = 0;
    for (std::size_t ai = 0; ai < lo; ++ai) idx += n - ai;
    idx += hi - lo;
    const wealthlab::TurnoverEntry& e = rep.turnover.at(idx);
    if (jaccard) *jaccard = e.jaccard;
    if (fraction_replaced) *fraction_replaced = e.fraction_replaced;
  });
}

wl_status wl_sim_empirical_tail(const wl_simulation* sim, double log_x_min,
                                double log_x_max, uint64_t grid_n, double q_lo,
                                double q_hi, wl_tail_fit* out) {
  if (!sim || !out) return invalid("sim/out is null");
  return guarded([&] {
    wealthlab::GridSpec spec;
    spec.log_x_min = log_x_min;
    spec.log_x_max = log_x_max;
    spec.n = static_cast<std::size_t>(grid_n);
    const wealthlab::TailFit fit = wealthlab::empirical_tail(sim->sim, spec, q_lo, q_hi);
    out->alpha_hat = fit.alpha_hat;
    out->x_lo = fit.x_lo;
    out->x_hi = fit.x_hi;
    out->r2 = fit.r2;
  });
}

/* ---- runner ---- */

wl_status wl_run_command(const char* command, const char* config_path,
                         const char* out_dir, const char* const* overrides,
                         size_t n_overrides, int has_seed_override,
                         uint64_t seed_override, int* soft_failures) {
  if (!command || !config_path || !out_dir) return invalid("null argument");
  if (n_overrides > 0 && !overrides) return invalid("overrides is null");
  return guarded([&] {
    std::vector<std::string> ov;
    ov.reserve(n_overrides);
    for (size_t i = 0; i < n_overrides; ++i) ov.emplace_back(overrides[i]);
    const wealthlab::RunOutcome outcome = wealthlab::run_command(
        command, config_path, out_dir, ov,
        has_seed_override ? std::optional<uint64_t>(seed_override) : std::nullopt);
    if (soft_failures) *soft_failures = outcome.soft_failures;
  });
}

} /* extern "C" */
