#include "core/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "core/abm.hpp"
#include "core/density.hpp"
#include "core/io.hpp"
#include "core/kelly.hpp"
#include "core/model.hpp"
#include "core/parallel.hpp"
#include "core/spectral.hpp"

namespace wealthlab {

namespace {

using nlohmann::json;

json parse_config(const std::string& path) {
  json cfg;
  try {
    cfg = json::parse(read_text_file(path));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::Config, std::string("config parse failed: ") + e.what());
  }
  if (!cfg.is_object()) {
    throw Error(ErrorCode::Config, "config must be a JSON object");
  }
  return cfg;
}

void apply_overrides(json& cfg, const std::vector<std::string>& overrides) {
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::Config, "override must look like key=value: " + ov);
    }
    const std::string key = ov.substr(0, eq);
    const std::string raw = ov.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const std::exception&) {
      value = raw;  // unquoted strings pass through verbatim
    }
    cfg[key] = value;
  }
}

double need_num(const json& cfg, const std::string& key) {
  if (!cfg.contains(key) || !cfg[key].is_number()) {
    throw Error(ErrorCode::Config, "config requires numeric field '" + key + "'");
  }
  return cfg[key].get<double>();
}

double opt_num(const json& cfg, const std::string& key, double def) {
  if (!cfg.contains(key)) return def;
  if (!cfg[key].is_number()) {
    throw Error(ErrorCode::Config, "config field '" + key + "' must be numeric");
  }
  return cfg[key].get<double>();
}

std::uint64_t opt_u64(const json& cfg, const std::string& key, std::uint64_t def) {
  if (!cfg.contains(key)) return def;
  if (!cfg[key].is_number_integer() && !cfg[key].is_number_unsigned()) {
    throw Error(ErrorCode::Config, "config field '" + key + "' must be an integer");
  }
  return cfg[key].get<std::uint64_t>();
}

bool opt_bool(const json& cfg, const std::string& key, bool def) {
  if (!cfg.contains(key)) return def;
  if (!cfg[key].is_boolean()) {
    throw Error(ErrorCode::Config, "config field '" + key + "' must be a boolean");
  }
  return cfg[key].get<bool>();
}

std::string opt_str(const json& cfg, const std::string& key, const std::string& def) {
  if (!cfg.contains(key)) return def;
  if (!cfg[key].is_string()) {
    throw Error(ErrorCode::Config, "config field '" + key + "' must be a string");
  }
  return cfg[key].get<std::string>();
}

// Accepts an array of numbers or {"min": a, "max": b, "count": n}.
std::vector<double> number_list(const json& j, const std::string& what) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number()) {
        throw Error(ErrorCode::Config, what + ": list entries must be numeric");
      }
      out.push_back(v.get<double>());
    }
  } else if (j.is_object()) {
    const double lo = need_num(j, "min");
    const double hi = need_num(j, "max");
    const std::uint64_t count = opt_u64(j, "count", 0);
    if (count < 1 || (count == 1 && hi != lo)) {
      throw Error(ErrorCode::Config, what + ": grid requires count >= 1");
    }
    for (std::uint64_t i = 0; i < count; ++i) {
      out.push_back(count == 1
                        ? lo
                        : lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(count - 1));
    }
  } else if (j.is_number()) {
    out.push_back(j.get<double>());
  } else {
    throw Error(ErrorCode::Config, what + ": expected number, list, or {min,max,count}");
  }
  if (out.empty()) {
    throw Error(ErrorCode::Config, what + ": empty value list");
  }
  return out;
}

std::string path_join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string quantile_tag(double q) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", q * 100.0);
  return buf;
}

void self_check_json(const std::string& path, const std::vector<std::string>& keys) {
  json parsed;
  try {
    parsed = json::parse(read_text_file(path));
  } catch (const std::exception& e) {
    throw Error(ErrorCode::Io, "schema self-check: " + path + " is not valid JSON: " + e.what());
  }
  for (const auto& k : keys) {
    if (!parsed.contains(k)) {
      throw Error(ErrorCode::Io, "schema self-check: " + path + " lacks key '" + k + "'");
    }
  }
}

void self_check_csv(const std::string& path, const std::string& header) {
  const std::string text = read_text_file(path);
  if (text.rfind(header + "\n", 0) != 0) {
    throw Error(ErrorCode::Io, "schema self-check: " + path + " lacks header '" + header + "'");
  }
}

// ---- spectral record shared by exponent rows and the evolve summary ----

struct SpectralRow {
  double p = 0, gamma = 0, kappa = 0;
  bool ok = false;
  SpectralResult result;
  std::string error;
};

SpectralRow solve_point(double p, double gamma, double kappa, double tol) {
  SpectralRow row;
  row.p = p;
  row.gamma = gamma;
  row.kappa = kappa;
  try {
    ModelParams params{p, gamma, kappa};
    row.result = admissible_alpha(params, tol);
    row.ok = true;
  } catch (const Error& e) {
    row.error = e.what();
  }
  return row;
}

void emit_spectral_fields(JsonWriter& w, const SpectralRow& row) {
  w.key("p").value(row.p);
  w.key("gamma").value(row.gamma);
  w.key("kappa").value(row.kappa);
  if (!row.ok) {
    w.key("status").value("error");
    w.key("error").value(row.error);
    return;
  }
  const SpectralResult& r = row.result;
  w.key("kappa_min").value(r.kappa_min);
  w.key("rho_0").value(r.rho_0);
  if (r.rho_neg) w.key("rho_neg").value(*r.rho_neg);
  if (r.rho_pos) w.key("rho_pos").value(*r.rho_pos);
  if (r.root_left) w.key("root_left").value(*r.root_left);
  if (r.root_right) w.key("root_right").value(*r.root_right);
  if (r.alpha) w.key("alpha").value(*r.alpha);
  w.key("summable").value(r.summable);
  w.key("status").value(spectral_status_name(r.status));
}

std::string spectral_csv_row(const SpectralRow& row) {
  auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  std::string out;
  out += format_double(row.p);
  out += ',';
  out += format_double(row.gamma);
  out += ',';
  out += format_double(row.kappa);
  out += ',';
  if (row.ok) {
    const SpectralResult& r = row.result;
    out += format_double(r.kappa_min);
    out += ',';
    out += format_double(r.rho_0);
    out += ',';
    out += opt(r.rho_neg);
    out += ',';
    out += opt(r.rho_pos);
    out += ',';
    out += opt(r.alpha);
    out += ',';
    out += r.summable ? "true" : "false";
    out += ',';
    out += spectral_status_name(r.status);
  } else {
    out += ",,,,,error";
  }
  out += '\n';
  return out;
}

// ---- kelly ----

void run_kelly(const json& cfg, const std::string& out_dir) {
  const double p = need_num(cfg, "p");
  const double tol = opt_num(cfg, "tol", 1e-12);
  json grid_cfg = cfg.contains("gamma_grid")
                      ? cfg["gamma_grid"]
                      : json{{"min", 0.0}, {"max", 0.95}, {"count", 96}};
  const std::vector<double> grid = number_list(grid_cfg, "gamma_grid");
  for (double g : grid) {
    if (!(g >= 0.0 && g < 1.0)) {
      throw Error(ErrorCode::Config, "gamma_grid values must lie in [0, 1)");
    }
  }

  const GrowthProfile prof = growth_profile(p, grid, tol);

  std::string csv = "gamma,g\n";
  for (std::size_t i = 0; i < prof.gammas.size(); ++i) {
    csv += format_double(prof.gammas[i]);
    csv += ',';
    csv += format_double(prof.g[i]);
    csv += '\n';
  }
  write_text_file(path_join(out_dir, "kelly_curve.csv"), csv);

  JsonWriter w;
  w.begin_object();
  w.key("command").value("kelly");
  w.key("config").begin_object();
  w.key("p").value(p);
  w.key("gamma_grid").begin_array();
  for (double g : grid) w.value(g);
  w.end_array();
  w.key("tol").value(tol);
  w.end_object();
  w.key("gamma_star").value(prof.gamma_star);
  w.key("gamma_zero").value(prof.gamma_zero);
  w.key("g_at_star").value(growth_rate(p, prof.gamma_star));
  w.end_object();
  write_text_file(path_join(out_dir, "kelly_summary.json"), w.str() + "\n");

  self_check_json(path_join(out_dir, "kelly_summary.json"),
                  {"command", "config", "gamma_star", "gamma_zero", "g_at_star"});
  self_check_csv(path_join(out_dir, "kelly_curve.csv"), "gamma,g");
}

// ---- exponent ----

int run_exponent(const json& cfg, const std::string& out_dir) {
  const double tol = opt_num(cfg, "tol", 1e-12);

  std::vector<double> ps, gammas, kappas;
  if (cfg.contains("sweep")) {
    const json& sw = cfg["sweep"];
    if (!sw.is_object()) {
      throw Error(ErrorCode::Config, "sweep must be an object");
    }
    ps = sw.contains("p") ? number_list(sw["p"], "sweep.p")
                          : std::vector<double>{need_num(cfg, "p")};
    gammas = sw.contains("gamma") ? number_list(sw["gamma"], "sweep.gamma")
                                  : std::vector<double>{need_num(cfg, "gamma")};
    kappas = sw.contains("kappa") ? number_list(sw["kappa"], "sweep.kappa")
                                  : std::vector<double>{opt_num(cfg, "kappa", 1.0)};
  } else {
    ps = {need_num(cfg, "p")};
    gammas = {need_num(cfg, "gamma")};
    kappas = {opt_num(cfg, "kappa", 1.0)};
  }

  // Cartesian grid in (p, gamma, kappa) order; row order is parameter order,
  // not completion order.
  std::vector<SpectralRow> rows(ps.size() * gammas.size() * kappas.size());
  parallel_for(rows.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t idx = lo; idx < hi; ++idx) {
      const std::size_t ki = idx % kappas.size();
      const std::size_t gi = (idx / kappas.size()) % gammas.size();
      const std::size_t pi = idx / (kappas.size() * gammas.size());
      rows[idx] = solve_point(ps[pi], gammas[gi], kappas[ki], tol);
    }
  });

  int failed = 0;
  std::string csv = "p,gamma,kappa,kappa_min,rho_0,rho_neg,rho_pos,alpha,summable,status\n";
  for (const auto& row : rows) {
    csv += spectral_csv_row(row);
    if (!row.ok) ++failed;
  }
  write_text_file(path_join(out_dir, "exponent.csv"), csv);

  JsonWriter w;
  w.begin_object();
  w.key("command").value("exponent");
  w.key("config").begin_object();
  w.key("p").begin_array();
  for (double v : ps) w.value(v);
  w.end_array();
  w.key("gamma").begin_array();
  for (double v : gammas) w.value(v);
  w.end_array();
  w.key("kappa").begin_array();
  for (double v : kappas) w.value(v);
  w.end_array();
  w.key("tol").value(tol);
  w.end_object();
  w.key("points").begin_array();
  for (const auto& row : rows) {
    w.begin_object();
    emit_spectral_fields(w, row);
    w.end_object();
  }
  w.end_array();
  w.key("n_points").value(static_cast<std::uint64_t>(rows.size()));
  w.key("n_failed").value(static_cast<std::int64_t>(failed));
  w.end_object();
  write_text_file(path_join(out_dir, "exponent.json"), w.str() + "\n");

  self_check_json(path_join(out_dir, "exponent.json"),
                  {"command", "config", "points", "n_failed"});
  self_check_csv(path_join(out_dir, "exponent.csv"),
                 "p,gamma,kappa,kappa_min,rho_0,rho_neg,rho_pos,alpha,summable,status");
  return failed;
}

// ---- evolve ----

GridSpec grid_from_config(const json& cfg) {
  GridSpec spec;
  if (cfg.contains("grid")) {
    const json& g = cfg["grid"];
    spec.log_x_min = opt_num(g, "log_x_min", spec.log_x_min);
    spec.log_x_max = opt_num(g, "log_x_max", spec.log_x_max);
    spec.n = opt_u64(g, "n", spec.n);
  }
  if (!(spec.log_x_max > spec.log_x_min) || spec.n < 16) {
    throw Error(ErrorCode::Config, "grid requires log_x_max > log_x_min and n >= 16");
  }
  return spec;
}

GridDensity initial_from_config(const json& cfg, const GridSpec& spec,
                                json& effective_initial) {
  json init = cfg.contains("initial") ? cfg["initial"]
                                      : json{{"kind", "truncated_exponential"}};
  const std::string kind = opt_str(init, "kind", "truncated_exponential");
  effective_initial["kind"] = kind;
  if (kind == "truncated_exponential") {
    const double rate = opt_num(init, "rate", 1.0);
    const double x_cut = opt_num(init, "x_cut", 30.0);
    effective_initial["rate"] = rate;
    effective_initial["x_cut"] = x_cut;
    return fill_truncated_exponential(spec, rate, x_cut);
  }
  if (kind == "power_law") {
    const double rho = need_num(init, "rho");
    effective_initial["rho"] = rho;
    return fill_power_law(spec, rho);
  }
  if (kind == "log_gaussian") {
    const double center = opt_num(init, "center_log_x", 0.0);
    const double width = opt_num(init, "width", 1.0);
    effective_initial["center_log_x"] = center;
    effective_initial["width"] = width;
    return fill_log_gaussian(spec, center, width);
  }
  if (kind == "csv") {
    const std::string path = opt_str(init, "path", "");
    if (path.empty()) {
      throw Error(ErrorCode::Config, "initial.kind=csv requires initial.path");
    }
    effective_initial["path"] = path;
    GridDensity d = read_density_csv(path);
    if (d.grid.n != spec.n || d.grid.log_x_min != spec.log_x_min ||
        d.grid.log_x_max != spec.log_x_max) {
      throw Error(ErrorCode::Config, "initial csv grid does not match configured grid");
    }
    return d;
  }
  throw Error(ErrorCode::Config, "unknown initial.kind: " + kind);
}

int run_evolve(const json& cfg, const std::string& out_dir) {
  const double p = need_num(cfg, "p");
  const double gamma = need_num(cfg, "gamma");
  const double kappa = opt_num(cfg, "kappa", 1.0);
  const std::uint64_t steps = opt_u64(cfg, "steps", 1000);
  const double tol = opt_num(cfg, "tol", 1e-12);

  const std::string op_name = opt_str(cfg, "operator", "pushforward");
  OperatorForm form;
  if (op_name == "pushforward") {
    form = OperatorForm::PushForward;
  } else if (op_name == "interpolation") {
    form = OperatorForm::Interpolation;
  } else {
    throw Error(ErrorCode::Config, "operator must be 'pushforward' or 'interpolation'");
  }

  const std::string mode_name = opt_str(cfg, "mode", "plain");
  IterateMode mode;
  if (mode_name == "plain") {
    mode = IterateMode::Plain;
  } else if (mode_name == "renormalized") {
    mode = IterateMode::Renormalized;
  } else if (mode_name == "recycle") {
    mode = IterateMode::Recycle;
  } else {
    throw Error(ErrorCode::Config, "mode must be 'plain', 'renormalized', or 'recycle'");
  }

  double q_lo = 0.95, q_hi = 0.999;
  if (cfg.contains("tail_window")) {
    const json& win = cfg["tail_window"];
    if (!win.is_array() || win.size() != 2 || !win[0].is_number() || !win[1].is_number()) {
      throw Error(ErrorCode::Config, "tail_window must be [q_lo, q_hi]");
    }
    q_lo = win[0].get<double>();
    q_hi = win[1].get<double>();
  }

  const GridSpec spec = grid_from_config(cfg);
  json effective_initial = json::object();
  const GridDensity f0 = initial_from_config(cfg, spec, effective_initial);

  std::set<std::uint64_t> checkpoints;
  if (cfg.contains("checkpoints")) {
    if (!cfg["checkpoints"].is_array()) {
      throw Error(ErrorCode::Config, "checkpoints must be an array of steps");
    }
    for (const auto& c : cfg["checkpoints"]) {
      if (!c.is_number_integer() && !c.is_number_unsigned()) {
        throw Error(ErrorCode::Config, "checkpoints must be integers");
      }
      const std::uint64_t v = c.get<std::uint64_t>();
      if (v > steps) {
        throw Error(ErrorCode::Config, "checkpoint beyond step count");
      }
      checkpoints.insert(v);
    }
  } else {
    checkpoints.insert(0);
    checkpoints.insert(steps);
  }

  ModelParams params{p, gamma, kappa};
  require_valid(params);

  const double initial_mass = l1_mass(f0);
  GridDensity current = f0;
  std::vector<MassTraceRow> trace;
  trace.push_back({0, initial_mass, f0.truncation_mass});

  std::uint64_t done = 0;
  auto checkpoint_path = [&](std::uint64_t step) {
    return path_join(out_dir, "density_step_" + format_u64(step) + ".csv");
  };
  if (checkpoints.count(0)) write_density_csv(checkpoint_path(0), current);
  for (std::uint64_t target : checkpoints) {
    if (target == 0) continue;
    IterateResult part = iterate(current, params, target - done, form, mode, &f0);
    for (std::size_t i = 1; i < part.trace.size(); ++i) {
      MassTraceRow row = part.trace[i];
      row.step += done;
      trace.push_back(row);
    }
    current = std::move(part.density);
    done = target;
    write_density_csv(checkpoint_path(target), current);
  }
  if (done < steps) {
    IterateResult part = iterate(current, params, steps - done, form, mode, &f0);
    for (std::size_t i = 1; i < part.trace.size(); ++i) {
      MassTraceRow row = part.trace[i];
      row.step += done;
      trace.push_back(row);
    }
    current = std::move(part.density);
  }
  write_mass_trace_csv(path_join(out_dir, "mass_trace.csv"), trace);

  int soft = 0;
  bool have_fit = false;
  TailFit fit;
  std::string fit_error;
  try {
    fit = fit_tail(current, q_lo, q_hi);
    have_fit = true;
  } catch (const Error& e) {
    fit_error = e.what();
    ++soft;
  }

  const SpectralRow spec_row = solve_point(p, gamma, kappa, tol);

  JsonWriter w;
  w.begin_object();
  w.key("command").value("evolve");
  w.key("config").begin_object();
  w.key("p").value(p);
  w.key("gamma").value(gamma);
  w.key("kappa").value(kappa);
  w.key("steps").value(steps);
  w.key("operator").value(op_name);
  w.key("mode").value(mode_name);
  w.key("grid").begin_object();
  w.key("log_x_min").value(spec.log_x_min);
  w.key("log_x_max").value(spec.log_x_max);
  w.key("n").value(static_cast<std::uint64_t>(spec.n));
  w.end_object();
  w.key("initial").begin_object();
  for (auto it = effective_initial.begin(); it != effective_initial.end(); ++it) {
    if (it.value().is_string()) {
      w.key(it.key()).value(it.value().get<std::string>());
    } else {
      w.key(it.key()).value(it.value().get<double>());
    }
  }
  w.end_object();
  w.key("checkpoints").begin_array();
  for (std::uint64_t c : checkpoints) w.value(c);
  w.end_array();
  w.key("tail_window").begin_array().value(q_lo).value(q_hi).end_array();
  w.key("tol").value(tol);
  w.end_object();

  w.key("initial_mass").value(initial_mass);
  w.key("final_mass").value(l1_mass(current));
  w.key("total_truncation").value(current.truncation_mass);
  if (have_fit) {
    w.key("tail_fit").begin_object();
    w.key("alpha_hat").value(fit.alpha_hat);
    w.key("x_lo").value(fit.x_lo);
    w.key("x_hi").value(fit.x_hi);
    w.key("r2").value(fit.r2);
    w.end_object();
  } else {
    w.key("tail_fit").null_value();
    w.key("tail_fit_error").value(fit_error);
  }
  w.key("spectral").begin_object();
  emit_spectral_fields(w, spec_row);
  w.end_object();
  if (have_fit && spec_row.ok && spec_row.result.alpha) {
    const double alpha = *spec_row.result.alpha;
    w.key("alpha_spectral").value(alpha);
    w.key("alpha_rel_err").value(std::abs(fit.alpha_hat - alpha) / std::abs(alpha));
  }
  w.end_object();
  write_text_file(path_join(out_dir, "evolve_summary.json"), w.str() + "\n");

  self_check_json(path_join(out_dir, "evolve_summary.json"),
                  {"command", "config", "final_mass", "tail_fit", "spectral"});
  self_check_csv(path_join(out_dir, "mass_trace.csv"), "step,mass,truncation_mass");
  return soft;
}

// ---- simulate ----

int run_simulate(const json& cfg, const std::string& out_dir,
                 std::optional<std::uint64_t> seed_override) {
  SimConfig sc;
  sc.p = need_num(cfg, "p");
  sc.gamma = need_num(cfg, "gamma");
  sc.kappa = opt_num(cfg, "kappa", 1.0);
  sc.n_agents = opt_u64(cfg, "n_agents", 10000);
  sc.n_rounds = opt_u64(cfg, "n_rounds", 1000);
  sc.seed = seed_override ? *seed_override : opt_u64(cfg, "seed", 1);
  sc.ruin_floor = opt_num(cfg, "ruin_floor", 1e-3);
  sc.initial_wealth = opt_num(cfg, "initial_wealth", 1.0);
  sc.rebirth_at_median = opt_bool(cfg, "rebirth_at_median", false);
  sc.memory_budget_bytes = opt_u64(cfg, "memory_budget_mb", 1024) * (1ull << 20);

  if (cfg.contains("elite_quantiles")) {
    for (const auto& q : cfg["elite_quantiles"]) {
      if (!q.is_number()) {
        throw Error(ErrorCode::Config, "elite_quantiles must be numeric");
      }
      sc.elite_quantiles.push_back(q.get<double>());
    }
  } else {
    sc.elite_quantiles = {0.01, 0.10, 0.50};
  }
  if (cfg.contains("snapshot_rounds")) {
    for (const auto& r : cfg["snapshot_rounds"]) {
      if (!r.is_number_integer() && !r.is_number_unsigned()) {
        throw Error(ErrorCode::Config, "snapshot_rounds must be integers");
      }
      sc.snapshot_rounds.push_back(r.get<std::uint64_t>());
    }
  } else {
    sc.snapshot_rounds = {0, sc.n_rounds};
  }

  const bool dump_wealth = opt_bool(cfg, "dump_wealth", false);

  const Simulation sim = simulate(sc);

  std::vector<CirculationReport> reports;
  reports.reserve(sc.elite_quantiles.size());
  for (double q : sc.elite_quantiles) {
    reports.push_back(circulation(sim, q));
  }

  double mean = 0, se = 0;
  sim.mean_log_growth(&mean, &se);
  const auto ruin = ruin_stats(sim);

  // Optional wealth-tail fit on the live population.
  bool tail_enabled = false;
  bool have_tail = false;
  TailFit tail;
  std::string tail_error;
  GridSpec tail_grid;
  double tail_qlo = 0.95, tail_qhi = 0.999;
  if (cfg.contains("tail")) {
    const json& t = cfg["tail"];
    tail_enabled = opt_bool(t, "enable", true);
    if (tail_enabled) {
      tail_grid = grid_from_config(t);
      if (t.contains("window")) {
        tail_qlo = t["window"][0].get<double>();
        tail_qhi = t["window"][1].get<double>();
      }
      try {
        tail = empirical_tail(sim, tail_grid, tail_qlo, tail_qhi);
        have_tail = true;
      } catch (const Error& e) {
        tail_error = e.what();
      }
    }
  }

  // Per-quantile CSVs.
  for (const auto& rep : reports) {
    const std::string tag = quantile_tag(rep.elite_quantile);
    std::string tcsv = "round_a,round_b,jaccard,fraction_replaced\n";
    for (const auto& e : rep.turnover) {
      tcsv += format_u64(e.round_a);
      tcsv += ',';
      tcsv += format_u64(e.round_b);
      tcsv += ',';
      tcsv += format_double(e.jaccard);
      tcsv += ',';
      tcsv += format_double(e.fraction_replaced);
      tcsv += '\n';
    }
    write_text_file(path_join(out_dir, "turnover_q" + tag + ".csv"), tcsv);

    std::string hcsv = "tenure_rounds,count\n";
    for (const auto& [rounds, count] : rep.tenure_histogram) {
      hcsv += format_u64(rounds);
      hcsv += ',';
      hcsv += format_u64(count);
      hcsv += '\n';
    }
    write_text_file(path_join(out_dir, "tenure_q" + tag + ".csv"), hcsv);
  }

  if (dump_wealth) {
    std::string wcsv = "agent,wealth,weight,ruined\n";
    for (std::size_t i = 0; i < sim.wealth().size(); ++i) {
      wcsv += format_u64(i);
      wcsv += ',';
      wcsv += format_double(sim.wealth()[i]);
      wcsv += ',';
      wcsv += format_double(sim.agent_weight(i));
      wcsv += ',';
      wcsv += sim.ruined()[i] ? '1' : '0';
      wcsv += '\n';
    }
    write_text_file(path_join(out_dir, "wealth_final.csv"), wcsv);
  }

  JsonWriter w;
  w.begin_object();
  w.key("command").value("simulate");
  w.key("config").begin_object();
  w.key("p").value(sc.p);
  w.key("gamma").value(sc.gamma);
  w.key("kappa").value(sc.kappa);
  w.key("n_agents").value(sc.n_agents);
  w.key("n_rounds").value(sc.n_rounds);
  w.key("seed").value(sc.seed);
  w.key("ruin_floor").value(sc.ruin_floor);
  w.key("initial_wealth").value(sc.initial_wealth);
  w.key("elite_quantiles").begin_array();
  for (double q : sc.elite_quantiles) w.value(q);
  w.end_array();
  w.key("snapshot_rounds").begin_array();
  for (std::uint64_t r : sc.snapshot_rounds) w.value(r);
  w.end_array();
  w.key("rebirth_at_median").value(sc.rebirth_at_median);
  w.key("dump_wealth").value(dump_wealth);
  w.end_object();

  w.key("seed").value(sc.seed);
  w.key("mean_log_growth").value(mean);
  w.key("mean_log_growth_se").value(se);
  w.key("ruin_events").value(sim.ruin_events());
  w.key("final_ruin_fraction").value(ruin.empty() ? 0.0 : ruin.back().second);
  w.key("ruin_by_snapshot").begin_array();
  for (const auto& [round, frac] : ruin) {
    w.begin_object();
    w.key("round").value(round);
    w.key("ruin_fraction").value(frac);
    w.end_object();
  }
  w.end_array();

  w.key("circulation").begin_array();
  for (const auto& rep : reports) {
    w.begin_object();
    w.key("elite_quantile").value(rep.elite_quantile);
    w.key("elite_size").value(static_cast<std::uint64_t>(sim.elite_size(rep.elite_quantile)));
    w.key("snapshots").begin_array();
    for (std::uint64_t r : rep.snapshots) w.value(r);
    w.end_array();
    w.key("turnover").begin_array();
    for (const auto& e : rep.turnover) {
      w.begin_object();
      w.key("round_a").value(e.round_a);
      w.key("round_b").value(e.round_b);
      w.key("jaccard").value(e.jaccard);
      w.key("fraction_replaced").value(e.fraction_replaced);
      w.end_object();
    }
    w.end_array();
    w.key("tenure").begin_object();
    w.key("mean_rounds").value(rep.tenure_mean_rounds);
    w.key("max_rounds").value(rep.tenure_max_rounds);
    w.key("histogram").begin_array();
    for (const auto& [rounds, count] : rep.tenure_histogram) {
      w.begin_object();
      w.key("tenure_rounds").value(rounds);
      w.key("count").value(count);
      w.end_object();
    }
    w.end_array();
    w.end_object();
    w.end_object();
  }
  w.end_array();

  if (tail_enabled) {
    if (have_tail) {
      w.key("tail_fit").begin_object();
      w.key("alpha_hat").value(tail.alpha_hat);
      w.key("x_lo").value(tail.x_lo);
      w.key("x_hi").value(tail.x_hi);
      w.key("r2").value(tail.r2);
      w.end_object();
    } else {
      w.key("tail_fit").null_value();
      w.key("tail_fit_error").value(tail_error);
    }
  }
  w.end_object();
  write_text_file(path_join(out_dir, "simulate_report.json"), w.str() + "\n");

  self_check_json(path_join(out_dir, "simulate_report.json"),
                  {"command", "config", "seed", "mean_log_growth", "circulation"});
  for (const auto& rep : reports) {
    self_check_csv(path_join(out_dir, "turnover_q" + quantile_tag(rep.elite_quantile) + ".csv"),
                   "round_a,round_b,jaccard,fraction_replaced");
    self_check_csv(path_join(out_dir, "tenure_q" + quantile_tag(rep.elite_quantile) + ".csv"),
                   "tenure_rounds,count");
  }
  return (tail_enabled && !have_tail) ? 1 : 0;
}

}  // namespace

RunOutcome run_command(const std::string& command, const std::string& config_path,
                       const std::string& out_dir,
                       const std::vector<std::string>& overrides,
                       std::optional<std::uint64_t> seed_override) {
  json cfg = parse_config(config_path);
  apply_overrides(cfg, overrides);
  ensure_directory(out_dir);

  RunOutcome outcome;
  if (command == "kelly") {
    run_kelly(cfg, out_dir);
  } else if (command == "exponent") {
    outcome.soft_failures = run_exponent(cfg, out_dir);
  } else if (command == "evolve") {
    outcome.soft_failures = run_evolve(cfg, out_dir);
  } else if (command == "simulate") {
    outcome.soft_failures = run_simulate(cfg, out_dir, seed_override);
  } else {
    throw Error(ErrorCode::Config, "unknown command: " + command);
  }
  return outcome;
}

std::string error_json(const Error& e) {
  JsonWriter w;
  w.begin_object();
  w.key("error").begin_object();
  w.key("code").value(error_code_name(e.code()));
  w.key("message").value(std::string(e.what()));
  w.end_object();
  w.end_object();
  return w.str();
}

std::string error_json_generic(const std::string& message) {
  JsonWriter w;
  w.begin_object();
  w.key("error").begin_object();
  w.key("code").value("unknown");
  w.key("message").value(message);
  w.end_object();
  w.end_object();
  return w.str();
}

}  // namespace wealthlab
