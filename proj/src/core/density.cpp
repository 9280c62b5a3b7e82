#include "core/density.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "core/errors.hpp"
#include "core/parallel.hpp"

namespace wealthlab {

namespace {

void check_spec(const GridSpec& spec) {
  if (!(spec.log_x_max > spec.log_x_min) || spec.n < 16) {
    throw Error(ErrorCode::InvalidArgument,
                "grid requires log_x_max > log_x_min and n >= 16");
  }
}

void check_density(const GridDensity& f) {
  check_spec(f.grid);
  if (f.values.size() != f.grid.n) {
    throw Error(ErrorCode::InvalidArgument, "density value count does not match grid");
  }
}

}  // namespace

GridDensity make_density(const GridSpec& spec) {
  check_spec(spec);
  GridDensity d;
  d.grid = spec;
  d.values.assign(spec.n, 0.0);
  return d;
}

GridDensity fill_truncated_exponential(const GridSpec& spec, double rate, double x_cut) {
  if (!(rate > 0.0) || !(x_cut > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "truncated exponential requires rate, x_cut > 0");
  }
  GridDensity d = make_density(spec);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double x = std::exp(spec.log_x(i));
    d.values[i] = x <= x_cut ? std::exp(-rate * x) : 0.0;
  }
  return d;
}

GridDensity fill_power_law(const GridSpec& spec, double rho) {
  GridDensity d = make_density(spec);
  for (std::size_t i = 0; i < spec.n; ++i) {
    d.values[i] = std::exp(rho * spec.log_x(i));
  }
  return d;
}

GridDensity fill_log_gaussian(const GridSpec& spec, double center_log_x, double width) {
  if (!(width > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "log gaussian requires width > 0");
  }
  GridDensity d = make_density(spec);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double z = (spec.log_x(i) - center_log_x) / width;
    d.values[i] = std::exp(-0.5 * z * z);
  }
  return d;
}

double l1_mass(const GridDensity& f) {
  check_density(f);
  const double delta = f.grid.delta();
  double sum = 0.0;
  for (std::size_t i = 0; i < f.grid.n; ++i) {
    const double w = (i == 0 || i + 1 == f.grid.n) ? 0.5 : 1.0;
    sum += w * f.values[i] * std::exp(f.grid.log_x(i));
  }
  return sum * delta;
}

std::vector<double> node_masses(const GridDensity& f) {
  check_density(f);
  const double delta = f.grid.delta();
  std::vector<double> m(f.grid.n);
  for (std::size_t i = 0; i < f.grid.n; ++i) {
    m[i] = f.values[i] * std::exp(f.grid.log_x(i)) * delta;
  }
  return m;
}

namespace {

// Mass transport: each node mass splits linearly between the two nodes
// bracketing its shifted position. offset = shift / delta (log units).
struct Branch {
  long k;        // floor(offset)
  double frac;   // offset - k, in [0, 1)
};

Branch make_branch(double offset) {
  const double fl = std::floor(offset);
  return Branch{static_cast<long>(fl), offset - fl};
}

GridDensity apply_pushforward(const GridDensity& f, const ModelParams& params,
                              double* truncation_delta) {
  const auto n = static_cast<long>(f.grid.n);
  const double delta = f.grid.delta();
  const LogCoefficients lc = log_coefficients(params);
  const double q = 1.0 - params.p;

  const Branch win = make_branch(lc.mu / delta);     // shift up by mu
  const Branch loss = make_branch(-lc.lambda / delta);  // shift down by lambda

  const std::vector<double> m = node_masses(f);

  GridDensity out = make_density(f.grid);
  std::vector<double> new_m(f.grid.n, 0.0);

  auto gather = [&m, n](const Branch& br, long j) {
    double acc = 0.0;
    const long s0 = j - br.k;      // source for the (1 - frac) part
    const long s1 = j - br.k - 1;  // source for the frac part
    if (s0 >= 0 && s0 < n) acc += (1.0 - br.frac) * m[static_cast<std::size_t>(s0)];
    if (s1 >= 0 && s1 < n) acc += br.frac * m[static_cast<std::size_t>(s1)];
    return acc;
  };

  parallel_for(f.grid.n, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j < hi; ++j) {
      const long jl = static_cast<long>(j);
      new_m[j] = (params.p * gather(win, jl) + q * gather(loss, jl)) / params.kappa;
    }
  });

  // Mass whose destination fell outside the grid, accounted directly.
  double lost_win = 0.0;
  for (long i = n - win.k - 1; i < n; ++i) {
    if (i < 0) continue;
    const double mi = m[static_cast<std::size_t>(i)];
    if (i + win.k >= n) lost_win += (1.0 - win.frac) * mi;
    if (i + win.k + 1 >= n) lost_win += win.frac * mi;
  }
  double lost_loss = 0.0;
  for (long i = 0; i < -loss.k && i < n; ++i) {
    const double mi = m[static_cast<std::size_t>(i)];
    if (i + loss.k < 0) lost_loss += (1.0 - loss.frac) * mi;
    if (i + loss.k + 1 < 0) lost_loss += loss.frac * mi;
  }
  const double lost = (params.p * lost_win + q * lost_loss) / params.kappa;

  for (std::size_t j = 0; j < f.grid.n; ++j) {
    out.values[j] = new_m[j] / (std::exp(f.grid.log_x(j)) * delta);
  }
  out.truncation_mass = f.truncation_mass + lost;
  if (truncation_delta) *truncation_delta = lost;
  return out;
}

// Log-density interpolation: exact on power laws (log f linear in s), with a
// linear fallback next to zero values.
double read_interpolated(const GridDensity& f, double s) {
  const GridSpec& g = f.grid;
  if (s < g.log_x_min || s > g.log_x_max) return 0.0;
  const double t = (s - g.log_x_min) / g.delta();
  std::size_t i = static_cast<std::size_t>(t);
  if (i >= g.n - 1) i = g.n - 2;
  const double frac = t - static_cast<double>(i);
  const double va = f.values[i];
  const double vb = f.values[i + 1];
  if (va > 0.0 && vb > 0.0) {
    return std::exp((1.0 - frac) * std::log(va) + frac * std::log(vb));
  }
  return (1.0 - frac) * va + frac * vb;
}

GridDensity apply_interpolation(const GridDensity& f, const ModelParams& params,
                                double* truncation_delta) {
  const LogCoefficients lc = log_coefficients(params);
  const double q = 1.0 - params.p;
  const double jac_win = 1.0 / (1.0 + params.gamma);
  const double jac_loss = 1.0 / (1.0 - params.gamma);

  GridDensity out = make_density(f.grid);
  parallel_for(f.grid.n, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j < hi; ++j) {
      const double s = f.grid.log_x(j);
      const double up = read_interpolated(f, s - lc.mu);
      const double dn = read_interpolated(f, s + lc.lambda);
      out.values[j] = (params.p * jac_win * up + q * jac_loss * dn) / params.kappa;
    }
  });

  // Estimated lost mass: input mass that the two maps push past the edges.
  const std::vector<double> m = node_masses(f);
  double upper = 0.0, lower = 0.0;
  for (std::size_t i = 0; i < f.grid.n; ++i) {
    const double s = f.grid.log_x(i);
    if (s > f.grid.log_x_max - lc.mu) upper += m[i];
    if (s < f.grid.log_x_min + lc.lambda) lower += m[i];
  }
  const double lost = (params.p * upper + q * lower) / params.kappa;
  out.truncation_mass = f.truncation_mass + lost;
  if (truncation_delta) *truncation_delta = lost;
  return out;
}

}  // namespace

GridDensity apply_operator(const GridDensity& f, const ModelParams& params,
                           OperatorForm form, double* truncation_delta) {
  check_density(f);
  require_valid(params);
  if (form == OperatorForm::PushForward) {
    return apply_pushforward(f, params, truncation_delta);
  }
  return apply_interpolation(f, params, truncation_delta);
}

IterateResult iterate(const GridDensity& f0, const ModelParams& params,
                      std::uint64_t n_steps, OperatorForm form, IterateMode mode,
                      const GridDensity* source) {
  check_density(f0);
  require_valid(params);

  const GridDensity& inject = source ? *source : f0;
  if (source) {
    check_density(*source);
    if (source->grid.n != f0.grid.n) {
      throw Error(ErrorCode::InvalidArgument, "recycle source must share the grid");
    }
  }

  IterateResult res;
  res.density = f0;
  res.trace.reserve(n_steps + 1);
  res.trace.push_back({0, l1_mass(f0), f0.truncation_mass});

  const double source_mass = mode == IterateMode::Recycle ? l1_mass(inject) : 0.0;
  if (mode == IterateMode::Recycle && !(source_mass > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "recycle iteration requires a nonzero source");
  }

  for (std::uint64_t step = 1; step <= n_steps; ++step) {
    const double mass_before = l1_mass(res.density);
    res.density = apply_operator(res.density, params, form);
    double mass_after = l1_mass(res.density);

    switch (mode) {
      case IterateMode::Plain:
        res.trace.push_back({step, mass_after, res.density.truncation_mass});
        break;
      case IterateMode::Renormalized: {
        res.trace.push_back({step, mass_after, res.density.truncation_mass});
        if (mass_after > 0.0) {
          for (double& v : res.density.values) v /= mass_after;
        }
        break;
      }
      case IterateMode::Recycle: {
        const double deficit = mass_before - mass_after;
        if (deficit > 0.0) {
          const double scale = deficit / source_mass;
          for (std::size_t i = 0; i < res.density.values.size(); ++i) {
            res.density.values[i] += scale * inject.values[i];
          }
          mass_after = l1_mass(res.density);
        }
        res.trace.push_back({step, mass_after, res.density.truncation_mass});
        break;
      }
    }
  }
  return res;
}

TailFit fit_tail(const GridDensity& f, double q_lo, double q_hi) {
  check_density(f);
  if (!(q_lo >= 0.0 && q_lo < q_hi && q_hi <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "tail window requires 0 <= q_lo < q_hi <= 1");
  }

  const std::vector<double> m = node_masses(f);
  double total = 0.0;
  for (double v : m) total += v;
  if (!(total > 0.0)) {
    throw Error(ErrorCode::InsufficientData, "tail fit: density carries no mass");
  }

  std::size_t i_lo = f.grid.n, i_hi = f.grid.n;
  double cum = 0.0;
  for (std::size_t i = 0; i < f.grid.n; ++i) {
    cum += m[i];
    if (i_lo == f.grid.n && cum >= q_lo * total) i_lo = i;
    if (cum >= q_hi * total) {
      i_hi = i;
      break;
    }
  }
  if (i_hi == f.grid.n) i_hi = f.grid.n - 1;
  if (i_lo == f.grid.n) i_lo = i_hi;

  // Least squares of log f against s = log x over positive nodes.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  std::size_t count = 0;
  for (std::size_t i = i_lo; i <= i_hi; ++i) {
    if (!(f.values[i] > 0.0)) continue;
    const double x = f.grid.log_x(i);
    const double y = std::log(f.values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    ++count;
  }
  if (count < 8) {
    throw Error(ErrorCode::InsufficientData,
                "tail fit: window holds fewer than 8 positive nodes");
  }

  const double nf = static_cast<double>(count);
  const double var_x = sxx - sx * sx / nf;
  const double cov = sxy - sx * sy / nf;
  const double var_y = syy - sy * sy / nf;
  if (!(var_x > 0.0)) {
    throw Error(ErrorCode::InsufficientData, "tail fit: degenerate window");
  }
  const double slope = cov / var_x;
  const double ss_res = var_y - slope * cov;

  TailFit fit;
  fit.alpha_hat = -slope;
  fit.x_lo = std::exp(f.grid.log_x(i_lo));
  fit.x_hi = std::exp(f.grid.log_x(i_hi));
  if (var_y > 0.0) {
    fit.r2 = std::clamp(1.0 - ss_res / var_y, 0.0, 1.0);
  } else {
    fit.r2 = ss_res <= 0.0 ? 1.0 : 0.0;
  }
  return fit;
}

}  // namespace wealthlab
