/* wealthlab C API: multiplicative betting dynamics, Kelly thresholds,
 * characteristic-equation Pareto exponents, wealth-density evolution and
 * agent-based elite-turnover simulation.
 *
 * Conventions:
 *   - every function returns a wl_status; WL_OK means success
 *   - on failure, wl_last_error_message() describes the problem for the
 *     calling thread
 *   - objects behind opaque handles are created by wl_*_create/wl_* factory
 *     calls and released with the matching wl_*_free
 */

#ifndef WEALTHLAB_H
#define WEALTHLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(WL_BUILDING_SHARED)
#define WL_API __declspec(dllexport)
#else
#define WL_API __declspec(dllimport)
#endif
#elif defined(__GNUC__) || defined(__clang__)
#define WL_API __attribute__((visibility("default")))
#else
#define WL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wl_status {
  WL_OK = 0,
  WL_ERR_INVALID_ARGUMENT = 1,
  WL_ERR_DOMAIN = 2,
  WL_ERR_SOLVER_FAILURE = 3,
  WL_ERR_INSUFFICIENT_DATA = 4,
  WL_ERR_IO = 5,
  WL_ERR_CONFIG = 6,
  WL_ERR_RESOURCE = 7,
  WL_ERR_UNKNOWN = 8
} wl_status;

WL_API const char* wl_status_name(wl_status status);
WL_API const char* wl_version(void);

/* Message for the most recent failure on the calling thread. */
WL_API const char* wl_last_error_message(void);
/* Same, as a {"error":{"code":...,"message":...}} JSON record. */
WL_API const char* wl_last_error_json(void);

/* ---- model parameters ---------------------------------------------- */

typedef struct wl_params {
  double p;     /* win probability, 0 < p < 1 */
  double gamma; /* wagered fraction, 0 < gamma < 1 */
  double kappa; /* dissipative coefficient, kappa >= 1 */
} wl_params;

/* Hard-violation bits reported by wl_params_validate. */
#define WL_VIOLATION_P 0x1u
#define WL_VIOLATION_GAMMA 0x2u
#define WL_VIOLATION_KAPPA 0x4u
/* Advisory bits. */
#define WL_ADVISORY_NO_EDGE 0x1u

/* Reports constraint status; never fails on out-of-range values. */
WL_API wl_status wl_params_validate(const wl_params* params, uint32_t* hard_mask,
                                    uint32_t* advisory_mask);

typedef struct wl_log_coeffs {
  double lambda; /* -log(1 - gamma) */
  double mu;     /*  log(1 + gamma) */
  double a;      /*  q / (kappa (1 - gamma)) */
  double b;      /*  p / (kappa (1 + gamma)) */
} wl_log_coeffs;

WL_API wl_status wl_log_coefficients(const wl_params* params, wl_log_coeffs* out);

/* ---- kelly ---------------------------------------------------------- */

WL_API wl_status wl_growth_rate(double p, double gamma, double* out);
WL_API wl_status wl_growth_rate_derivative(double p, double gamma, double* out);
WL_API wl_status wl_kelly_fraction(double p, double* out);
WL_API wl_status wl_ruin_threshold(double p, double tol, double* out);
WL_API wl_status wl_expected_gain(const wl_params* params, double x, double* out);

/* outcomes[i] non-zero = win. out_path must hold n_outcomes + 1 doubles. */
WL_API wl_status wl_bankroll_path(double p, double gamma, double x0,
                                  const uint8_t* outcomes, size_t n_outcomes,
                                  double* out_path);

/* ---- spectral ------------------------------------------------------- */

WL_API wl_status wl_char_h(const wl_log_coeffs* coeffs, double rho, double* out);
WL_API wl_status wl_stationary_point(const wl_log_coeffs* coeffs, double* out);
WL_API wl_status wl_kappa_min(double p, double gamma, double* out);

typedef enum wl_spectral_status {
  WL_SPECTRAL_TWO_ROOTS = 0,
  WL_SPECTRAL_BOUNDARY = 1,
  WL_SPECTRAL_SUBCRITICAL = 2,
  WL_SPECTRAL_TANGENT = 3,
  WL_SPECTRAL_NO_REAL_ROOTS = 4,
  WL_SPECTRAL_DEGENERATE = 5
} wl_spectral_status;

typedef struct wl_spectral_result {
  int status;       /* wl_spectral_status */
  double rho_0;     /* stationary point of the characteristic map */
  double kappa_min; /* admissibility threshold (NaN when solved from raw coeffs) */
  int has_root_left, has_root_right;
  double root_left, root_right; /* all real roots found, ordered */
  int has_rho_neg, has_rho_pos, has_alpha;
  double rho_neg, rho_pos, alpha; /* admissible decomposition, kappa > kappa_0 */
  int summable;                   /* alpha > 1 */
} wl_spectral_result;

WL_API wl_status wl_solve_roots(const wl_log_coeffs* coeffs, double tol,
                                wl_spectral_result* out);
/* Full pipeline from parameters; fills kappa_min. */
WL_API wl_status wl_admissible_alpha(const wl_params* params, double tol,
                                     wl_spectral_result* out);

/* ---- density -------------------------------------------------------- */

typedef struct wl_density wl_density; /* opaque */

#define WL_OPERATOR_PUSHFORWARD 0
#define WL_OPERATOR_INTERPOLATION 1

#define WL_ITERATE_PLAIN 0
#define WL_ITERATE_RENORMALIZED 1
#define WL_ITERATE_RECYCLE 2

WL_API wl_status wl_density_create(double log_x_min, double log_x_max, uint64_t n,
                                   wl_density** out);
WL_API void wl_density_free(wl_density* d);
WL_API wl_status wl_density_clone(const wl_density* d, wl_density** out);

WL_API wl_status wl_density_size(const wl_density* d, uint64_t* out);
/* Both buffers must hold wl_density_size entries. */
WL_API wl_status wl_density_read(const wl_density* d, double* log_x, double* values);
WL_API wl_status wl_density_set_values(wl_density* d, const double* values, uint64_t n);

WL_API wl_status wl_density_fill_truncated_exponential(wl_density* d, double rate,
                                                       double x_cut);
WL_API wl_status wl_density_fill_power_law(wl_density* d, double rho);
WL_API wl_status wl_density_fill_log_gaussian(wl_density* d, double center_log_x,
                                              double width);

WL_API wl_status wl_density_l1_mass(const wl_density* d, double* out);
WL_API wl_status wl_density_truncation_mass(const wl_density* d, double* out);

WL_API wl_status wl_density_apply(const wl_density* in, const wl_params* params,
                                  int operator_form, wl_density** out,
                                  double* truncation_delta);

/* Evolves in place. When trace is non-null it must hold 3*(n_steps+1)
 * doubles and receives rows (step, mass, truncation_mass). source may be
 * null; it fixes the re-injection profile for WL_ITERATE_RECYCLE. */
WL_API wl_status wl_density_iterate(wl_density* d, const wl_params* params,
                                    uint64_t n_steps, int operator_form,
                                    int iterate_mode, const wl_density* source,
                                    double* trace);

typedef struct wl_tail_fit {
  double alpha_hat;
  double x_lo;
  double x_hi;
  double r2;
} wl_tail_fit;

WL_API wl_status wl_density_fit_tail(const wl_density* d, double q_lo, double q_hi,
                                     wl_tail_fit* out);

WL_API wl_status wl_density_write_csv(const wl_density* d, const char* path);
WL_API wl_status wl_density_read_csv(const char* path, wl_density** out);

/* ---- agent-based simulation ----------------------------------------- */

typedef struct wl_simulation wl_simulation; /* opaque */

typedef struct wl_sim_config {
  wl_params params;
  uint64_t n_agents;
  uint64_t n_rounds;
  uint64_t seed;
  double ruin_floor;      /* relative to initial wealth; <= 0 selects 1e-3 */
  double initial_wealth;  /* <= 0 selects 1.0 */
  const uint64_t* snapshot_rounds; /* strictly increasing, <= n_rounds */
  size_t n_snapshots;
  const double* elite_quantiles; /* each in (0, 1] */
  size_t n_quantiles;
  int rebirth_at_median;
  uint64_t memory_budget_bytes; /* 0 selects 1 GiB */
} wl_sim_config;

WL_API wl_status wl_simulate(const wl_sim_config* cfg, wl_simulation** out);
WL_API void wl_simulation_free(wl_simulation* sim);

WL_API wl_status wl_sim_n_agents(const wl_simulation* sim, uint64_t* out);
/* Buffer must hold n_agents doubles. */
WL_API wl_status wl_sim_final_wealth(const wl_simulation* sim, double* out);
WL_API wl_status wl_sim_mean_log_growth(const wl_simulation* sim, double* mean,
                                        double* standard_error);
WL_API wl_status wl_sim_n_snapshots(const wl_simulation* sim, uint64_t* out);
WL_API wl_status wl_sim_snapshot_round(const wl_simulation* sim, uint64_t index,
                                       uint64_t* out);
WL_API wl_status wl_sim_ruin_fraction(const wl_simulation* sim, uint64_t snapshot,
                                      double* out);
/* Turnover between two snapshots at one of the configured quantiles. */
WL_API wl_status wl_sim_turnover(const wl_simulation* sim, double elite_quantile,
                                 uint64_t snapshot_a, uint64_t snapshot_b,
                                 double* jaccard, double* fraction_replaced);
WL_API wl_status wl_sim_empirical_tail(const wl_simulation* sim, double log_x_min,
                                       double log_x_max, uint64_t grid_n,
                                       double q_lo, double q_hi, wl_tail_fit* out);

/* ---- experiment runner ----------------------------------------------- */

/* Runs one batch command ("kelly", "exponent", "evolve", "simulate") from a
 * JSON config into out_dir. overrides are "key=value" strings applied to
 * top-level config scalars. seed_override is honored by "simulate" when
 * has_seed_override is non-zero. soft_failures (nullable) receives the count
 * of per-point failures that were recorded in-row without failing the run. */
WL_API wl_status wl_run_command(const char* command, const char* config_path,
                                const char* out_dir,
                                const char* const* overrides, size_t n_overrides,
                                int has_seed_override, uint64_t seed_override,
                                int* soft_failures);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* WEALTHLAB_H */
