#ifndef WEALTHLAB_CORE_ABM_HPP
#define WEALTHLAB_CORE_ABM_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "core/density.hpp"
#include "core/model.hpp"

namespace wealthlab {

// Agent-based Monte Carlo of the betting dynamics. Each live agent
// independently multiplies its wealth by (1+gamma) with probability p and by
// (1-gamma) otherwise, once per round. Wealth dropping below
// ruin_floor * initial_wealth flags the agent ruined and freezes it.
//
// Draws come from counter-based streams keyed on (seed, agent, round), so a
// run is bit-reproducible regardless of worker count or scheduling.
//
// gamma = 0 is accepted here (frozen dynamics, useful as a null case) even
// though the operator/spectral modules require gamma > 0.
struct SimConfig {
  double p = 0.6;
  double gamma = 0.2;
  double kappa = 1.0;
  std::uint64_t n_agents = 10000;
  std::uint64_t n_rounds = 1000;
  std::uint64_t seed = 1;
  double ruin_floor = 1e-3;  // relative to initial wealth
  double initial_wealth = 1.0;
  std::vector<std::uint64_t> snapshot_rounds;  // sorted ascending, <= n_rounds
  std::vector<double> elite_quantiles;         // e.g. {0.01, 0.10, 0.50}
  bool rebirth_at_median = false;  // recycle ruined agents at the live median
                                   // (exploratory closure, off by default)
  std::uint64_t memory_budget_bytes = 1ull << 30;
};

struct Snapshot {
  std::uint64_t round = 0;
  double ruin_fraction = 0.0;
  // elite_bits[qi] marks membership of the top ceil(q * N) agents by wealth
  // (ties broken by agent index), packed 64 agents per word.
  std::vector<std::vector<std::uint64_t>> elite_bits;
};

class Simulation {
 public:
  const SimConfig& config() const { return cfg_; }
  const std::vector<double>& wealth() const { return wealth_; }
  const std::vector<std::uint32_t>& wins() const { return wins_; }
  const std::vector<std::uint32_t>& losses() const { return losses_; }
  const std::vector<std::uint8_t>& ruined() const { return ruined_; }
  // round after which the agent stopped updating (n_rounds if never ruined)
  const std::vector<std::uint64_t>& frozen_round() const { return frozen_round_; }
  const std::vector<Snapshot>& snapshots() const { return snapshots_; }
  std::uint64_t ruin_events() const { return ruin_events_; }

  double agent_weight(std::size_t i) const;  // kappa^{-frozen_round_i}
  std::size_t elite_size(double quantile) const;
  bool elite_member(std::size_t snapshot_idx, double quantile, std::size_t agent) const;

  // Sample mean and standard error over agents of (1/n) log(X_n / X_0).
  void mean_log_growth(double* mean, double* se) const;

 private:
  friend Simulation simulate(const SimConfig&);
  std::size_t quantile_index(double quantile) const;

  SimConfig cfg_;
  std::vector<double> wealth_;
  std::vector<std::uint32_t> wins_;
  std::vector<std::uint32_t> losses_;
  std::vector<std::uint8_t> ruined_;
  std::vector<std::uint64_t> frozen_round_;
  std::vector<Snapshot> snapshots_;
  std::uint64_t ruin_events_ = 0;
};

Simulation simulate(const SimConfig& cfg);

// Elite-turnover measurements between snapshot pairs at one quantile.
struct TurnoverEntry {
  std::uint64_t round_a = 0;
  std::uint64_t round_b = 0;
  double jaccard = 0.0;
  double fraction_replaced = 0.0;  // |A \ B| / |A|
};

struct CirculationReport {
  double elite_quantile = 0.0;
  std::vector<std::uint64_t> snapshots;
  std::vector<TurnoverEntry> turnover;  // all ordered pairs a <= b
  double mean_log_growth = 0.0;
  double mean_log_growth_se = 0.0;
  double ruin_fraction = 0.0;  // at the last snapshot
  // Elite tenure measured along the snapshot sequence: a maximal run of
  // consecutive in-elite snapshots from round r_i to r_j counts as
  // r_j - r_i rounds. Histogram over all runs of all agents.
  std::map<std::uint64_t, std::uint64_t> tenure_histogram;
  double tenure_mean_rounds = 0.0;
  std::uint64_t tenure_max_rounds = 0;
};

// Requires the quantile to be one configured at simulate() time and an elite
// of at least 50 agents (Error(InsufficientData) otherwise).
CirculationReport circulation(const Simulation& sim, double elite_quantile);

// Ruin fraction at each snapshot; nondecreasing in the round.
std::vector<std::pair<std::uint64_t, double>> ruin_stats(const Simulation& sim);

// Weighted wealth histogram of the live agents on the given grid, delegated
// to fit_tail. Requires at least 1000 live agents.
TailFit empirical_tail(const Simulation& sim, const GridSpec& grid,
                       double q_lo = 0.95, double q_hi = 0.999);

// The histogram itself (also used by the evolve/report pipeline).
GridDensity live_wealth_histogram(const Simulation& sim, const GridSpec& grid);

}  // namespace wealthlab

#endif
