#include "core/abm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace wealthlab {

namespace {

void check_sim_config(const SimConfig& cfg) {
  if (!(cfg.p > 0.0 && cfg.p < 1.0)) {
    throw Error(ErrorCode::Domain, "simulate requires 0 < p < 1");
  }
  if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0)) {
    throw Error(ErrorCode::Domain, "simulate requires 0 <= gamma < 1");
  }
  if (!(cfg.kappa >= 1.0)) {
    throw Error(ErrorCode::Domain, "simulate requires kappa >= 1");
  }
  if (cfg.n_agents < 1) {
    throw Error(ErrorCode::InvalidArgument, "simulate requires n_agents >= 1");
  }
  if (!(cfg.ruin_floor > 0.0 && cfg.ruin_floor < 1.0)) {
    throw Error(ErrorCode::Domain, "simulate requires ruin_floor in (0, 1)");
  }
  if (!(cfg.initial_wealth > 0.0)) {
    throw Error(ErrorCode::Domain, "simulate requires initial_wealth > 0");
  }
  for (std::size_t i = 0; i + 1 < cfg.snapshot_rounds.size(); ++i) {
    if (cfg.snapshot_rounds[i] >= cfg.snapshot_rounds[i + 1]) {
      throw Error(ErrorCode::InvalidArgument, "snapshot rounds must be strictly increasing");
    }
  }
  if (!cfg.snapshot_rounds.empty() && cfg.snapshot_rounds.back() > cfg.n_rounds) {
    throw Error(ErrorCode::InvalidArgument, "snapshot rounds must lie within the horizon");
  }
  for (double q : cfg.elite_quantiles) {
    if (!(q > 0.0 && q <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "elite quantiles must lie in (0, 1]");
    }
  }
  // Retention estimate: per snapshot one bitset per quantile plus stats.
  const std::uint64_t words = (cfg.n_agents + 63) / 64;
  const std::uint64_t per_snapshot =
      cfg.elite_quantiles.size() * words * 8 + 64;
  const std::uint64_t needed = per_snapshot * cfg.snapshot_rounds.size() +
                               cfg.n_agents * (8 + 4 + 4 + 8 + 1);
  if (needed > cfg.memory_budget_bytes) {
    throw Error(ErrorCode::Resource,
                "simulate: snapshot retention exceeds the memory budget");
  }
}

std::size_t elite_count(double quantile, std::uint64_t n_agents) {
  return static_cast<std::size_t>(
      std::ceil(quantile * static_cast<double>(n_agents)));
}

}  // namespace

double Simulation::agent_weight(std::size_t i) const {
  return std::pow(cfg_.kappa, -static_cast<double>(frozen_round_[i]));
}

std::size_t Simulation::elite_size(double quantile) const {
  return elite_count(quantile, cfg_.n_agents);
}

std::size_t Simulation::quantile_index(double quantile) const {
  for (std::size_t i = 0; i < cfg_.elite_quantiles.size(); ++i) {
    if (cfg_.elite_quantiles[i] == quantile) return i;
  }
  throw Error(ErrorCode::InvalidArgument,
              "quantile was not configured at simulate() time");
}

bool Simulation::elite_member(std::size_t snapshot_idx, double quantile,
                              std::size_t agent) const {
  const std::size_t qi = quantile_index(quantile);
  const auto& bits = snapshots_.at(snapshot_idx).elite_bits.at(qi);
  return (bits[agent >> 6] >> (agent & 63)) & 1u;
}

void Simulation::mean_log_growth(double* mean, double* se) const {
  const double n = static_cast<double>(cfg_.n_rounds);
  const double logx0 = std::log(cfg_.initial_wealth);
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t i = 0; i < wealth_.size(); ++i) {
    const double g = (std::log(wealth_[i]) - logx0) / n;
    sum += g;
    sumsq += g * g;
  }
  const double count = static_cast<double>(wealth_.size());
  const double m = sum / count;
  if (mean) *mean = m;
  if (se) {
    const double var = std::max(0.0, (sumsq - count * m * m) / (count - 1.0));
    *se = std::sqrt(var / count);
  }
}

namespace {

void take_snapshot(const SimConfig& cfg, std::uint64_t round,
                   const std::vector<double>& wealth,
                   const std::vector<std::uint8_t>& ruined,
                   std::vector<std::uint32_t>& scratch_order,
                   std::vector<Snapshot>& snapshots) {
  Snapshot snap;
  snap.round = round;
  std::uint64_t ruined_count = 0;
  for (std::uint8_t r : ruined) ruined_count += r;
  snap.ruin_fraction =
      static_cast<double>(ruined_count) / static_cast<double>(cfg.n_agents);

  const std::uint64_t words = (cfg.n_agents + 63) / 64;
  snap.elite_bits.resize(cfg.elite_quantiles.size());
  for (std::size_t qi = 0; qi < cfg.elite_quantiles.size(); ++qi) {
    const std::size_t k = elite_count(cfg.elite_quantiles[qi], cfg.n_agents);
    auto& bits = snap.elite_bits[qi];
    bits.assign(words, 0);
    if (k == 0) continue;
    std::iota(scratch_order.begin(), scratch_order.end(), 0u);
    auto richer = [&wealth](std::uint32_t x, std::uint32_t y) {
      if (wealth[x] != wealth[y]) return wealth[x] > wealth[y];
      return x < y;  // ties broken by agent index
    };
    if (k < scratch_order.size()) {
      std::nth_element(scratch_order.begin(), scratch_order.begin() + (k - 1),
                       scratch_order.end(), richer);
    }
    for (std::size_t r = 0; r < k; ++r) {
      const std::uint32_t agent = scratch_order[r];
      bits[agent >> 6] |= 1ull << (agent & 63);
    }
  }
  snapshots.push_back(std::move(snap));
}

}  // namespace

Simulation simulate(const SimConfig& cfg) {
  check_sim_config(cfg);

  Simulation sim;
  sim.cfg_ = cfg;
  const std::size_t n = static_cast<std::size_t>(cfg.n_agents);
  sim.wealth_.assign(n, cfg.initial_wealth);
  sim.wins_.assign(n, 0);
  sim.losses_.assign(n, 0);
  sim.ruined_.assign(n, 0);
  sim.frozen_round_.assign(n, cfg.n_rounds);

  const double floor_abs = cfg.ruin_floor * cfg.initial_wealth;
  const double up = 1.0 + cfg.gamma;
  const double dn = 1.0 - cfg.gamma;

  std::vector<std::uint32_t> scratch_order(n);
  std::size_t next_snap = 0;
  auto maybe_snapshot = [&](std::uint64_t round) {
    while (next_snap < cfg.snapshot_rounds.size() &&
           cfg.snapshot_rounds[next_snap] == round) {
      take_snapshot(cfg, round, sim.wealth_, sim.ruined_, scratch_order,
                    sim.snapshots_);
      ++next_snap;
    }
  };

  maybe_snapshot(0);

  std::vector<std::uint32_t> ruined_this_round;
  for (std::uint64_t round = 1; round <= cfg.n_rounds; ++round) {
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        if (sim.ruined_[i]) continue;
        const double u = uniform01(cfg.seed, i, round - 1);
        if (u < cfg.p) {
          sim.wealth_[i] *= up;
          ++sim.wins_[i];
        } else {
          sim.wealth_[i] *= dn;
          ++sim.losses_[i];
        }
        if (sim.wealth_[i] < floor_abs) {
          sim.ruined_[i] = 1;
          sim.frozen_round_[i] = round;
        }
      }
    });

    if (cfg.rebirth_at_median) {
      ruined_this_round.clear();
      for (std::size_t i = 0; i < n; ++i) {
        if (sim.ruined_[i]) ruined_this_round.push_back(static_cast<std::uint32_t>(i));
      }
      if (!ruined_this_round.empty()) {
        std::vector<double> live;
        live.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
          if (!sim.ruined_[i]) live.push_back(sim.wealth_[i]);
        }
        double median = cfg.initial_wealth;
        if (!live.empty()) {
          const std::size_t mid = live.size() / 2;
          std::nth_element(live.begin(), live.begin() + mid, live.end());
          median = live[mid];
        }
        for (std::uint32_t i : ruined_this_round) {
          sim.wealth_[i] = median;
          sim.ruined_[i] = 0;
          sim.frozen_round_[i] = cfg.n_rounds;
          ++sim.ruin_events_;
        }
      }
    }

    maybe_snapshot(round);
  }
  if (!cfg.rebirth_at_median) {
    for (std::uint8_t r : sim.ruined_) sim.ruin_events_ += r;
  }
  return sim;
}

CirculationReport circulation(const Simulation& sim, double elite_quantile) {
  const SimConfig& cfg = sim.config();
  const std::size_t k = sim.elite_size(elite_quantile);
  if (k < 50) {
    throw Error(ErrorCode::InsufficientData,
                "circulation requires an elite of at least 50 agents");
  }
  const std::size_t qi = [&] {
    for (std::size_t i = 0; i < cfg.elite_quantiles.size(); ++i) {
      if (cfg.elite_quantiles[i] == elite_quantile) return i;
    }
    throw Error(ErrorCode::InvalidArgument,
                "quantile was not configured at simulate() time");
  }();

  CirculationReport rep;
  rep.elite_quantile = elite_quantile;
  const auto& snaps = sim.snapshots();
  rep.snapshots.reserve(snaps.size());
  for (const auto& s : snaps) rep.snapshots.push_back(s.round);

  for (std::size_t ai = 0; ai < snaps.size(); ++ai) {
    for (std::size_t bi = ai; bi < snaps.size(); ++bi) {
      const auto& A = snaps[ai].elite_bits[qi];
      const auto& B = snaps[bi].elite_bits[qi];
      std::uint64_t inter = 0, uni = 0;
      for (std::size_t w = 0; w < A.size(); ++w) {
        inter += std::popcount(A[w] & B[w]);
        uni += std::popcount(A[w] | B[w]);
      }
      TurnoverEntry e;
      e.round_a = snaps[ai].round;
      e.round_b = snaps[bi].round;
      e.jaccard = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
      e.fraction_replaced =
          1.0 - static_cast<double>(inter) / static_cast<double>(k);
      rep.turnover.push_back(e);
    }
  }

  // Tenure: run lengths of elite membership along the snapshot sequence.
  double tenure_sum = 0.0;
  std::uint64_t tenure_runs = 0;
  for (std::size_t agent = 0; agent < cfg.n_agents; ++agent) {
    std::size_t run_start = snaps.size();
    for (std::size_t si = 0; si <= snaps.size(); ++si) {
      const bool in_elite =
          si < snaps.size() &&
          ((snaps[si].elite_bits[qi][agent >> 6] >> (agent & 63)) & 1u);
      if (in_elite && run_start == snaps.size()) run_start = si;
      if (!in_elite && run_start != snaps.size()) {
        const std::uint64_t rounds =
            snaps[si - 1].round - snaps[run_start].round;
        ++rep.tenure_histogram[rounds];
        tenure_sum += static_cast<double>(rounds);
        ++tenure_runs;
        rep.tenure_max_rounds = std::max(rep.tenure_max_rounds, rounds);
        run_start = snaps.size();
      }
    }
  }
  rep.tenure_mean_rounds = tenure_runs ? tenure_sum / static_cast<double>(tenure_runs) : 0.0;

  sim.mean_log_growth(&rep.mean_log_growth, &rep.mean_log_growth_se);
  rep.ruin_fraction = snaps.empty() ? 0.0 : snaps.back().ruin_fraction;
  return rep;
}

std::vector<std::pair<std::uint64_t, double>> ruin_stats(const Simulation& sim) {
  std::vector<std::pair<std::uint64_t, double>> out;
  out.reserve(sim.snapshots().size());
  for (const auto& s : sim.snapshots()) {
    out.emplace_back(s.round, s.ruin_fraction);
  }
  return out;
}

GridDensity live_wealth_histogram(const Simulation& sim, const GridSpec& grid) {
  GridDensity d = make_density(grid);
  const double delta = grid.delta();
  for (std::size_t i = 0; i < sim.wealth().size(); ++i) {
    if (sim.ruined()[i]) continue;
    const double s = std::log(sim.wealth()[i]);
    if (s < grid.log_x_min || s > grid.log_x_max) continue;
    auto j = static_cast<std::size_t>((s - grid.log_x_min) / delta + 0.5);
    if (j >= grid.n) j = grid.n - 1;
    // deposit the agent's mass, then convert to density at the node
    d.values[j] += sim.agent_weight(i) / (std::exp(grid.log_x(j)) * delta);
  }
  return d;
}

TailFit empirical_tail(const Simulation& sim, const GridSpec& grid, double q_lo,
                       double q_hi) {
  std::uint64_t live = 0;
  for (std::uint8_t r : sim.ruined()) live += r ? 0 : 1;
  if (live < 1000) {
    throw Error(ErrorCode::InsufficientData,
                "empirical tail requires at least 1000 live agents");
  }
  return fit_tail(live_wealth_histogram(sim, grid), q_lo, q_hi);
}

}  // namespace wealthlab
