#ifndef WEALTHLAB_CORE_RUNNER_HPP
#define WEALTHLAB_CORE_RUNNER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace wealthlab {

// Batch front door shared by the CLI and the C API. Parses the JSON
// experiment config, applies flag overrides onto top-level scalars,
// dispatches to the math modules and writes CSV/JSON artifacts into out_dir.
//
// Commands: "kelly", "exponent", "evolve", "simulate".
//
// Hard errors (bad config, bad domain, I/O) throw Error. Per-point solver
// failures inside an exponent sweep are recorded in-row and counted in the
// returned value; the run itself still succeeds.
struct RunOutcome {
  int soft_failures = 0;
};

RunOutcome run_command(const std::string& command, const std::string& config_path,
                       const std::string& out_dir,
                       const std::vector<std::string>& overrides = {},
                       std::optional<std::uint64_t> seed_override = std::nullopt);

// Machine-readable error records for stderr.
std::string error_json(const Error& e);
std::string error_json_generic(const std::string& message);

}  // namespace wealthlab

#endif
