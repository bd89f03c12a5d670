#pragma once

#include <string>

#include "cdrl/orchestrator.hpp"

namespace cdrl {

// Run configuration is a line-oriented "key = value" document whose keys
// mirror the WorkerConfig/ExperimentSpec field names. Unknown and duplicate
// keys are rejected with the offending line number. '#' starts a comment.
ExperimentSpec parse_run_config(const std::string& text);
ExperimentSpec load_run_config(const std::string& path);

// Canonical form with every key present; parse(emit(spec)) == spec, and the
// emitted text is byte-stable, so a run can be reproduced from its
// config.resolved.
std::string emit_resolved_config(const ExperimentSpec& spec);

}  // namespace cdrl
