#pragma once

// Experiment drivers: Monte Carlo loops over independent trials, one RNG
// stream per trial, deterministic aggregation in trial order.  Every driver
// returns an ExperimentReport whose bytes depend only on the configuration.

#include "permlaw/config.hpp"
#include "permlaw/report.hpp"

namespace permlaw::runners {

// Validates and dispatches on cfg.kind; throws std::invalid_argument with the
// full validation error list if the configuration is unusable.
report::ExperimentReport run_experiment(const config::ExperimentConfig& cfg);

// Individual drivers (exposed for targeted tests; cfg must already be valid).
report::ExperimentReport run_traces(const config::ExperimentConfig& cfg);
report::ExperimentReport run_locallaw(const config::ExperimentConfig& cfg);
report::ExperimentReport run_loopres(const config::ExperimentConfig& cfg);
report::ExperimentReport run_ssv(const config::ExperimentConfig& cfg);
report::ExperimentReport run_noholes(const config::ExperimentConfig& cfg);
report::ExperimentReport run_concentration(const config::ExperimentConfig& cfg);
report::ExperimentReport run_smallball(const config::ExperimentConfig& cfg);
report::ExperimentReport run_pmpm(const config::ExperimentConfig& cfg);
report::ExperimentReport run_esd(const config::ExperimentConfig& cfg);
report::ExperimentReport run_girko(const config::ExperimentConfig& cfg);
report::ExperimentReport run_flatcheck(const config::ExperimentConfig& cfg);

}  // namespace permlaw::runners
