#pragma once

// Experiment reports: per-trial records, summary statistics and pass/fail
// criteria, serialised to canonical JSON and CSV.  Canonical means: the bytes
// depend only on the configuration (never on thread count, wall clock or
// filesystem), so identical runs produce identical files.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace permlaw::report {

struct Criterion {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  std::string relation = "<=";  // how value compares to bound
  bool pass = false;
};

struct ExperimentReport {
  std::string kind;
  nlohmann::json config_echo;   // fully resolved configuration
  std::uint64_t master_seed = 0;
  std::uint64_t streams_used = 0;  // how many RNG stream indices were consumed
  std::vector<nlohmann::json> trials;  // one object per trial, fixed key sets
  nlohmann::json summary;
  std::vector<Criterion> criteria;
  double wall_seconds = 0.0;  // console information only; never serialised

  bool all_pass() const;
};

// Canonical serialisations.
std::string to_json(const ExperimentReport& rep);
std::string trials_to_csv(const ExperimentReport& rep);

// Writes content to path atomically (temp file + rename).
void write_text_atomic(const std::string& path, const std::string& content);

// Writes report.json and/or trials.csv into out_dir according to format
// ("json" | "csv" | "both"); creates the directory if needed.  Returns the
// list of files written.
std::vector<std::string> write_report_files(const ExperimentReport& rep,
                                            const std::string& out_dir,
                                            const std::string& format);

}  // namespace permlaw::report
