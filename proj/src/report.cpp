#include "permlaw/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace permlaw::report {

using nlohmann::json;

bool ExperimentReport::all_pass() const {
  for (const auto& c : criteria)
    if (!c.pass) return false;
  return true;
}

std::string to_json(const ExperimentReport& rep) {
  json obj;
  obj["schema_version"] = "1";
  obj["kind"] = rep.kind;
  obj["config"] = rep.config_echo;
  obj["rng"] = {{"master_seed", rep.master_seed}, {"streams_used", rep.streams_used}};
  obj["summary"] = rep.summary;
  json crits = json::array();
  for (const auto& c : rep.criteria)
    crits.push_back({{"name", c.name},
                     {"value", c.value},
                     {"bound", c.bound},
                     {"relation", c.relation},
                     {"pass", c.pass}});
  obj["criteria"] = std::move(crits);
  json trials = json::array();
  for (const auto& t : rep.trials) trials.push_back(t);
  obj["trials"] = std::move(trials);
  return obj.dump(2) + "\n";
}

// One scalar cell; strings are quoted RFC-4180 style when they contain a
// comma, quote or newline.
static std::string csv_cell(const json& v) {
  if (!v.is_string()) return v.dump();
  const std::string s = v.get<std::string>();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string trials_to_csv(const ExperimentReport& rep) {
  std::string out;
  out += "# kind=" + rep.kind + "\n";
  out += "# master_seed=" + std::to_string(rep.master_seed) + "\n";
  if (rep.config_echo.contains("n"))
    out += "# n=" + rep.config_echo.at("n").dump() +
           " d=" + (rep.config_echo.contains("d") ? rep.config_echo.at("d").dump() : "?") + "\n";
  if (rep.trials.empty()) return out;
  // nlohmann objects iterate in sorted key order, which fixes the columns;
  // every row of a report carries the same key set.
  std::vector<std::string> cols;
  for (auto it = rep.trials.front().begin(); it != rep.trials.front().end(); ++it)
    cols.push_back(it.key());
  std::string header;
  for (const auto& c : cols) {
    if (!header.empty()) header += ",";
    header += c;
  }
  out += header + "\n";
  for (const auto& row : rep.trials) {
    std::string line;
    for (const auto& c : cols) {
      if (!line.empty()) line += ",";
      if (row.contains(c)) line += csv_cell(row.at(c));
    }
    out += line + "\n";
  }
  return out;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("short write on '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

std::vector<std::string> write_report_files(const ExperimentReport& rep,
                                            const std::string& out_dir,
                                            const std::string& format) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> written;
  if (format == "json" || format == "both") {
    const std::string path = (fs::path(out_dir) / "report.json").string();
    write_text_atomic(path, to_json(rep));
    written.push_back(path);
  }
  if (format == "csv" || format == "both") {
    const std::string path = (fs::path(out_dir) / "trials.csv").string();
    write_text_atomic(path, trials_to_csv(rep));
    written.push_back(path);
  }
  return written;
}

}  // namespace permlaw::report
