#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "permlaw/report.hpp"

using namespace permlaw;
using nlohmann::json;

namespace {

report::ExperimentReport sample_report() {
  report::ExperimentReport rep;
  rep.kind = "traces";
  rep.config_echo = json{{"kind", "traces"}, {"n", 10}, {"d", 2}};
  rep.master_seed = 42;
  rep.streams_used = 3;
  rep.trials = {json{{"trial", 0}, {"value", 1.5}, {"label", "a,b"}},
                json{{"trial", 1}, {"value", -2.0}, {"label", "plain"}},
                json{{"trial", 2}, {"value", 0.125}, {"label", "q\"uote"}}};
  rep.summary = json{{"mean", -0.125}};
  rep.criteria = {{"mean_small", 0.125, 1.0, "<=", true},
                  {"rate_high", 0.97, 0.95, ">=", true}};
  rep.wall_seconds = 123.456;
  return rep;
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("json carries the schema fields, never the wall clock") {
    const auto rep = sample_report();
    const std::string text = report::to_json(rep);
    const json parsed = json::parse(text);
    CHECK(parsed.at("schema_version") == "1");
    CHECK(parsed.at("kind") == "traces");
    CHECK(parsed.at("rng").at("master_seed") == 42);
    CHECK(parsed.at("rng").at("streams_used") == 3);
    CHECK(parsed.at("trials").size() == 3);
    CHECK(parsed.at("criteria").size() == 2);
    CHECK(parsed.at("criteria")[0].at("pass") == true);
    CHECK(text.find("wall") == std::string::npos);
    CHECK(text.back() == '\n');

    // Serialisation is a pure function of the content.
    auto again = sample_report();
    again.wall_seconds = 999.0;  // must not affect bytes
    CHECK(report::to_json(again) == text);
  }

  TEST_CASE("csv: comment header, sorted columns, quoting, row order") {
    const auto rep = sample_report();
    const std::string csv = report::trials_to_csv(rep);
    std::istringstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line.rfind("#", 0) == 0);  // '#' metadata lines first
    while (line.rfind("#", 0) == 0) REQUIRE(std::getline(in, line));
    CHECK(line == "label,trial,value");  // sorted keys as the header row
    REQUIRE(std::getline(in, line));
    CHECK(line == "\"a,b\",0,1.5");  // embedded comma quoted
    REQUIRE(std::getline(in, line));
    CHECK(line == "plain,1,-2.0");
    REQUIRE(std::getline(in, line));
    CHECK(line.find("0.125") != std::string::npos);
    CHECK_FALSE(std::getline(in, line));  // no trailing junk
  }

  TEST_CASE("all_pass reflects every criterion") {
    auto rep = sample_report();
    CHECK(rep.all_pass());
    rep.criteria.push_back({"broken", 2.0, 1.0, "<=", false});
    CHECK_FALSE(rep.all_pass());
  }

  TEST_CASE("atomic write: content lands, no temp residue, dirs created") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "permlaw_report_test";
    fs::remove_all(dir);

    const auto rep = sample_report();
    const auto written = report::write_report_files(rep, dir.string(), "both");
    REQUIRE(written.size() == 2);
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "trials.csv"));
    std::size_t residue = 0;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".tmp") ++residue;
    CHECK(residue == 0);

    std::ifstream in(dir / "report.json");
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == report::to_json(rep));

    // json-only format writes exactly one file.
    fs::remove_all(dir);
    CHECK(report::write_report_files(rep, dir.string(), "json").size() == 1);
    CHECK(fs::exists(dir / "report.json"));
    CHECK_FALSE(fs::exists(dir / "trials.csv"));
    fs::remove_all(dir);
  }
}
