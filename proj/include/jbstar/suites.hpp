#pragma once

#include <map>
#include <string>
#include <vector>

#include "jbstar/serialize.hpp"

namespace jbstar {

struct JobConfig {
  std::vector<std::string> suites{"all"};
  std::vector<std::string> models{"matrix:2"};
  int trials = 100;
  std::uint64_t seed = 1;
  std::map<std::string, double> tolerances;  // per-tag overrides
  std::string out;                           // empty -> stdout
  std::string format = "json";
  int threads = 0;                           // 0 keeps the runtime default
  // one-parameter path specs for the stone command: "planted" exponential
  // paths, or "structured" paths routed through a unital structured isometry
  std::string path_kind = "planted";
  // optional fixed generator coordinates [[re,im],...] for planted paths
  std::string path_h;
};

struct SuiteRecord {
  std::string tag;
  std::string model;
  int trials = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::string verdict;  // pass | fail | warn | expected-fail
  std::string note;
};

struct SuiteReport {
  std::vector<SuiteRecord> records;
  std::string aggregate;  // pass | fail
  double wall_seconds = 0.0;
  std::string version;
  std::map<std::string, std::string> config_echo;
};

// "matrix:3", "spin:2", "albert", and direct sums joined by "+" (the CLI
// also accepts the circled-plus character).
ModelPtr parse_model_spec(const std::string& spec);

const std::vector<std::string>& known_suites();

SuiteReport cmd_verify(const JobConfig& config);
SuiteReport cmd_roundtrip(const JobConfig& config);
SuiteReport cmd_stone(const JobConfig& config);

json suite_report_to_json(const SuiteReport& report);
std::string suite_report_to_text(const SuiteReport& report);

}  // namespace jbstar
