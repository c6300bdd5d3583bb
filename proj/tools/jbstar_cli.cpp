// jbstar: seeded verification suites for the JB*-algebra engine.
//
//   jbstar verify    --suite TAG --model KIND:SIZE --trials N --seed S
//   jbstar roundtrip --model KIND:SIZE --trials N
//   jbstar stone     --model KIND:SIZE --trials N
//
// Reports are deterministic for a fixed configuration (timing aside).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "jbstar/suites.hpp"

namespace {

// plain key=value configuration file; flags override file entries
void load_config_file(const std::string& path, jbstar::JobConfig& config) {
  std::ifstream in(path);
  if (!in) throw jbstar::ConfigError("cannot open config file: " + path);
  std::string line;
  bool saw_suite = false, saw_model = false;
  while (std::getline(in, line)) {
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const char* ws = " \t\r";
      s.erase(0, s.find_first_not_of(ws));
      const size_t last = s.find_last_not_of(ws);
      s.erase(last == std::string::npos ? 0 : last + 1);
      return s;
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) continue;
    if (key == "suite") {
      if (!saw_suite) {
        config.suites.clear();
        saw_suite = true;
      }
      config.suites.push_back(value);
    } else if (key == "model") {
      if (!saw_model) {
        config.models.clear();
        saw_model = true;
      }
      config.models.push_back(value);
    } else if (key == "trials") {
      config.trials = std::stoi(value);
    } else if (key == "seed") {
      config.seed = std::stoull(value);
    } else if (key == "out") {
      config.out = value;
    } else if (key == "format") {
      config.format = value;
    } else if (key == "threads") {
      config.threads = std::stoi(value);
    } else if (key == "path") {
      config.path_kind = value;
    } else if (key == "path.h") {
      config.path_h = value;
    } else if (key.rfind("tol.", 0) == 0) {
      config.tolerances[key.substr(4)] = std::stod(value);
    } else {
      throw jbstar::ConfigError("unknown config key: " + key);
    }
  }
}

int emit_report(const jbstar::SuiteReport& report, const jbstar::JobConfig& config) {
  std::string payload;
  if (config.format == "json") {
    payload = jbstar::suite_report_to_json(report).dump(2);
    payload += "\n";
  } else if (config.format == "text") {
    payload = jbstar::suite_report_to_text(report);
  } else {
    throw jbstar::ConfigError("unknown format: " + config.format);
  }
  if (config.out.empty()) {
    std::cout << payload;
  } else {
    std::ofstream out(config.out, std::ios::binary);
    if (!out) throw jbstar::ConfigError("cannot write output file: " + config.out);
    out << payload;
  }
  return report.aggregate == "pass" ? 0 : 1;
}

void add_common_flags(CLI::App* cmd, jbstar::JobConfig& config, std::string& config_path,
                      std::vector<std::string>& suites, std::vector<std::string>& models,
                      std::vector<std::string>& tols) {
  cmd->add_option("--config", config_path, "plain key=value configuration file");
  cmd->add_option("--suite", suites, "suite tag (repeatable; 'all' runs every suite)");
  cmd->add_option("--model", models, "model spec kind:size, '+' joins direct sums (repeatable)");
  cmd->add_option("--trials", config.trials, "trials per suite record");
  cmd->add_option("--seed", config.seed, "master seed");
  cmd->add_option("--tol", tols, "override NAME=VALUE (repeatable)");
  cmd->add_option("--out", config.out, "report file (default stdout)");
  cmd->add_option("--format", config.format, "json|text");
  cmd->add_option("--threads", config.threads, "worker threads (0 = runtime default)");
  cmd->add_option("--path", config.path_kind, "stone path spec: planted|structured");
  cmd->add_option("--path-h", config.path_h, "fixed planted generator coordinates [[re,im],...]");
}

void merge_flags(jbstar::JobConfig& config, const std::string& config_path,
                 const std::vector<std::string>& suites, const std::vector<std::string>& models,
                 const std::vector<std::string>& tols) {
  if (!config_path.empty()) load_config_file(config_path, config);
  if (!suites.empty()) config.suites = suites;
  if (!models.empty()) config.models = models;
  for (const std::string& t : tols) {
    const size_t eq = t.find('=');
    if (eq == std::string::npos) throw jbstar::ConfigError("bad --tol, expected NAME=VALUE: " + t);
    config.tolerances[t.substr(0, eq)] = std::stod(t.substr(eq + 1));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical verification suites for finite-dimensional JB*-algebras"};
  app.require_subcommand(1);

  jbstar::JobConfig config;
  std::string config_path;
  std::vector<std::string> suites, models, tols;

  CLI::App* verify = app.add_subcommand("verify", "run seeded property suites");
  CLI::App* roundtrip = app.add_subcommand("roundtrip", "plant-and-recover experiments");
  CLI::App* stone = app.add_subcommand("stone", "one-parameter group round trips");
  for (CLI::App* cmd : {verify, roundtrip, stone})
    add_common_flags(cmd, config, config_path, suites, models, tols);

  CLI11_PARSE(app, argc, argv);

  try {
    merge_flags(config, config_path, suites, models, tols);
    jbstar::SuiteReport report;
    if (verify->parsed()) {
      report = jbstar::cmd_verify(config);
    } else if (roundtrip->parsed()) {
      report = jbstar::cmd_roundtrip(config);
    } else {
      report = jbstar::cmd_stone(config);
    }
    return emit_report(report, config);
  } catch (const jbstar::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
