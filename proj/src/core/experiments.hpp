#pragma once

#include <deque>
#include <functional>

#include "core/config.hpp"
#include "core/csv.hpp"

namespace predlab {

struct Verdict {
  std::string check_id;
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ExperimentResult {
  std::string id;
  std::string config_echo;
  std::deque<Table> tables;  // deque: handed-out references stay valid
  std::vector<Verdict> verdicts;
  double wall_seconds = 0.0;

  bool passed() const;
  // records a verdict; pass iff lhs <= rhs + tolerance
  void check(const std::string& id, double lhs, double rhs, double tolerance = 0.0);
  Table& table(const std::string& name, std::vector<std::string> columns,
               std::string meta = "");
};

struct ExperimentDef {
  std::string id;
  std::string line;    // one-line summary for listings
  std::string anchor;  // identifier of the inequality or construction checked
  std::string example_config;
  std::function<void(const Config&, ExperimentResult&)> run;
};

const std::vector<ExperimentDef>& experiment_registry();
const ExperimentDef& find_experiment(const std::string& id);

// Canonical per-step series table: step, delta, a, dbar, abar, cum_logloss,
// with the measure labels, method and seed on the metadata line.
Table loss_report_table(const struct LossReport& report, const std::string& name);

// Runs the experiment named by config key "experiment"; fills tables,
// verdicts and wall time. A "verdicts" table is appended automatically.
ExperimentResult run_experiment(const Config& cfg);

// One CSV file per table: <dir>/<experiment-id>__<table>.csv.
std::vector<std::string> export_result_csv(const ExperimentResult& result,
                                           const std::string& dir);

}  // namespace predlab
