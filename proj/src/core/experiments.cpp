#include "core/experiments.hpp"

#include <chrono>
#include <filesystem>

#include "core/loss.hpp"

namespace predlab {

Table loss_report_table(const LossReport& report, const std::string& name) {
  Table t{name,
          "mu=" + report.mu_label + " rho=" + report.rho_label + " method=" + report.method +
              " seed=" + std::to_string(report.seed),
          {"step", "delta", "a", "dbar", "abar", "cum_logloss"},
          {}};
  for (size_t i = 0; i < report.delta.size(); ++i)
    t.add_row({static_cast<int64_t>(i + 1), report.delta[i], report.a[i], report.dbar[i],
               report.abar[i], report.cum_logloss[i]});
  return t;
}

bool ExperimentResult::passed() const {
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

void ExperimentResult::check(const std::string& check_id, double lhs, double rhs,
                             double tolerance) {
  Verdict v;
  v.check_id = check_id;
  v.lhs = lhs;
  v.rhs = rhs;
  v.tolerance = tolerance;
  v.pass = lhs <= rhs + tolerance;
  verdicts.push_back(v);
}

Table& ExperimentResult::table(const std::string& name, std::vector<std::string> columns,
                               std::string meta) {
  tables.push_back(Table{name, std::move(meta), std::move(columns), {}});
  return tables.back();
}

const ExperimentDef& find_experiment(const std::string& id) {
  for (const auto& def : experiment_registry())
    if (def.id == id) return def;
  fail(Errc::unknown_experiment, "unknown experiment id: " + id);
}

ExperimentResult run_experiment(const Config& cfg) {
  const ExperimentDef& def = find_experiment(cfg.get_string("experiment"));
  ExperimentResult result;
  result.id = def.id;
  result.config_echo = cfg.echo();
  auto t0 = std::chrono::steady_clock::now();
  def.run(cfg, result);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Table verdicts{"verdicts", "experiment=" + def.id + " anchor=" + def.anchor,
                 {"check_id", "lhs", "rhs", "tolerance", "verdict"},
                 {}};
  for (const auto& v : result.verdicts)
    verdicts.add_row({v.check_id, v.lhs, v.rhs, v.tolerance,
                      std::string(v.pass ? "pass" : "fail")});
  result.tables.push_back(std::move(verdicts));
  return result;
}

std::vector<std::string> export_result_csv(const ExperimentResult& result,
                                           const std::string& dir) {
  std::filesystem::path base(dir);
  std::error_code ec;
  std::filesystem::create_directories(base, ec);
  if (ec) fail(Errc::io_error, "cannot create output directory: " + dir);
  std::vector<std::string> written;
  for (const auto& t : result.tables) {
    std::filesystem::path p = base / (result.id + "__" + t.name + ".csv");
    write_csv_file(t, p.string());
    written.push_back(p.string());
  }
  return written;
}

}  // namespace predlab
