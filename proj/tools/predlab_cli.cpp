// Command-line front end; talks to the library exclusively through the
// C API in predlab.h.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "predlab.h"

namespace {

int fail_with(plab_status status) {
  std::fprintf(stderr, "error: %s: %s\n", plab_status_name(status), plab_last_error());
  return 2;
}

int cmd_list() {
  char id[64], line[160], anchor[64];
  int count = plab_experiment_count();
  for (int i = 0; i < count; ++i) {
    plab_status s = plab_experiment_info(i, id, sizeof(id), line, sizeof(line), anchor,
                                         sizeof(anchor));
    if (s != PLAB_OK) return fail_with(s);
    std::printf("%-24s %-18s %s\n", id, anchor, line);
  }
  return 0;
}

int cmd_describe(const std::string& id) {
  char line[160], anchor[64], found[64];
  int count = plab_experiment_count();
  for (int i = 0; i < count; ++i) {
    plab_experiment_info(i, found, sizeof(found), line, sizeof(line), anchor, sizeof(anchor));
    if (id == found) {
      std::printf("%s - %s\nchecks: %s\n\nexample config:\n", found, line, anchor);
      std::vector<char> buf(4096);
      plab_status s = plab_experiment_example(id.c_str(), buf.data(), buf.size());
      if (s != PLAB_OK) return fail_with(s);
      std::printf("%s", buf.data());
      return 0;
    }
  }
  std::fprintf(stderr, "error: unknown experiment id: %s\n", id.c_str());
  return 2;
}

int run_common(const std::string& config, const std::string& id, long long seed, int threads,
               const std::string& out_dir, bool quiet) {
  plab_result* result = nullptr;
  plab_status s;
  if (!config.empty()) {
    s = plab_run_file(config.c_str(), seed, threads, &result);
  } else {
    std::string text = "experiment = " + id + "\n";
    s = plab_run(text.c_str(), seed, threads, &result);
  }
  if (s != PLAB_OK) return fail_with(s);

  int verdicts = plab_result_verdict_count(result);
  char check[160];
  for (int i = 0; i < verdicts && !quiet; ++i) {
    double lhs, rhs, tol;
    int pass;
    plab_result_verdict(result, i, check, sizeof(check), &lhs, &rhs, &tol, &pass);
    std::printf("[%s] %-60s lhs=%.6g rhs=%.6g tol=%.2g\n", pass ? "pass" : "FAIL", check, lhs,
                rhs, tol);
  }
  if (!out_dir.empty()) {
    s = plab_result_write_csv(result, out_dir.c_str());
    if (s != PLAB_OK) {
      plab_result_free(result);
      return fail_with(s);
    }
    int tables = plab_result_table_count(result);
    for (int i = 0; i < tables; ++i) {
      char name[128];
      plab_result_table_name(result, i, name, sizeof(name));
      std::printf("wrote %s/%s\n", out_dir.c_str(), name);
    }
  }
  bool ok = plab_result_passed(result) != 0;
  if (!quiet)
    std::printf("%s (%d checks, %.2fs)\n", ok ? "all checks passed" : "CHECKS FAILED", verdicts,
                plab_result_wall_seconds(result));
  plab_result_free(result);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"predlab: sequential prediction laboratory"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  long long seed = -1;
  int threads = 0;
  std::string out_dir;
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--threads", threads, "worker threads (affects wall time only)");
  app.add_option("--out", out_dir, "directory for CSV export");

  auto* list = app.add_subcommand("list", "list registered experiments");
  auto* describe = app.add_subcommand("describe", "show details and an example config");
  std::string describe_id;
  describe->add_option("id", describe_id, "experiment id")->required();

  auto* run = app.add_subcommand("run", "run an experiment and print its verdicts");
  std::string run_config, run_id;
  run->add_option("config", run_config, "config file path");
  run->add_option("--id", run_id, "run with the experiment's defaults");

  auto* exp = app.add_subcommand("export", "run and write only the CSV tables");
  std::string export_config, export_id;
  exp->add_option("config", export_config, "config file path");
  exp->add_option("--id", export_id, "run with the experiment's defaults");

  CLI11_PARSE(app, argc, argv);

  if (list->parsed()) return cmd_list();
  if (describe->parsed()) return cmd_describe(describe_id);
  if (run->parsed()) {
    if (run_config.empty() && run_id.empty()) {
      std::fprintf(stderr, "error: run needs a config file or --id\n");
      return 2;
    }
    return run_common(run_config, run_id, seed, threads, out_dir, false);
  }
  if (exp->parsed()) {
    if (export_config.empty() && export_id.empty()) {
      std::fprintf(stderr, "error: export needs a config file or --id\n");
      return 2;
    }
    if (out_dir.empty()) out_dir = ".";
    return run_common(export_config, export_id, seed, threads, out_dir, true);
  }
  return 0;
}
