#include "predlab.h"

#include <cstring>

#include "core/experiments.hpp"

using namespace predlab;

namespace {

thread_local std::string g_last_error;

plab_status to_status(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return PLAB_ERR_INVALID_ARGUMENT;
    case Errc::parse_error: return PLAB_ERR_PARSE;
    case Errc::unknown_experiment: return PLAB_ERR_UNKNOWN_EXPERIMENT;
    case Errc::resource_limit: return PLAB_ERR_RESOURCE_LIMIT;
    case Errc::undefined_conditional: return PLAB_ERR_UNDEFINED_CONDITIONAL;
    case Errc::mixture_annihilated: return PLAB_ERR_MIXTURE_ANNIHILATED;
    case Errc::io_error: return PLAB_ERR_IO;
    case Errc::not_applicable: return PLAB_ERR_NOT_APPLICABLE;
    case Errc::internal: return PLAB_ERR_INTERNAL;
  }
  return PLAB_ERR_INTERNAL;
}

template <class F>
plab_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return PLAB_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PLAB_ERR_INTERNAL;
  }
}

void copy_out(const std::string& s, char* buf, size_t size) {
  if (!buf || size == 0) return;
  size_t len = std::min(s.size(), size - 1);
  std::memcpy(buf, s.data(), len);
  buf[len] = '\0';
}

plab_status run_config(Config cfg, long long seed_override, int threads_override,
                       plab_result** out);

}  // namespace

struct plab_result {
  ExperimentResult inner;
};

extern "C" {

const char* plab_version(void) { return "0.1.0"; }

const char* plab_status_name(plab_status status) {
  switch (status) {
    case PLAB_OK: return "ok";
    case PLAB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PLAB_ERR_PARSE: return "parse error";
    case PLAB_ERR_UNKNOWN_EXPERIMENT: return "unknown experiment";
    case PLAB_ERR_RESOURCE_LIMIT: return "resource limit";
    case PLAB_ERR_UNDEFINED_CONDITIONAL: return "undefined conditional";
    case PLAB_ERR_MIXTURE_ANNIHILATED: return "mixture annihilated";
    case PLAB_ERR_IO: return "i/o error";
    case PLAB_ERR_NOT_APPLICABLE: return "not applicable";
    case PLAB_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* plab_last_error(void) { return g_last_error.c_str(); }

int plab_experiment_count(void) { return static_cast<int>(experiment_registry().size()); }

plab_status plab_experiment_info(int index, char* id, size_t id_size, char* line,
                                 size_t line_size, char* anchor, size_t anchor_size) {
  return guarded([&] {
    const auto& defs = experiment_registry();
    if (index < 0 || index >= static_cast<int>(defs.size()))
      fail(Errc::invalid_argument, "experiment index out of range");
    copy_out(defs[static_cast<size_t>(index)].id, id, id_size);
    copy_out(defs[static_cast<size_t>(index)].line, line, line_size);
    copy_out(defs[static_cast<size_t>(index)].anchor, anchor, anchor_size);
  });
}

plab_status plab_experiment_example(const char* id, char* buf, size_t buf_size) {
  return guarded([&] {
    if (!id) fail(Errc::invalid_argument, "null experiment id");
    copy_out(find_experiment(id).example_config, buf, buf_size);
  });
}

plab_status plab_run(const char* config_text, long long seed_override, int threads_override,
                     plab_result** out) {
  if (!config_text || !out) {
    g_last_error = "null argument";
    return PLAB_ERR_INVALID_ARGUMENT;
  }
  return guarded(
      [&] { run_config(Config::parse(config_text), seed_override, threads_override, out); });
}

plab_status plab_run_file(const char* config_path, long long seed_override,
                          int threads_override, plab_result** out) {
  if (!config_path || !out) {
    g_last_error = "null argument";
    return PLAB_ERR_INVALID_ARGUMENT;
  }
  return guarded(
      [&] { run_config(Config::parse_file(config_path), seed_override, threads_override, out); });
}

void plab_result_free(plab_result* result) { delete result; }

int plab_result_passed(const plab_result* result) {
  return result && result->inner.passed() ? 1 : 0;
}

double plab_result_wall_seconds(const plab_result* result) {
  return result ? result->inner.wall_seconds : 0.0;
}

int plab_result_verdict_count(const plab_result* result) {
  return result ? static_cast<int>(result->inner.verdicts.size()) : 0;
}

plab_status plab_result_verdict(const plab_result* result, int index, char* check_id,
                                size_t check_id_size, double* lhs, double* rhs,
                                double* tolerance, int* pass) {
  return guarded([&] {
    if (!result) fail(Errc::invalid_argument, "null result");
    const auto& vs = result->inner.verdicts;
    if (index < 0 || index >= static_cast<int>(vs.size()))
      fail(Errc::invalid_argument, "verdict index out of range");
    const Verdict& v = vs[static_cast<size_t>(index)];
    copy_out(v.check_id, check_id, check_id_size);
    if (lhs) *lhs = v.lhs;
    if (rhs) *rhs = v.rhs;
    if (tolerance) *tolerance = v.tolerance;
    if (pass) *pass = v.pass ? 1 : 0;
  });
}

int plab_result_table_count(const plab_result* result) {
  return result ? static_cast<int>(result->inner.tables.size()) : 0;
}

plab_status plab_result_table_name(const plab_result* result, int index, char* buf,
                                   size_t buf_size) {
  return guarded([&] {
    if (!result) fail(Errc::invalid_argument, "null result");
    const auto& ts = result->inner.tables;
    if (index < 0 || index >= static_cast<int>(ts.size()))
      fail(Errc::invalid_argument, "table index out of range");
    copy_out(ts[static_cast<size_t>(index)].name, buf, buf_size);
  });
}

plab_status plab_result_table_csv(const plab_result* result, int index, char* buf,
                                  size_t buf_size, size_t* needed) {
  return guarded([&] {
    if (!result) fail(Errc::invalid_argument, "null result");
    const auto& ts = result->inner.tables;
    if (index < 0 || index >= static_cast<int>(ts.size()))
      fail(Errc::invalid_argument, "table index out of range");
    std::string csv = render_csv(ts[static_cast<size_t>(index)]);
    if (needed) *needed = csv.size() + 1;
    if (buf && buf_size > csv.size()) copy_out(csv, buf, buf_size);
  });
}

plab_status plab_result_write_csv(const plab_result* result, const char* dir) {
  return guarded([&] {
    if (!result || !dir) fail(Errc::invalid_argument, "null argument");
    export_result_csv(result->inner, dir);
  });
}

}  // extern "C"

namespace {

plab_status run_config(Config cfg, long long seed_override, int threads_override,
                       plab_result** out) {
  if (seed_override >= 0) {
    ConfigValue v;
    v.type = ConfigValue::Type::integer;
    v.i = seed_override;
    cfg.set("seed", v);
  }
  if (threads_override > 0) {
    ConfigValue v;
    v.type = ConfigValue::Type::integer;
    v.i = threads_override;
    cfg.set("threads", v);
  }
  auto result = std::make_unique<plab_result>();
  result->inner = run_experiment(cfg);
  *out = result.release();
  return PLAB_OK;
}

}  // namespace
