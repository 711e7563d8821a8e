// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Each criterion drives the experiment registry with a pinned configuration
// and verifies every verdict plus the stated runtime budget.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "core/experiments.hpp"

using namespace predlab;

namespace {

int g_failed = 0;

struct CriterionOutcome {
  bool pass = true;
  std::string detail;
};

void report(int index, const std::string& name, const CriterionOutcome& out, double seconds,
            double budget) {
  bool pass = out.pass && seconds <= budget;
  if (!pass) ++g_failed;
  std::printf("[%s] criterion %2d: %-58s %6.2fs (budget %.0fs)%s%s\n", pass ? "PASS" : "FAIL",
              index, name.c_str(), seconds, budget, out.detail.empty() ? "" : " :: ",
              out.detail.c_str());
  std::fflush(stdout);
}

CriterionOutcome run_checked(const std::string& config_text) {
  CriterionOutcome out;
  try {
    ExperimentResult res = run_experiment(Config::parse(config_text));
    int failed = 0;
    for (const auto& v : res.verdicts) {
      if (!v.pass) {
        ++failed;
        if (out.detail.empty())
          out.detail = v.check_id + " lhs=" + format_double(v.lhs) +
                       " rhs=" + format_double(v.rhs);
      }
    }
    out.pass = failed == 0;
    if (failed > 0) out.detail += " (" + std::to_string(failed) + " checks failed)";
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = e.what();
  }
  return out;
}

template <class F>
void criterion(int index, const std::string& name, double budget_seconds, F&& body) {
  auto t0 = std::chrono::steady_clock::now();
  CriterionOutcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(index, name, out, secs, budget_seconds);
}

}  // namespace

int main() {
  criterion(1, "mixture bound holds pathwise, exhaustive and sampled", 10.0, [] {
    return run_checked(
        "experiment = mixture-bound\nseed = 1\n[params]\nexhaustive_n = 10\n"
        "sample_n = 1000\nsamples = 1000\n");
  });

  criterion(2, "adversarial search forces one bit per step up to n = 20", 1.0, [] {
    return run_checked("experiment = disc-adversarial\n[params]\nn = 20\nexhaustive_n = 16\n");
  });

  criterion(3, "NML conditional pathology equals log2(3/4)", 1.0, [] {
    return run_checked("experiment = nml-negative\n");
  });

  criterion(4, "NML mixture patch meets its bound at n = 64, 256", 30.0, [] {
    return run_checked(
        "experiment = nml-bound\n[params]\nhorizons = [64, 256]\n"
        "p_values = [0.1, 0.3, 0.5, 0.7, 0.9]\nextra_components = 256\n");
  });

  criterion(5, "capacity solver vs brute force; barycentre mixture bound", 60.0, [] {
    CriterionOutcome a = run_checked("experiment = capacity-minimax\n[params]\nn = 4\n");
    CriterionOutcome b = run_checked("experiment = capacity-bound\n[params]\nn_max = 10\n");
    CriterionOutcome out;
    out.pass = a.pass && b.pass;
    out.detail = a.detail + b.detail;
    return out;
  });

  criterion(6, "cover certification at n = 8, 12 for grid plus diracs", 60.0, [] {
    return run_checked("experiment = cover-certify\n[params]\nhorizons = [8, 12]\ngrid_r = 8\n");
  });

  criterion(7, "telescoping-prior mixture suffers the counting regret at n = 12", 10.0, [] {
    return run_checked("experiment = lb-regret\n[params]\nn = 12\ndepth = 16\n");
  });

  criterion(8, "uniform-prior combination vs tripartite predictor gap", 300.0, [] {
    return run_checked(
        "experiment = bayes-suboptimal\nseed = 1\n[params]\np = 0.3\nn = 2000\n"
        "support = 200\nseeds = 50\nsmooth = true\n");
  });

  criterion(9, "upward-walk chain bound, exact forward evaluation", 30.0, [] {
    return run_checked(
        "experiment = stno-chain\nseed = 17\n[params]\npaths = 5\nhorizons = [5, 10, 20, 30]\n");
  });

  criterion(10, "reset-walk chain rate within 3 bits at n = 30", 5.0, [] {
    return run_checked("experiment = stno1-rate\nseed = 23\n[params]\nn = 30\n");
  });

  criterion(11, "add-one dominance with 1/(n+1) coefficients, 101-point grid", 30.0, [] {
    return run_checked("experiment = laplace-dominance\n[params]\nhorizon = 12\ngrid = 100\n");
  });

  criterion(12, "no Pinsker violations over 10^4 sampled steps", 5.0, [] {
    return run_checked("experiment = pinsker-sweep\nseed = 3\n[params]\nsteps = 10000\n");
  });

  criterion(13, "contamination table: safe in expectation, fatal per step", 60.0, [] {
    return run_checked(
        "experiment = contamination-table\nseed = 29\n[params]\nnosum_k = 4\n"
        "avad_n = 2000\navad_paths = 20\n");
  });

  criterion(14, "weight tails: n-1 exactly vs 2 log2 n + 1", 1.0, [] {
    return run_checked("experiment = weights-matter\n[params]\nn = 100\nk_max = 10000\n");
  });

  criterion(15, "every experiment reproduces byte-identical CSV tables", 300.0, [] {
    CriterionOutcome out;
    for (const auto& def : experiment_registry()) {
      Config cfg = Config::parse(def.example_config);
      ExperimentResult a = run_experiment(cfg);
      ExperimentResult b = run_experiment(cfg);
      if (a.tables.size() != b.tables.size()) {
        out.pass = false;
        out.detail = def.id + ": table count differs";
        break;
      }
      for (size_t i = 0; i < a.tables.size(); ++i) {
        if (render_csv(a.tables[i]) != render_csv(b.tables[i])) {
          out.pass = false;
          out.detail = def.id + ": table " + a.tables[i].name + " is not reproducible";
          return out;
        }
      }
      if (!a.passed()) {
        out.pass = false;
        out.detail = def.id + ": default config does not pass";
        return out;
      }
    }
    return out;
  });

  std::printf("%s: %d criterion(s) failed\n", g_failed == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              g_failed);
  return g_failed == 0 ? 0 : 1;
}
