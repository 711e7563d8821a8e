#include <algorithm>
#include <cmath>
#include <numbers>

#include "experiments/registry_internal.hpp"

namespace predlab::experiments {

namespace {

// Independent minimax-redundancy search: shrinking grid over mixtures of the
// class rows (the optimum lies in their convex hull and the objective is
// convex there).
double minimax_hull_search(const std::vector<std::vector<double>>& rows, int rounds,
                           int grid) {
  size_t m = rows.size();
  size_t cells = rows.front().size();
  auto objective = [&](const std::vector<double>& lam) {
    std::vector<double> mix(cells, 0.0);
    for (size_t i = 0; i < m; ++i)
      for (size_t y = 0; y < cells; ++y) mix[y] += lam[i] * rows[i][y];
    double worst = -kPosInf;
    for (size_t i = 0; i < m; ++i) {
      double d = 0.0;
      for (size_t y = 0; y < cells; ++y) {
        if (rows[i][y] == 0.0) continue;
        if (mix[y] == 0.0) return kPosInf;
        d += rows[i][y] * std::log2(rows[i][y] / mix[y]);
      }
      worst = std::max(worst, d);
    }
    return worst;
  };

  std::vector<double> center(m, 1.0 / static_cast<double>(m));
  double width = 1.0;
  double best_val = objective(center);
  std::vector<double> pt(m);
  for (int round = 0; round < rounds; ++round) {
    std::vector<double> best_pt = center;
    std::function<void(size_t, double)> rec = [&](size_t i, double used) {
      if (i == m - 1) {
        double last = 1.0 - used;
        if (last < 0.0) return;
        pt[i] = last;
        double v = objective(pt);
        if (v < best_val) {
          best_val = v;
          best_pt = pt;
        }
        return;
      }
      double lo = std::max(0.0, center[i] - width);
      double hi = std::min(1.0, center[i] + width);
      for (int g = 0; g <= grid; ++g) {
        pt[i] = lo + (hi - lo) * g / grid;
        if (used + pt[i] > 1.0 + 1e-12) break;
        rec(i + 1, used + pt[i]);
      }
    };
    rec(0, 0.0);
    center = best_pt;
    width *= 0.55;
  }
  return best_val;
}

void run_capacity_minimax(const Config& cfg, ExperimentResult& res) {
  int n = static_cast<int>(cfg.get_int("params.n", 4));
  ModelClass c;
  c.label = "four-bernoulli";
  for (double p : {0.2, 0.4, 0.6, 0.8}) c.measures.push_back(make_bernoulli(p));

  CapacityResult cap = channel_capacity(c, n, 1e-11);
  // rebuild the rows for the independent search
  uint64_t cells = cell_count(c.alphabet(), n, 1u << 20);
  std::vector<std::vector<double>> rows(c.size(), std::vector<double>(static_cast<size_t>(cells)));
  for (size_t i = 0; i < c.size(); ++i)
    for (uint64_t code = 0; code < cells; ++code)
      rows[i][static_cast<size_t>(code)] =
          exp2_safe(c.measures[i]->log2_prob(word_from_code(code, n, 2)));
  double brute = minimax_hull_search(rows, 40, 8);

  Table& t = res.table("capacity", {"n", "capacity_bits", "iterations", "gap", "bruteforce"});
  t.add_row({n, cap.capacity_bits, cap.iterations, cap.gap, brute});
  res.check("solver-vs-bruteforce", std::abs(cap.capacity_bits - brute), 1e-3);
  res.check("solver-converged", cap.converged ? 0.0 : 1.0, 0.0);

  // degenerate cases
  ModelClass single;
  single.label = "singleton";
  single.measures.push_back(make_bernoulli(0.3));
  res.check("singleton-capacity-zero", channel_capacity(single, 3).capacity_bits, 0.0, 1e-12);
  ModelClass pair;
  pair.label = "disjoint";
  pair.measures.push_back(make_bernoulli(0.0));
  pair.measures.push_back(make_bernoulli(1.0));
  res.check("disjoint-diracs-capacity-one",
            std::abs(channel_capacity(pair, 1).capacity_bits - 1.0), 0.0, 1e-9);

  // grid capacity growth: C(n)/log2(n) stays bounded for the i.i.d. family
  ModelClass grid = build_bernoulli_grid(static_cast<int>(cfg.get_int("params.grid_r", 64)));
  Table& g = res.table("grid_growth", {"n", "capacity_bits", "ratio_to_log2n"});
  double worst_ratio = 0.0;
  for (int gn : {4, 16, 64}) {
    // count-space rows keep the growth check cheap at n = 64
    std::vector<std::vector<double>> crow(grid.size(),
                                          std::vector<double>(static_cast<size_t>(gn) + 1));
    for (size_t i = 0; i < grid.size(); ++i) {
      const auto* iid = dynamic_cast<const IidMeasure*>(grid.measures[i].get());
      double p0 = iid->probs()[0];
      for (int k = 0; k <= gn; ++k) {
        double lp = std::lgamma(gn + 1.0) - std::lgamma(k + 1.0) - std::lgamma(gn - k + 1.0);
        lp /= std::numbers::ln2;
        double mass = 0.0;  // guard the 0 * (-inf) corner at degenerate p0
        if (k < gn) mass += (gn - k) * safe_log2(p0);
        if (k > 0) mass += k * safe_log2(1.0 - p0);
        crow[i][static_cast<size_t>(k)] = exp2_safe(lp + mass);
      }
    }
    CapacityResult cg = channel_capacity_rows(crow, 1e-8, 200000);
    double ratio = cg.capacity_bits / std::log2(static_cast<double>(gn));
    worst_ratio = std::max(worst_ratio, ratio);
    g.add_row({gn, cg.capacity_bits, ratio});
    res.check("grid-capacity-positive:n=" + std::to_string(gn), 0.2, ratio);
  }
  res.check("grid-capacity-O(log-n)-ratio", worst_ratio, 1.0, 0.2);
}

ModelClass eight_markov_class() {
  Alphabet a{2};
  ModelClass c;
  c.label = "eight-markov";
  const double rows[8][2] = {{0.9, 0.2}, {0.8, 0.4}, {0.6, 0.3}, {0.5, 0.5},
                             {0.3, 0.7}, {0.2, 0.9}, {0.7, 0.6}, {0.4, 0.1}};
  for (int i = 0; i < 8; ++i)
    c.measures.push_back(
        make_markov(a, 1, {{rows[i][0], 1.0 - rows[i][0]}, {rows[i][1], 1.0 - rows[i][1]}},
                    std::nullopt, "chain" + std::to_string(i)));
  return c;
}

void run_capacity_bound(const Config& cfg, ExperimentResult& res) {
  int n_max = static_cast<int>(cfg.get_int("params.n_max", 10));
  ModelClass c = eight_markov_class();
  MeasurePtr rho_c = build_rho_capacity(c, n_max, 1e-10);

  Table& t = res.table("capacity", {"n", "capacity_bits", "iterations", "gap"});
  Table& b = res.table("bound", {"n", "capacity_bits", "worst_loss_bits", "bound_bits"});
  Table& pr = res.table("prior", {"n", "measure", "weight"});
  for (int n = 2; n <= n_max; ++n) {
    CapacityResult cap = channel_capacity(c, n, 1e-10);
    t.add_row({n, cap.capacity_bits, cap.iterations, cap.gap});
    for (size_t i = 0; i < c.size(); ++i)
      pr.add_row({n, c.measures[i]->label(), cap.prior[i]});
    double worst = -kPosInf;
    for (const auto& mu : c.measures)
      worst = std::max(worst, expected_cumulative_kl(*mu, *rho_c, n, Method::enumerate).bits);
    double bound = capacity_bound_bits(cap.capacity_bits, n);
    b.add_row({n, cap.capacity_bits, worst, bound});
    res.check("loss-within-capacity-bound:n=" + std::to_string(n), worst, bound, 1e-9);
  }

  // minimax floor at n = 4: no predictor beats the capacity value
  CapacityResult cap4 = channel_capacity(c, 4, 1e-11);
  uint64_t cells = cell_count(c.alphabet(), 4, 1u << 20);
  std::vector<std::vector<double>> rows(c.size(), std::vector<double>(static_cast<size_t>(cells)));
  for (size_t i = 0; i < c.size(); ++i)
    for (uint64_t code = 0; code < cells; ++code)
      rows[i][static_cast<size_t>(code)] =
          exp2_safe(c.measures[i]->log2_prob(word_from_code(code, 4, 2)));
  double brute = minimax_hull_search(rows, 16, 3);
  res.check("minimax-floor-at-n4", cap4.capacity_bits - 1e-3, brute);

  ModelClass single;
  single.label = "singleton";
  single.measures.push_back(c.measures[0]);
  MeasurePtr rho_single = build_rho_capacity(single, 6, 1e-10);
  double l6 = expected_cumulative_kl(*single.measures[0], *rho_single, 6, Method::enumerate).bits;
  res.check("singleton-bound", l6, capacity_bound_bits(0.0, 6), 1e-9);
}

void run_nml_negative(const Config& cfg, ExperimentResult& res) {
  (void)cfg;
  double v = nml_conditional_pathology();
  Table& t = res.table("pathology", {"quantity", "bits"});
  t.add_row({"d2(mu3(.|0), lambda(.|0))", v});
  res.check("pathology-equals-log2-3/4", std::abs(v - std::log2(0.75)), 0.0, 1e-12);
  res.check("pathology-is-negative", v, -0.4);

  ModelClass c = nml_negative_example_class();
  NmlTable t1 = nml_table(c, 1);
  NmlTable t2 = nml_table(c, 2);
  res.check("lambda1-uniform", std::abs(exp2_safe(t1.log2_lambda(0)) - 0.5), 0.0, 1e-12);
  res.check("lambda2-one-third",
            std::abs(exp2_safe(t2.log2_lambda(word_code(seq_from_string("00"), 2))) - 1.0 / 3.0),
            0.0, 1e-12);
  Table& dump = res.table("table", {"x", "c_x", "lambda"}, "class=" + c.label + " n=2");
  for (uint64_t code = 0; code < 4; ++code)
    dump.add_row({seq_to_string(word_from_code(code, 2, 2)),
                  exp2_safe(t2.log2_cx[static_cast<size_t>(code)]),
                  exp2_safe(t2.log2_lambda(code))});

  // degenerate class: single measure, NML is the measure itself
  ModelClass single;
  single.label = "one";
  single.measures.push_back(make_bernoulli(0.3));
  NmlTable ts = nml_table(single, 3);
  res.check("singleton-normalizer-1", std::abs(ts.log2_cn), 0.0, 1e-12);
}

void run_nml_bound(const Config& cfg, ExperimentResult& res) {
  std::vector<int64_t> ns = cfg.get_int_list("params.horizons", std::vector<int64_t>{64, 256});
  std::vector<double> ps =
      cfg.get_real_list("params.p_values", std::vector<double>{0.1, 0.3, 0.5, 0.7, 0.9});
  int extra = static_cast<int>(cfg.get_int("params.extra_components", 256));

  Table& series = res.table("cn_series", {"n", "c_n"});
  for (int n = 1; n <= 12; ++n) series.add_row({n, exp2_safe(bernoulli_log2_cn(n))});

  Table& t = res.table("bound", {"p1", "n", "loss_per_step", "bound_per_step", "log2_cn"});
  for (int64_t n64 : ns) {
    int n = static_cast<int>(n64);
    double lcn = bernoulli_log2_cn(n);
    res.check("cn-below-n-plus-1:n=" + std::to_string(n), exp2_safe(lcn),
              static_cast<double>(n) + 1.0, 1e-9);
    double bound = rho_c_bound_bits(lcn, n) / n;
    for (double p : ps) {
      double loss = bernoulli_rho_c_loss(p, n, n + extra) / n;
      t.add_row({p, n, loss, bound, lcn});
      res.check("mixture-patch-bound:p=" + format_double(p) + ",n=" + std::to_string(n), loss,
                bound, 1e-12);
    }
  }

  // all-Diracs class: log2 c_n = n, the bound degenerates to >= 1 bit/step
  int nd = 8;
  ModelClass diracs;
  diracs.label = "all-diracs";
  for (uint64_t code = 0; code < (1u << nd); ++code)
    diracs.measures.push_back(make_dirac(Alphabet{2}, word_from_code(code, nd, 2), 0));
  NmlTable td = nml_table(diracs, nd);
  res.check("all-diracs-log2cn-equals-n", std::abs(td.log2_cn - nd), 0.0, 1e-9);
  res.check("all-diracs-bound-degenerate", 1.0, rho_c_bound_bits(td.log2_cn, nd) / nd);
}

ModelClass cover_scenario_class(int r) {
  ModelClass c = build_bernoulli_grid(r);
  c.label = "bernoulli_grid+diracs";
  Alphabet a{2};
  c.measures.push_back(make_dirac(a, Seq{}, 0));                      // all zeros
  c.measures.push_back(make_dirac(a, Seq{}, 1));                      // all ones
  c.measures.push_back(make_dirac_repeat(a, seq_from_string("01")));  // alternation
  c.measures.push_back(make_dirac_repeat(a, seq_from_string("0011")));
  return c;
}

void run_cover_certify(const Config& cfg, ExperimentResult& res) {
  std::vector<int64_t> hs = cfg.get_int_list("params.horizons", std::vector<int64_t>{8, 12});
  int r = static_cast<int>(cfg.get_int("params.grid_r", 8));
  ModelClass c = cover_scenario_class(r);
  std::vector<int> horizons(hs.begin(), hs.end());
  CoverResult cover = build_cover(c, make_bernoulli(0.5), horizons);

  Table& sel = res.table("selections", {"n", "k", "i", "l", "selected_measure", "m_l"});
  for (const auto& s : cover.selections)
    sel.add_row({s.n, s.k, s.band, s.order, c.measures[s.measure_index]->label(), s.rho_mass});

  Table& cert = res.table("certification", {"mu", "n", "slack", "bound", "verdict"});
  for (size_t i = 0; i < c.size(); ++i) {
    for (int n : horizons) {
      CoverCertification row = certify_bound(cover, i, n);
      cert.add_row({c.measures[i]->label(), n, row.slack, row.bound,
                    std::string(row.pass ? "pass" : "fail")});
      res.check("slack-within-bound:" + c.measures[i]->label() + ",n=" + std::to_string(n),
                row.slack, row.bound, 1e-9);
    }
  }
  res.check("total-prior-mass-at-most-1", cover.total_weight, 1.0, 1e-12);
}

}  // namespace

void register_nml_capacity(std::vector<ExperimentDef>& out) {
  out.push_back({"nml-negative",
                 "two-step class where the conditional NML estimate under-shoots a member",
                 "negative-Ln-example",
                 "experiment = nml-negative\n",
                 run_nml_negative});
  out.push_back({"nml-bound",
                 "mixture patch of horizon-wise NML tables meets its loss guarantee",
                 "th:ml",
                 "experiment = nml-bound\n[params]\nhorizons = [64, 256]\n"
                 "p_values = [0.1, 0.3, 0.5, 0.7, 0.9]\nextra_components = 256\n",
                 run_nml_bound});
  out.push_back({"capacity-minimax",
                 "alternating-maximization capacity against an independent hull search",
                 "eq:cc",
                 "experiment = capacity-minimax\n[params]\nn = 4\ngrid_r = 64\n",
                 run_capacity_minimax});
  out.push_back({"capacity-bound",
                 "horizon-wise optimal barycentre mixture meets the capacity loss bound",
                 "th:cc",
                 "experiment = capacity-bound\n[params]\nn_max = 10\n",
                 run_capacity_bound});
  out.push_back({"cover-certify",
                 "greedy band cover of a grid-plus-diracs class, slack against the bound",
                 "th:main",
                 "experiment = cover-certify\n[params]\nhorizons = [8, 12]\ngrid_r = 8\n",
                 run_cover_certify});
}

}  // namespace predlab::experiments
