#include <algorithm>
#include <cmath>
#include <numbers>

#include "experiments/registry_internal.hpp"

namespace predlab::experiments {

namespace {

std::vector<std::shared_ptr<MixturePredictor>> mixture_battery() {
  std::vector<std::shared_ptr<MixturePredictor>> out;
  out.push_back(MixturePredictor::over(build_bernoulli_grid(10).measures,
                                       WeightScheme::quadratic(), "grid10-quadratic"));
  Alphabet a{2};
  out.push_back(MixturePredictor::over(
      {make_dirac(a, seq_from_string("0"), 0), make_dirac(a, seq_from_string("1"), 1),
       make_bernoulli(0.5)},
      WeightScheme::telescoping(), "diracs-telescoping"));
  out.push_back(MixturePredictor::over_class(build_markov_grid(1, 2), WeightScheme::custom({})));
  out.push_back(MixturePredictor::over(
      {make_laplace(), make_kt(), make_bernoulli(0.3), make_bernoulli(0.9)},
      WeightScheme::main_theorem(), "estimators-main"));
  return out;
}

void run_mixture_bound(const Config& cfg, ExperimentResult& res) {
  int n_exh = static_cast<int>(cfg.get_int("params.exhaustive_n", 10));
  int n_sample = static_cast<int>(cfg.get_int("params.sample_n", 1000));
  int samples = static_cast<int>(cfg.get_int("params.samples", 1000));
  uint64_t seed = static_cast<uint64_t>(cfg.get_int("seed", 1));

  auto mixtures = mixture_battery();
  Table& t = res.table("excess", {"mixture", "mode", "max_excess_bits"});
  double worst = -kPosInf;
  for (const auto& mix : mixtures) {
    double excess = -kPosInf;
    for (int n = 1; n <= n_exh; ++n) {
      uint64_t cells = cell_count(mix->alphabet(), n, 1u << 22);
      for (uint64_t code = 0; code < cells; ++code) {
        Seq x = word_from_code(code, n, mix->alphabet().size);
        double lmix = mix->log2_prob(x);
        for (size_t k = 0; k < mix->size(); ++k) {
          double lmu = mix->component(k)->log2_prob(x);
          if (lmu == kNegInf) continue;
          excess = std::max(excess, (-lmix + lmu) - (-mix->log2_prior(k)));
        }
      }
    }
    t.add_row({mix->label(), "exhaustive", excess});
    worst = std::max(worst, excess);
  }
  // sampled long-horizon check on the first mixture
  const auto& mix = *mixtures.front();
  double excess = -kPosInf;
  for (int s = 0; s < samples; ++s) {
    RngStream rng = RngStream::derive(seed, static_cast<uint64_t>(s));
    size_t src = static_cast<size_t>(rng.next_u64() % (mix.size() + 1));
    Seq x = src < mix.size() ? sample(*mix.component(src), n_sample, rng)
                             : sample(*make_bernoulli(0.5), n_sample, rng);
    double lmix = mix.log2_prob(x);
    for (size_t k = 0; k < mix.size(); ++k) {
      double lmu = mix.component(k)->log2_prob(x);
      if (lmu == kNegInf) continue;
      excess = std::max(excess, (-lmix + lmu) - (-mix.log2_prior(k)));
    }
  }
  t.add_row({mix.label(), "sampled", excess});
  worst = std::max(worst, excess);
  res.check("pathwise-regret-never-exceeds-log-inverse-weight", worst, 0.0, 1e-9);
}

void run_disc_adversarial(const Config& cfg, ExperimentResult& res) {
  int n = static_cast<int>(cfg.get_int("params.n", 20));
  int n_exhaustive = static_cast<int>(cfg.get_int("params.exhaustive_n", 16));
  std::vector<MeasurePtr> predictors = {
      make_laplace(), make_kt(), make_bernoulli(0.3),
      MixturePredictor::over(build_bernoulli_grid(6).measures, WeightScheme::quadratic(),
                             "grid6"),
      make_tracking_measure(seq_from_string("0110100110010110"), 0)};
  Table& t = res.table("adversarial", {"predictor", "n", "pathwise_loss_bits", "min_margin"});
  for (const auto& rho : predictors) {
    Seq x = adversarial_sequence(*rho, n);
    double final_loss = 0.0, min_margin = kPosInf;
    for (int m = 1; m <= n; ++m) {
      double loss = -rho->log2_prob(SeqView(x.data(), static_cast<size_t>(m)));
      min_margin = std::min(min_margin, loss - m);
      if (m == n) final_loss = loss;
    }
    t.add_row({rho->label(), n, final_loss, min_margin});
    res.check("greedy-floor:" + rho->label(), 0.0, min_margin, 1e-9);
  }
  // exhaustive minimum over X^n for one predictor: some cell has mass <= 2^-n
  MeasurePtr rho = predictors.back();
  double lmin = kPosInf;
  uint64_t cells = cell_count(rho->alphabet(), n_exhaustive, 1u << 22);
  for (uint64_t code = 0; code < cells; ++code)
    lmin = std::min(lmin, rho->log2_prob(word_from_code(code, n_exhaustive, 2)));
  res.check("exhaustive-min-cell", lmin, -static_cast<double>(n_exhaustive), 1e-9);
}

void run_middle_case(const Config& cfg, ExperimentResult& res) {
  int n = static_cast<int>(cfg.get_int("params.n", 64));
  int n_adv = static_cast<int>(cfg.get_int("params.adversarial_n", 16));
  uint64_t seed = static_cast<uint64_t>(cfg.get_int("seed", 7));
  RngStream rng(seed);
  Seq t(static_cast<size_t>(n));
  for (auto& b : t) b = rng.next_unit() < 0.5 ? 0 : 1;
  MeasurePtr gamma = make_tracking_measure(t, 0);

  // on its own target the per-step loss is exactly log2(3/2)
  double per_step = -gamma->log2_prob(t) / n;
  res.check("target-loss-equals-log2-3/2", std::abs(per_step - std::log2(1.5)), 0.0, 1e-12);

  // no predictor in the family escapes the 1-bit floor on some sequence
  double lmin = kPosInf;
  uint64_t cells = cell_count(Alphabet{2}, n_adv, 1u << 22);
  for (uint64_t code = 0; code < cells; ++code)
    lmin = std::min(lmin, gamma->log2_prob(word_from_code(code, n_adv, 2)));
  double forced = -lmin / n_adv;
  res.check("adversarial-per-step-floor", 1.0, forced, 1e-9);
  res.check("floor-exceeds-tracking-loss", std::log2(1.5), forced, 1e-9);
  Table& tab = res.table("values", {"quantity", "bits"});
  tab.add_row({"per_step_on_target", per_step});
  tab.add_row({"forced_per_step", forced});
}

void run_weights_matter(const Config& cfg, ExperimentResult& res) {
  int n = static_cast<int>(cfg.get_int("params.n", 100));
  int k_max = static_cast<int>(cfg.get_int("params.k_max", 10000));
  WeightsMatterResult r = weights_matter(n, k_max);
  Table& t = res.table("losses", {"weights", "loss_bits", "direct_bits"});
  t.add_row({"quadratic", r.loss_quadratic, r.direct_quadratic});
  t.add_row({"geometric", r.loss_geometric, r.direct_geometric});
  res.check("geometric-equals-n-minus-1",
            std::abs(r.loss_geometric - static_cast<double>(n - 1)), 0.0, 1e-9);
  res.check("quadratic-below-2log2n-plus-1", r.loss_quadratic,
            2.0 * std::log2(static_cast<double>(n)) + 1.0);
  res.check("mixture-matches-direct-sum",
            std::max(std::abs(r.loss_quadratic - r.direct_quadratic),
                     std::abs(r.loss_geometric - r.direct_geometric)),
            0.0, 1e-9);
}

void run_pinsker_sweep(const Config& cfg, ExperimentResult& res) {
  int steps_target = static_cast<int>(cfg.get_int("params.steps", 10000));
  uint64_t seed = static_cast<uint64_t>(cfg.get_int("seed", 3));
  int violations = 0;
  int steps_done = 0;
  int pair = 0;
  double worst_margin = kPosInf;
  while (steps_done < steps_target) {
    RngStream rng = RngStream::derive(seed, static_cast<uint64_t>(pair++));
    auto random_iid = [&](const char* name) -> MeasurePtr {
      double p = 0.02 + 0.96 * rng.next_unit();
      return std::make_shared<IidMeasure>(Alphabet{2}, std::vector<double>{p, 1.0 - p}, name);
    };
    MeasurePtr mu, rho;
    switch (pair % 3) {
      case 0:
        mu = random_iid("mu");
        rho = random_iid("rho");
        break;
      case 1:
        mu = random_iid("mu");
        rho = make_laplace();
        break;
      default: {
        mu = std::make_shared<MixturePredictor>(
            std::vector<MeasurePtr>{random_iid("a"), random_iid("b")},
            std::vector<double>{-1.0, -1.0}, "mu-mix");
        rho = make_kt();
        break;
      }
    }
    int n = 32;
    Seq x = sample(*mu, n, rng);
    LossReport rep = trace_path(*mu, *rho, x);
    PinskerVerdict v = pinsker_check(rep);
    if (!v.pass) ++violations;
    for (size_t i = 0; i < rep.delta.size(); ++i)
      if (rep.delta[i] < kPosInf)
        worst_margin =
            std::min(worst_margin, 2.0 * std::numbers::ln2 * rep.delta[i] - rep.a[i] * rep.a[i]);
    steps_done += n;
  }
  Table& t = res.table("summary", {"steps", "violations", "min_margin"});
  t.add_row({steps_done, violations, worst_margin});
  res.check("zero-violations", static_cast<double>(violations), 0.0);
}

void run_tv_monotone(const Config& cfg, ExperimentResult& res) {
  uint64_t seed = static_cast<uint64_t>(cfg.get_int("seed", 5));
  int seeds = static_cast<int>(cfg.get_int("params.seeds", 50));
  MeasurePtr b5 = make_bernoulli(0.5), b1 = make_bernoulli(0.1);
  Table& t = res.table("singular", {"m", "tv"});
  double prev = -1.0;
  bool increasing = true;
  for (int m : {1, 5, 10, 15}) {
    TVReport r = tv_conditional(*b5, *b1, {}, m);
    t.add_row({m, r.value});
    if (r.value <= prev + 1e-12) increasing = false;
    prev = r.value;
  }
  res.check("singular-pair-tv-strictly-increasing", increasing ? 0.0 : 1.0, 0.0);
  res.check("tv-at-15-near-1", 0.9, prev);

  // dominated pair: data from mu, rho = (mu + chi)/2; v_m medians nonincreasing
  MeasurePtr mu = make_bernoulli(0.3), chi = make_bernoulli(0.8);
  auto rho = std::make_shared<MixturePredictor>(std::vector<MeasurePtr>{mu, chi},
                                                std::vector<double>{-1.0, -1.0}, "half-mix");
  std::vector<int> horizons = {10, 100, 1000};
  std::vector<double> medians;
  Table& t2 = res.table("dominated", {"n", "median_tv"});
  for (int n : horizons) {
    std::vector<double> vals;
    for (int s = 0; s < seeds; ++s) {
      RngStream rng = RngStream::derive(seed, static_cast<uint64_t>(s) * 7919 + n);
      Seq x = sample(*mu, n, rng);
      vals.push_back(tv_conditional(*mu, *rho, x, 8).value);
    }
    std::sort(vals.begin(), vals.end());
    medians.push_back(vals[vals.size() / 2]);
    t2.add_row({n, medians.back()});
  }
  bool nonincreasing = true;
  for (size_t i = 1; i < medians.size(); ++i)
    if (medians[i] > medians[i - 1] + 1e-12) nonincreasing = false;
  res.check("dominated-pair-tv-median-nonincreasing", nonincreasing ? 0.0 : 1.0, 0.0);
}

void run_dinf_markov(const Config& cfg, ExperimentResult& res) {
  (void)cfg;
  Alphabet a{2};
  const int k = 1;
  auto m1 = std::dynamic_pointer_cast<const MarkovMeasure>(
      make_markov(a, k, {{0.9, 0.1}, {0.2, 0.8}}));
  auto m2 = std::dynamic_pointer_cast<const MarkovMeasure>(
      make_markov(a, k, {{0.7, 0.3}, {0.4, 0.6}}));
  // telescoped context bound: |log ratio of a path| splits into the head
  // ratio plus one conditional ratio per later step
  double r_trans = 0.0;
  for (size_t ctx = 0; ctx < m1->rows().size(); ++ctx)
    for (int s = 0; s < 2; ++s)
      r_trans = std::max(r_trans, std::abs(std::log2(m1->rows()[ctx][static_cast<size_t>(s)] /
                                                     m2->rows()[ctx][static_cast<size_t>(s)])));
  double c_init = 0.0;
  for (uint64_t code = 0; code < 2; ++code) {
    Seq w = word_from_code(code, k, 2);
    c_init = std::max(c_init, std::abs(m1->log2_prob(w) - m2->log2_prob(w)));
  }
  Table& t = res.table("dinf", {"n", "dinf", "context_bound"});
  for (int n : {4, 8, 12}) {
    DinfReport r = d_inf(*m1, *m2, n);
    double bound = (c_init + (n - k) * r_trans) / n;
    t.add_row({n, r.value, bound});
    res.check("dinf-below-context-bound:n=" + std::to_string(n), r.value, bound, 1e-9);
  }
  DinfReport same = d_inf(*m1, *m1, 8);
  res.check("identical-measures-dinf-zero", same.value, 0.0, 1e-12);
  DinfReport div = d_inf(*make_dirac(a, seq_from_string("0000"), 1),
                         *make_dirac(a, Seq{}, 0), 8);
  res.check("dirac-divergence-flagged", div.infinite ? 0.0 : 1.0, 0.0);
}

void run_markov_entropy(const Config& cfg, ExperimentResult& res) {
  uint64_t seed = static_cast<uint64_t>(cfg.get_int("seed", 11));
  int n_mc = static_cast<int>(cfg.get_int("params.mc_n", 100000));
  int n_grid = static_cast<int>(cfg.get_int("params.grid_n", 10000));
  Alphabet a{2};

  auto chain = std::dynamic_pointer_cast<const MarkovMeasure>(
      make_markov(a, 1, {{0.9, 0.1}, {0.2, 0.8}}));
  double h1 = entropy_rate(*chain, 1);
  RngStream rng(seed);
  Seq x = sample(*chain, n_mc, rng);
  double mc = -chain->log2_prob(x) / n_mc;
  res.check("h1-matches-own-sample-logloss", std::abs(h1 - mc), 0.01);

  // h_k nonincreasing in k
  bool monotone = true;
  double prev = entropy_rate(*chain, 0);
  Table& t = res.table("entropy", {"k", "h_k"});
  t.add_row({0, prev});
  for (int k = 1; k <= 3; ++k) {
    double hk = entropy_rate(*chain, k);
    t.add_row({k, hk});
    if (hk > prev + 1e-12) monotone = false;
    prev = hk;
  }
  res.check("h_k-nonincreasing", monotone ? 0.0 : 1.0, 0.0);
  auto fair = std::dynamic_pointer_cast<const MarkovMeasure>(make_markov(a, 0, {{0.5, 0.5}}));
  res.check("fair-coin-h0-is-1", std::abs(entropy_rate(*fair, 0) - 1.0), 0.0, 1e-12);

  // grid mixture tracks the conditional entropy of an off-grid order-2 source
  auto source = std::dynamic_pointer_cast<const MarkovMeasure>(make_markov(
      a, 2, {{0.87, 0.13}, {0.23, 0.77}, {0.51, 0.49}, {0.34, 0.66}}, std::nullopt, "source2"));
  double h2 = entropy_rate(*source, 2);
  ModelClass grid = build_markov_grid(2, 20);
  RngStream rng2 = RngStream::derive(seed, 1);
  Seq path = sample(*source, n_grid, rng2);
  // pathwise mixture log-loss via transition-count sufficient statistics
  std::vector<CountMatrix> counts;
  for (int k = 0; k <= 2; ++k) counts.push_back(markov_transition_counts(path, a, k));
  double lmix = kNegInf;
  for (size_t i = 0; i < grid.size(); ++i) {
    const auto* m = dynamic_cast<const MarkovMeasure*>(grid.measures[i].get());
    SeqView head(path.data(), static_cast<size_t>(m->order()));
    double lj = m->log2_prob_counts(head, counts[static_cast<size_t>(m->order())]);
    if (lj == kNegInf) continue;
    lmix = log2_add(lmix, grid.intended_log2_weights[i] + lj);
  }
  double rate = -lmix / n_grid;
  Table& t2 = res.table("grid", {"n", "pathwise_rate", "h2"});
  t2.add_row({n_grid, rate, h2});
  res.check("grid-mixture-rate-near-h2", std::abs(rate - h2), 0.05);
}

}  // namespace

void register_core(std::vector<ExperimentDef>& out) {
  out.push_back({"mixture-bound",
                 "pathwise mixture regret never exceeds -log2 of the component weight",
                 "eq:tric",
                 "experiment = mixture-bound\nseed = 1\n[params]\nexhaustive_n = 10\n"
                 "sample_n = 1000\nsamples = 1000\n",
                 run_mixture_bound});
  out.push_back({"disc-adversarial",
                 "greedy adversarial sequences force one bit per step on any predictor",
                 "th:disc",
                 "experiment = disc-adversarial\n[params]\nn = 20\nexhaustive_n = 16\n",
                 run_disc_adversarial});
  out.push_back({"middle-case",
                 "tracking family is solvable in the middle sense but defeats regret",
                 "th:comp",
                 "experiment = middle-case\nseed = 7\n[params]\nn = 64\nadversarial_n = 16\n",
                 run_middle_case});
  out.push_back({"weights-matter",
                 "quadratic vs geometric tails on eventually-one targets",
                 "weights-matter",
                 "experiment = weights-matter\n[params]\nn = 100\nk_max = 10000\n",
                 run_weights_matter});
  out.push_back({"pinsker-sweep",
                 "absolute distance squared stays below 2 ln2 times the KL step",
                 "th:da",
                 "experiment = pinsker-sweep\nseed = 3\n[params]\nsteps = 10000\n",
                 run_pinsker_sweep});
  out.push_back({"tv-monotone",
                 "cylinder TV grows on singular pairs, shrinks along dominated data",
                 "th:bd",
                 "experiment = tv-monotone\nseed = 5\n[params]\nseeds = 50\n",
                 run_tv_monotone});
  out.push_back({"dinf-markov",
                 "finite-horizon sup log-ratio distance against the context bound",
                 "eq:m3",
                 "experiment = dinf-markov\n",
                 run_dinf_markov});
  out.push_back({"markov-entropy",
                 "conditional entropies, their monotonicity, and the grid mixture rate",
                 "eq:must",
                 "experiment = markov-entropy\nseed = 11\n[params]\nmc_n = 100000\n"
                 "grid_n = 10000\n",
                 run_markov_entropy});
}

}  // namespace predlab::experiments
