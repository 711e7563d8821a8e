#include "core/adversarial.hpp"

#include <algorithm>
#include <cmath>

namespace predlab {

Seq adversarial_sequence(const ProcessMeasure& rho, int n) {
  Seq x;
  x.reserve(static_cast<size_t>(n));
  auto st = rho.start();
  for (int t = 0; t < n; ++t) {
    std::vector<double> c = st->conditional();
    Symbol worst = 0;
    for (int s = 1; s < rho.alphabet().size; ++s)
      if (c[static_cast<size_t>(s)] < c[static_cast<size_t>(worst)]) worst = s;
    x.push_back(worst);
    st->advance(worst);
  }
  return x;
}

// --- lower-bound search -------------------------------------------------------

namespace {
// enumeration index of the eventually-zero sequence with last 1 at position k
// and first k-1 bits encoding `pattern` (0 <= pattern < 2^{k-1})
long lb_index(int k, uint64_t pattern) {
  return (1L << (k - 1)) + 1 + static_cast<long>(pattern);
}
double telescoping_weight(long i) { return 1.0 / (static_cast<double>(i) * (i + 1.0)); }
}  // namespace

LbSearchResult lb_search(int n, long depth) {
  if (n < 2 || depth < n + 1 || depth > 40)
    fail(Errc::invalid_argument, "lb_search: need 2 <= n < depth <= 40");
  LbSearchResult out;
  out.n = n;
  out.depth = depth;
  long last_index = lb_index(static_cast<int>(depth), (1UL << (depth - 1)) - 1);
  out.prior_tail = 1.0 / (static_cast<double>(last_index) + 1.0);
  // mass on sequences that are 0 from position n on: indices 1 .. 2^{n-1}
  long s_last = 1L << (n - 1);
  out.w_s = 1.0 - 1.0 / (static_cast<double>(s_last) + 1.0);
  out.claim_log2 = -static_cast<double>(n) + std::log2(1.0 - out.w_s);

  // nu(x_{1..n}) for x with x_n = 1: contributions from components whose
  // sequence extends x, i.e. last 1 at k = n (one term) or k > n.
  double best = kPosInf;
  uint64_t best_bits = 0;
  for (uint64_t bits = 0; bits < (1ULL << (n - 1)); ++bits) {
    double mass = telescoping_weight(lb_index(n, bits));
    for (int k = n + 1; k <= depth; ++k) {
      // first k-1 bits: x's n bits (ending in 1) then k-1-n free bits
      uint64_t free_count = static_cast<uint64_t>(1) << (k - 1 - n);
      uint64_t base = ((bits << 1) | 1ULL) << (k - 1 - n);
      for (uint64_t f = 0; f < free_count; ++f)
        mass += telescoping_weight(lb_index(k, base | f));
    }
    double l = std::log2(mass);
    if (l < best) {
      best = l;
      best_bits = bits;
    }
  }
  out.nu_min_log2 = best;
  out.argmin = word_from_code((best_bits << 1) | 1ULL, n, 2);
  out.regret = -best - static_cast<double>(n);  // L_n(mu, rho_fair) = n exactly
  out.regret_floor = -std::log2(1.0 - out.w_s);
  out.pass = best <= out.claim_log2 + 1e-12 && out.regret >= out.regret_floor - 1e-9;
  return out;
}

// --- middle-case tracking measure ----------------------------------------------

namespace {
class TrackingMeasure : public ProcessMeasure {
 public:
  TrackingMeasure(Seq pattern, Symbol tail)
      : ProcessMeasure(Alphabet{2}, "tracking(" + seq_to_string(pattern) + "|" +
                                        std::to_string(tail) + ")"),
        pattern_(std::move(pattern)),
        tail_(tail) {}

  Symbol target(size_t t) const { return t < pattern_.size() ? pattern_[t] : tail_; }

  std::vector<double> conditional(SeqView prefix) const override {
    bool on_path = true;
    for (size_t t = 0; t < prefix.size() && on_path; ++t) on_path = prefix[t] == target(t);
    if (!on_path) return {0.5, 0.5};
    std::vector<double> c(2, 1.0 / 3.0);
    c[static_cast<size_t>(target(prefix.size()))] = 2.0 / 3.0;
    return c;
  }

 private:
  Seq pattern_;
  Symbol tail_;
};
}  // namespace

MeasurePtr make_tracking_measure(Seq target_pattern, Symbol tail) {
  return std::make_shared<TrackingMeasure>(std::move(target_pattern), tail);
}

// --- suboptimal-Bayes construction ---------------------------------------------

MeasurePtr make_binary_in_ternary(double p1) {
  return std::make_shared<IidMeasure>(Alphabet{3}, std::vector<double>{1.0 - p1, p1, 0.0},
                                      "beta(" + std::to_string(p1) + ")");
}

namespace {
// Sum over all finite words a of w_a * Dirac(a then all 2s),
// w_a = 2^{-(|a|+1)} 3^{-|a|}. On a 2-free prefix of length m the joint mass
// telescopes to 6^{-m}; after the first 2 every further symbol must be 2.
class AllTwosClosure : public ProcessMeasure {
 public:
  AllTwosClosure() : ProcessMeasure(Alphabet{3}, "all_twos_closure") {}

  // With f the 2-free head length: words a = head . 2^(k-f) for k in [f, m]
  // contribute 2^-(k+1) 3^-k each, and words longer than m that extend the
  // whole prefix contribute 3^-m 2^-(m+1) in total. For a 2-free prefix this
  // telescopes to 6^-m.
  double log2_joint(SeqView x) const {
    size_t m = x.size();
    size_t first_two = m;
    for (size_t t = 0; t < m; ++t) {
      if (x[t] == 2) {
        first_two = t;
        break;
      }
    }
    for (size_t t = first_two; t < m; ++t)
      if (x[t] != 2) return kNegInf;
    double acc = kNegInf;
    for (size_t k = first_two; k <= m; ++k)
      acc = log2_add(acc, -(static_cast<double>(k) + 1.0) -
                              static_cast<double>(k) * std::log2(3.0));
    acc = log2_add(acc, -static_cast<double>(m) * std::log2(3.0) -
                            (static_cast<double>(m) + 1.0));
    return acc;
  }

  std::vector<double> conditional(SeqView prefix) const override {
    double lp = log2_joint(prefix);
    if (lp == kNegInf)
      fail(Errc::undefined_conditional,
           label() + ": conditional on a zero-probability prefix is undefined");
    Seq next(prefix.begin(), prefix.end());
    next.push_back(0);
    std::vector<double> c(3, 0.0);
    double sum = 0.0;
    for (int s = 0; s < 3; ++s) {
      next.back() = s;
      c[static_cast<size_t>(s)] = exp2_safe(log2_joint(next) - lp);
      sum += c[static_cast<size_t>(s)];
    }
    for (double& p : c) p /= sum;
    return c;
  }

 private:
};
}  // namespace

MeasurePtr make_all_twos_closure() { return std::make_shared<AllTwosClosure>(); }

MeasurePtr make_tripartite_rho(double p1) {
  double third = std::log2(1.0 / 3.0);
  return std::make_shared<MixturePredictor>(
      std::vector<MeasurePtr>{make_binary_in_ternary(p1), make_uniform_iid(Alphabet{3}),
                              make_all_twos_closure()},
      std::vector<double>{third, third, third}, "tripartite(" + std::to_string(p1) + ")");
}

namespace {
double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// Draw a 0/1 path of length n from Bernoulli-with-P(1)=p conditioned on the
// frequency band |freq_t - p| <= log2(t)/sqrt(t) for t >= band_from.
Seq draw_banded(double p, int n, int band_from, RngStream& rng, int* rejections) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Seq x(static_cast<size_t>(n));
    int ones = 0;
    bool ok = true;
    for (int t = 1; t <= n; ++t) {
      int b = rng.next_unit() < p ? 1 : 0;
      ones += b;
      x[static_cast<size_t>(t - 1)] = b;
      if (t >= band_from) {
        double f = std::log2(static_cast<double>(t)) / std::sqrt(static_cast<double>(t));
        if (std::abs(static_cast<double>(ones) / t - p) > f) {
          ok = false;
          break;
        }
      }
    }
    if (ok) return x;
    if (rejections) ++(*rejections);
  }
  fail(Errc::internal, "banded sampler: rejection loop did not terminate");
}
}  // namespace

SuboptimalBayesResult suboptimal_bayes_experiment(const SuboptimalBayesParams& params) {
  if (!(params.p > 0.0 && params.p < 0.5))
    fail(Errc::invalid_argument, "suboptimal_bayes: p must lie in (0, 1/2)");
  SuboptimalBayesResult out;
  out.h_p = binary_entropy(params.p);
  const int n = params.n;
  std::vector<double> bayes(static_cast<size_t>(params.seeds));
  std::vector<double> tri(static_cast<size_t>(params.seeds));
  MeasurePtr rho = make_tripartite_rho(params.p);
  const double l1 = std::log2(params.p), l0 = std::log2(1.0 - params.p);
  for (int s = 0; s < params.seeds; ++s) {
    RngStream rng = RngStream::derive(params.seed, static_cast<uint64_t>(s));
    // support sequences carrying the Bayesian prior (uniform over the draws)
    std::vector<Seq> support(static_cast<size_t>(params.support));
    for (auto& seq : support)
      seq = draw_banded(params.p, n, params.band_from, rng, &out.rejected_draws);
    // a fresh draw from (approximately) the same conditioned law
    Seq y = draw_banded(params.p, n, params.band_from, rng, &out.rejected_draws);

    // Bayesian mass: (1/m) sum_i [support_i agrees with y] beta_p(y)
    int agree = 0;
    for (const auto& seq : support)
      if (seq == y) ++agree;
    double lbeta = 0.0;
    for (Symbol b : y) lbeta += b == 1 ? l1 : l0;
    double lphi = agree == 0
                      ? kNegInf
                      : lbeta + std::log2(static_cast<double>(agree) / params.support);
    if (params.smooth)
      lphi = log2_add(lphi - 1.0, -1.0 - static_cast<double>(n) * std::log2(3.0));
    bayes[static_cast<size_t>(s)] = -lphi / n;

    // tripartite mass on y (lifted to the ternary alphabet verbatim)
    Seq y3(y.begin(), y.end());
    tri[static_cast<size_t>(s)] = -rho->log2_prob(y3) / n;
  }
  auto mean_se = [](const std::vector<double>& v, double* mean, double* se) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - m) * (x - m);
    *mean = m;
    *se = v.size() > 1 ? std::sqrt(var / (static_cast<double>(v.size()) - 1.0) /
                                   static_cast<double>(v.size()))
                       : 0.0;
  };
  mean_se(bayes, &out.bayes_mean, &out.bayes_se);
  mean_se(tri, &out.rho_mean, &out.rho_se);
  return out;
}

// --- weights matter -------------------------------------------------------------

WeightsMatterResult weights_matter(int n, int k_max) {
  if (n < 2 || k_max < n + 2) fail(Errc::invalid_argument, "weights_matter: need k_max > n");
  Alphabet a{2};
  std::vector<MeasurePtr> comps;
  comps.reserve(static_cast<size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) {
    Seq pattern(static_cast<size_t>(k), 0);
    comps.push_back(make_dirac(a, std::move(pattern), 1));  // k zeros then ones
  }
  auto quad = MixturePredictor::over(comps, WeightScheme::quadratic(), "wm-quadratic");
  auto geo = MixturePredictor::over(comps, WeightScheme::geometric(), "wm-geometric");
  Seq zeros(static_cast<size_t>(n), 0);

  WeightsMatterResult out;
  out.n = n;
  out.loss_quadratic = -quad->log2_mass(zeros);
  out.loss_geometric = -geo->log2_mass(zeros);
  double mq = 0.0, mg = 0.0;
  for (int k = n; k <= k_max; ++k) {
    mq += WeightScheme::quadratic().weight(k);
    mg += WeightScheme::geometric().weight(k);
  }
  out.direct_quadratic = -std::log2(mq);
  out.direct_geometric = -std::log2(mg);
  return out;
}

// --- contamination ---------------------------------------------------------------

MeasurePtr make_nosum_ad_rho() {
  return std::make_shared<StepwiseIidMeasure>(
      Alphabet{2},
      [](int64_t t) {
        double p1 = static_cast<double>(t) / (static_cast<double>(t) + 1.0);
        return std::vector<double>{1.0 - p1, p1};
      },
      "nosum_ad_rho");
}

MeasurePtr make_nosum_ad_chi(int k_max) {
  std::vector<int64_t> spikes;
  for (int k = 1; k <= k_max; ++k) spikes.push_back(1LL << (1LL << k));  // 2^(2^k)
  return std::make_shared<StepwiseIidMeasure>(
      Alphabet{2},
      [spikes](int64_t t) {
        for (size_t j = 0; j < spikes.size(); ++j) {
          if (t == spikes[j]) {
            double prev = j == 0 ? 2.0 : static_cast<double>(spikes[j - 1]);
            double p1 = prev / static_cast<double>(spikes[j]);
            return std::vector<double>{1.0 - p1, p1};
          }
        }
        return std::vector<double>{0.0, 1.0};
      },
      "nosum_ad_chi");
}

std::vector<NosumAdPoint> nosum_ad_points(int k_max) {
  if (k_max < 1 || k_max > 4) fail(Errc::invalid_argument, "nosum_ad: k_max must be in 1..4");
  // closed forms: rho(1^m) = 1/(m+1); chi(1^m) = 2/n_{j} for the largest
  // spike n_j <= m (and 1 before the first spike).
  auto chi_ones = [&](long m) {
    double value = 1.0;
    for (int k = 1; k <= k_max; ++k) {
      long nk = 1L << (1L << k);
      if (nk <= m) value = 2.0 / static_cast<double>(nk);
    }
    return value;
  };
  std::vector<NosumAdPoint> out;
  for (int k = 1; k <= k_max; ++k) {
    long nk = 1L << (1L << k);
    NosumAdPoint pt;
    pt.n = nk;
    double num = 1.0 / (static_cast<double>(nk) + 1.0) + chi_ones(nk);
    double den = 1.0 / static_cast<double>(nk) + chi_ones(nk - 1);
    pt.conditional = num / den;
    pt.closed_form_bound = (1.0 / (static_cast<double>(nk) + 1.0) + 2.0 / nk) /
                           (1.0 / nk + 2.0 / std::sqrt(static_cast<double>(nk)));
    out.push_back(pt);
  }
  return out;
}

NosumAvadPathResult nosum_avad_path(int n, uint64_t seed) {
  MeasurePtr mu = make_bernoulli(0.5);
  auto rho = std::make_shared<StepwiseIidMeasure>(
      Alphabet{2},
      [](int64_t t) {
        long r = static_cast<long>(std::lround(std::sqrt(static_cast<double>(t))));
        bool spike = r * r == t;
        return spike ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.5, 0.5};
      },
      "nosum_avad_rho");
  MeasurePtr chi = make_bernoulli(2.0 / 3.0);  // P(1) = 1/3
  auto mix = std::make_shared<MixturePredictor>(std::vector<MeasurePtr>{rho, chi},
                                                std::vector<double>{-1.0, -1.0},
                                                "contaminated_avad");
  RngStream rng(seed);
  Seq x = sample(*mu, n, rng);
  LossReport rep = trace_path(*mu, *mix, x);

  NosumAvadPathResult out;
  for (int t = 1; t <= n; ++t) {
    long r = static_cast<long>(std::lround(std::sqrt(static_cast<double>(t))));
    if (r * r == t && x[static_cast<size_t>(t - 1)] == 1) {
      out.diverged = true;
      out.divergence_step = t;
      break;
    }
  }
  out.abar_final = rep.abar.back();
  if (out.diverged) {
    long n0 = std::max<long>(4 * out.divergence_step, 64);
    out.persistent = n0 < n;
    for (long m = n0; m <= n; ++m)
      if (rep.abar[static_cast<size_t>(m - 1)] < 0.25) out.persistent = false;
  }
  return out;
}

NodomResult nodom_check(int k_max) {
  std::vector<int64_t> spikes;
  for (int k = 1; k <= k_max; ++k) spikes.push_back(1LL << (2 * k));  // 4^k
  auto rho = std::make_shared<StepwiseIidMeasure>(
      Alphabet{2},
      [spikes](int64_t t) {
        for (int64_t s : spikes)
          if (t == s) return std::vector<double>{0.5, 0.5};
        return std::vector<double>{0.0, 1.0};
      },
      "nodom_rho");
  MeasurePtr mu = make_dirac(Alphabet{2}, Seq{}, 1);  // all ones
  NodomResult out;
  int64_t horizon = spikes.back();
  Seq prefix;
  out.dominance_ok = true;
  for (int64_t t = 1; t <= horizon; ++t) {
    for (int64_t s : spikes)
      if (t == s) out.delta_at_spikes.push_back(kl_step(*mu, *rho, prefix));
    prefix.push_back(1);
  }
  // c_n = 2^{-#spikes <= n}; on the only mu-positive path rho(1^n) = c_n exactly
  double lrho = rho->log2_prob(prefix);
  double expect = -static_cast<double>(k_max);
  out.c_log2_at_horizon = lrho;
  out.dominance_ok = std::abs(lrho - expect) <= 1e-9;
  return out;
}

// --- dominance --------------------------------------------------------------------

std::string dominance_class_name(DominanceClass c) {
  switch (c) {
    case DominanceClass::bounded_below: return "bounded-below";
    case DominanceClass::subexponential: return "subexponential";
    case DominanceClass::square_summable: return "square-summable";
    case DominanceClass::failing: return "failing";
  }
  return "?";
}

DominanceCert dominance_check(const ProcessMeasure& rho, const ProcessMeasure& mu,
                              const std::function<double(int)>& log2_cn, int horizon,
                              DominanceClass declared, bool exhaustive, int sample_paths,
                              uint64_t seed) {
  DominanceCert cert;
  cert.condition_class = declared;
  cert.horizon = horizon;
  cert.passed = true;
  cert.min_slack_bits = kPosInf;
  auto check_prefix = [&](SeqView x, double lmu, double lrho) {
    if (lmu == kNegInf) return;
    int n = static_cast<int>(x.size());
    double slack = (lrho == kNegInf ? kNegInf : lrho) - (log2_cn(n) + lmu);
    if (slack < cert.min_slack_bits) cert.min_slack_bits = slack;
    if (slack < -1e-9) {
      if (cert.passed) cert.violation_witness = Seq(x.begin(), x.end());
      cert.passed = false;
    } else if (std::abs(slack) <= 1e-9 && cert.equality_witnesses.size() < 8) {
      cert.equality_witnesses.emplace_back(x.begin(), x.end());
    }
  };
  if (exhaustive) {
    cell_count(mu.alphabet(), horizon, 1u << 24);
    // walk the prefix tree once, checking every depth
    std::function<void(StepState*, StepState*, Seq&, double, double)> go =
        [&](StepState* smu, StepState* srho, Seq& word, double lmu, double lrho) {
          if (static_cast<int>(word.size()) == horizon) return;
          std::vector<double> cmu = lmu == kNegInf ? std::vector<double>() : smu->conditional();
          std::vector<double> crho = lrho == kNegInf ? std::vector<double>() : srho->conditional();
          for (int s = 0; s < mu.alphabet().size; ++s) {
            double lmu2 = lmu == kNegInf ? kNegInf : lmu + safe_log2(cmu[static_cast<size_t>(s)]);
            if (lmu2 == kNegInf) continue;  // mu-null prefixes are vacuous
            double lrho2 =
                lrho == kNegInf ? kNegInf : lrho + safe_log2(crho[static_cast<size_t>(s)]);
            auto nmu = smu->clone();
            nmu->advance(s);
            std::unique_ptr<StepState> nrho;
            if (lrho2 != kNegInf) {
              nrho = srho->clone();
              nrho->advance(s);
            }
            word.push_back(s);
            check_prefix(word, lmu2, lrho2);
            go(nmu.get(), nrho.get(), word, lmu2, lrho2);
            word.pop_back();
          }
        };
    auto smu = mu.start();
    auto srho = rho.start();
    Seq word;
    go(smu.get(), srho.get(), word, 0.0, 0.0);
  } else {
    for (int path = 0; path < sample_paths; ++path) {
      RngStream rng = RngStream::derive(seed, static_cast<uint64_t>(path));
      Seq x = sample(mu, horizon, rng);
      for (int n = 1; n <= horizon; ++n) {
        SeqView pre(x.data(), static_cast<size_t>(n));
        check_prefix(pre, mu.log2_prob(pre), rho.log2_prob(pre));
      }
    }
  }
  return cert;
}

DominanceConsequence dominance_consequence_check(const DominanceCert& cert,
                                                 const ProcessMeasure& rho,
                                                 const ProcessMeasure& mu,
                                                 const std::function<double(int)>& log2_cn,
                                                 int n, Method method, int reps, uint64_t seed,
                                                 const std::vector<int>& horizons) {
  DominanceConsequence out;
  if (!cert.passed) return out;
  if (cert.condition_class == DominanceClass::subexponential ||
      cert.condition_class == DominanceClass::bounded_below) {
    out.applicable = true;
    KlValue l = expected_cumulative_kl(mu, rho, n, method, {reps, seed, 1});
    out.lhs = l.bits / n;
    out.rhs = -log2_cn(n) / n + 1e-6;
    out.pass = out.lhs <= out.rhs;
    return out;
  }
  if (cert.condition_class == DominanceClass::square_summable) {
    out.applicable = true;
    out.pass = true;
    std::vector<int> hs = horizons.empty() ? std::vector<int>{100, 1000, 10000} : horizons;
    for (int h : hs) {
      std::vector<double> dbars;
      for (int r = 0; r < reps; ++r) {
        RngStream rng = RngStream::derive(seed, static_cast<uint64_t>(r) * 1000 + h);
        Seq x = sample(mu, h, rng);
        LossReport rep = trace_path(mu, rho, x);
        dbars.push_back(rep.dbar.back());
      }
      std::sort(dbars.begin(), dbars.end());
      out.median_dbar.push_back(dbars[dbars.size() / 2]);
    }
    for (size_t i = 1; i < out.median_dbar.size(); ++i)
      if (out.median_dbar[i] >= out.median_dbar[i - 1]) out.pass = false;
    return out;
  }
  return out;  // failing class: not applicable
}

// --- leaky coin --------------------------------------------------------------------

namespace {
double leaky_budget_total(int n) {
  // running max of sqrt(m)/log2(m+1)
  double best = 0.0;
  for (int m = 1; m <= n; ++m)
    best = std::max(best, std::sqrt(static_cast<double>(m)) / std::log2(m + 1.0));
  return best;
}

class LeakyCoin : public ProcessMeasure {
 public:
  explicit LeakyCoin(int max_horizon) : ProcessMeasure(Alphabet{2}, "leaky_coin") {
    budget_.assign(static_cast<size_t>(max_horizon) + 1, 0.0);
    double prev = 0.0, run = 0.0;
    for (int t = 1; t <= max_horizon; ++t) {
      run = std::max(run, std::sqrt(static_cast<double>(t)) / std::log2(t + 1.0));
      budget_[static_cast<size_t>(t)] = run - prev;  // Delta_t = F(t) - F(t-1)
      prev = run;
    }
  }

  std::vector<double> conditional(SeqView prefix) const override {
    size_t t = prefix.size() + 1;
    if (t >= budget_.size())
      fail(Errc::resource_limit, "leaky_coin: past the configured horizon");
    double leak = 0.5 * budget_[t];
    if (!prefix.empty() && prefix.back() == 1) leak += 0.5 * budget_[t];
    double gamma = 1.0 - std::exp2(-leak);
    return {(1.0 - gamma) / 2.0, (1.0 - gamma) / 2.0 + gamma};
  }

 private:
  std::vector<double> budget_;
};
}  // namespace

MeasurePtr make_leaky_coin(int max_horizon) { return std::make_shared<LeakyCoin>(max_horizon); }

double leaky_coin_log2_cn(int n) { return -leaky_budget_total(n); }

}  // namespace predlab
