#include "core/loss.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

namespace predlab {

namespace {

double lgamma2(double x) { return std::lgamma(x) / std::numbers::ln2; }

double log2_binom(int n, int k) {
  return lgamma2(n + 1.0) - lgamma2(k + 1.0) - lgamma2(n - k + 1.0);
}

struct CellWalker {
  const std::function<void(SeqView, double, double)>* visit;
  int n;
  bool mu_weighted;
  Seq word;

  void descend(StepState* smu, StepState* srho, double lmu, double lrho, int depth,
               const Alphabet& a) {
    if (depth == n) {
      (*visit)(word, lmu, lrho);
      return;
    }
    std::vector<double> cmu, crho;
    if (lmu != kNegInf) cmu = smu->conditional();
    if (lrho != kNegInf) crho = srho->conditional();
    for (int s = 0; s < a.size; ++s) {
      double lmu2 = lmu == kNegInf ? kNegInf : lmu + safe_log2(cmu[static_cast<size_t>(s)]);
      double lrho2 = lrho == kNegInf ? kNegInf : lrho + safe_log2(crho[static_cast<size_t>(s)]);
      if (lmu2 == kNegInf && (mu_weighted || lrho2 == kNegInf)) continue;
      std::unique_ptr<StepState> nmu, nrho;
      if (lmu2 != kNegInf) {
        nmu = smu->clone();
        nmu->advance(s);
      }
      if (lrho2 != kNegInf) {
        nrho = srho->clone();
        nrho->advance(s);
      }
      word.push_back(s);
      descend(nmu.get(), nrho.get(), lmu2, lrho2, depth + 1, a);
      word.pop_back();
    }
  }
};

void require_same_alphabet(const ProcessMeasure& mu, const ProcessMeasure& rho) {
  if (!(mu.alphabet() == rho.alphabet()))
    fail(Errc::invalid_argument, "measures are over different alphabets");
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::enumerate: return "enumerate";
    case Method::binomial: return "binomial";
    case Method::monte_carlo: return "monte_carlo";
  }
  return "?";
}

void for_each_cell(const ProcessMeasure& mu, const ProcessMeasure& rho, int n, bool mu_weighted,
                   const std::function<void(SeqView, double, double)>& visit, uint64_t cap) {
  require_same_alphabet(mu, rho);
  cell_count(mu.alphabet(), n, cap);
  CellWalker w{&visit, n, mu_weighted, {}};
  auto smu = mu.start();
  auto srho = rho.start();
  w.descend(smu.get(), srho.get(), 0.0, 0.0, 0, mu.alphabet());
}

double kl_step(const ProcessMeasure& mu, const ProcessMeasure& rho, SeqView prefix) {
  require_same_alphabet(mu, rho);
  std::vector<double> p = mu.conditional(prefix);
  std::vector<double> q = rho.conditional(prefix);
  double d = 0.0;
  for (size_t a = 0; a < p.size(); ++a) {
    if (p[a] == 0.0) continue;
    if (q[a] == 0.0) return kPosInf;
    d += p[a] * std::log2(p[a] / q[a]);
  }
  return std::max(d, 0.0);
}

namespace {

KlValue kl_enumerate(const ProcessMeasure& mu, const ProcessMeasure& rho, int n) {
  double acc = 0.0;
  bool poisoned = false;
  for_each_cell(mu, rho, n, /*mu_weighted=*/true, [&](SeqView, double lmu, double lrho) {
    if (lmu == kNegInf) return;
    if (lrho == kNegInf) {
      poisoned = true;
      return;
    }
    acc += std::exp2(lmu) * (lmu - lrho);
  });
  return {poisoned ? kPosInf : acc, 0.0, Method::enumerate};
}

KlValue kl_binomial(const ProcessMeasure& mu, const ProcessMeasure& rho, int n) {
  const ExchangeableLaw* lm = mu.exchangeable();
  const ExchangeableLaw* lr = rho.exchangeable();
  if (!lm || !lr)
    fail(Errc::invalid_argument,
         "binomial method requires both families to declare a count-statistic law");
  if (mu.alphabet().size != 2 || rho.alphabet().size != 2)
    fail(Errc::invalid_argument, "binomial method requires a binary alphabet");
  double acc = 0.0;
  bool poisoned = false;
  for (int k = 0; k <= n; ++k) {
    int counts[2] = {n - k, k};
    double lmu = lm->log2_prob_counts(n, counts);
    if (lmu == kNegInf) continue;
    double lrho = lr->log2_prob_counts(n, counts);
    if (lrho == kNegInf) {
      poisoned = true;
      break;
    }
    acc += std::exp2(log2_binom(n, k) + lmu) * (lmu - lrho);
  }
  return {poisoned ? kPosInf : acc, 0.0, Method::binomial};
}

KlValue kl_monte_carlo(const ProcessMeasure& mu, const ProcessMeasure& rho, int n,
                       const MonteCarloParams& mc) {
  if (mc.replicas < 1) fail(Errc::invalid_argument, "monte_carlo: need at least one replica");
  std::vector<double> vals(static_cast<size_t>(mc.replicas));
  auto run_block = [&](int lo, int hi) {
    for (int r = lo; r < hi; ++r) {
      RngStream rng = RngStream::derive(mc.seed, static_cast<uint64_t>(r));
      auto st = mu.start();
      double lmu = 0.0;
      Seq x;
      x.reserve(static_cast<size_t>(n));
      for (int t = 0; t < n; ++t) {
        std::vector<double> c = st->conditional();
        Symbol a = rng.pick(c);
        lmu += safe_log2(c[static_cast<size_t>(a)]);
        st->advance(a);
        x.push_back(a);
      }
      double lrho = rho.log2_prob(x);
      vals[static_cast<size_t>(r)] = lrho == kNegInf ? kPosInf : lmu - lrho;
    }
  };
  int threads = std::max(1, mc.threads);
  if (threads == 1) {
    run_block(0, mc.replicas);
  } else {
    std::vector<std::future<void>> futs;
    int chunk = (mc.replicas + threads - 1) / threads;
    for (int lo = 0; lo < mc.replicas; lo += chunk)
      futs.push_back(std::async(std::launch::async, run_block, lo,
                                std::min(mc.replicas, lo + chunk)));
    for (auto& f : futs) f.get();
  }
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= mc.replicas;
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  double se = mc.replicas > 1 ? std::sqrt(var / (mc.replicas - 1.0) / mc.replicas) : 0.0;
  return {mean, se, Method::monte_carlo};
}

}  // namespace

KlValue expected_cumulative_kl(const ProcessMeasure& mu, const ProcessMeasure& rho, int n,
                               Method method, const MonteCarloParams& mc) {
  require_same_alphabet(mu, rho);
  if (n < 0) fail(Errc::invalid_argument, "negative horizon");
  switch (method) {
    case Method::enumerate: return kl_enumerate(mu, rho, n);
    case Method::binomial: return kl_binomial(mu, rho, n);
    case Method::monte_carlo: return kl_monte_carlo(mu, rho, n, mc);
  }
  fail(Errc::internal, "unreachable");
}

WorstCaseLoss worst_case_loss(const ModelClass& c, const ProcessMeasure& rho, int n,
                              Method method, const MonteCarloParams& mc) {
  if (c.measures.empty()) fail(Errc::invalid_argument, "worst_case_loss: empty class");
  WorstCaseLoss out;
  double best = -kPosInf;
  for (size_t i = 0; i < c.measures.size(); ++i) {
    MonteCarloParams mci = mc;
    mci.seed = mc.seed + i;  // independent streams per class member
    double v = expected_cumulative_kl(*c.measures[i], rho, n, method, mci).bits / n;
    if (v > best) {
      best = v;
      out.argmax = i;
    }
  }
  out.bits_per_step = best;
  return out;
}

KlValue regret_rate(const ProcessMeasure& nu, const ProcessMeasure& mu,
                    const ProcessMeasure& rho, int n, Method method,
                    const MonteCarloParams& mc) {
  if (method == Method::monte_carlo) {
    // shared sample paths for both terms
    std::vector<double> vals(static_cast<size_t>(mc.replicas));
    for (int r = 0; r < mc.replicas; ++r) {
      RngStream rng = RngStream::derive(mc.seed, static_cast<uint64_t>(r));
      Seq x = sample(nu, n, rng);
      double lrho = rho.log2_prob(x);
      double lmu = mu.log2_prob(x);
      double v;
      if (lrho == kNegInf && lmu == kNegInf) v = 0.0;
      else if (lrho == kNegInf) v = kPosInf;
      else if (lmu == kNegInf) v = -kPosInf;
      else v = (lmu - lrho) / n;
      vals[static_cast<size_t>(r)] = v;
    }
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= mc.replicas;
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    double se = mc.replicas > 1 ? std::sqrt(var / (mc.replicas - 1.0) / mc.replicas) : 0.0;
    return {mean, se, Method::monte_carlo};
  }
  KlValue a = expected_cumulative_kl(nu, rho, n, method, mc);
  KlValue b = expected_cumulative_kl(nu, mu, n, method, mc);
  return {(a.bits - b.bits) / n, 0.0, method};
}

TVReport tv_conditional(const ProcessMeasure& mu, const ProcessMeasure& rho, SeqView prefix,
                        int m) {
  require_same_alphabet(mu, rho);
  cell_count(mu.alphabet(), m, 1u << 24);
  TVReport out;
  out.horizon = m;
  if (mu.log2_prob(prefix) == kNegInf || rho.log2_prob(prefix) == kNegInf) {
    out.value = 1.0;
    out.prefix_degenerate = true;
    return out;
  }
  auto smu = mu.start();
  auto srho = rho.start();
  for (Symbol a : prefix) {
    smu->advance(a);
    srho->advance(a);
  }
  double acc = 0.0;
  const Alphabet& alpha = mu.alphabet();
  // DFS over continuations; once one side has mass 0 the remaining |diff|
  // over that subtree equals the surviving side's branch mass.
  std::function<void(StepState*, StepState*, double, double, int)> go =
      [&](StepState* a_mu, StepState* a_rho, double lmu, double lrho, int depth) {
        if (lmu == kNegInf && lrho == kNegInf) return;
        if (lmu == kNegInf || lrho == kNegInf || depth == m) {
          acc += std::abs(exp2_safe(lmu) - exp2_safe(lrho));
          return;
        }
        std::vector<double> cmu = a_mu->conditional();
        std::vector<double> crho = a_rho->conditional();
        for (int s = 0; s < alpha.size; ++s) {
          double lmu2 = lmu + safe_log2(cmu[static_cast<size_t>(s)]);
          double lrho2 = lrho + safe_log2(crho[static_cast<size_t>(s)]);
          if (lmu2 == kNegInf && lrho2 == kNegInf) continue;
          std::unique_ptr<StepState> nmu, nrho;
          if (lmu2 != kNegInf) {
            nmu = a_mu->clone();
            nmu->advance(s);
          }
          if (lrho2 != kNegInf) {
            nrho = a_rho->clone();
            nrho->advance(s);
          }
          go(nmu.get(), nrho.get(), lmu2, lrho2, depth + 1);
        }
      };
  go(smu.get(), srho.get(), 0.0, 0.0, 0);
  out.value = std::min(1.0, 0.5 * acc);
  return out;
}

DinfReport d_inf(const ProcessMeasure& mu1, const ProcessMeasure& mu2, int n) {
  DinfReport out;
  out.horizon = n;
  for_each_cell(mu1, mu2, n, /*mu_weighted=*/false, [&](SeqView x, double l1, double l2) {
    if (out.infinite) return;
    if (l1 == kNegInf && l2 == kNegInf) return;  // log 0/0 := 0
    if (l1 == kNegInf || l2 == kNegInf) {
      out.infinite = true;
      out.value = kPosInf;
      out.witness = Seq(x.begin(), x.end());
      return;
    }
    double v = std::abs(l1 - l2) / n;
    if (v > out.value) {
      out.value = v;
      out.witness = Seq(x.begin(), x.end());
    }
  });
  return out;
}

LossReport trace_path(const ProcessMeasure& mu, const ProcessMeasure& rho, SeqView x) {
  require_same_alphabet(mu, rho);
  LossReport rep;
  rep.mu_label = mu.label();
  rep.rho_label = rho.label();
  rep.method = "trace";
  rep.path.assign(x.begin(), x.end());
  auto smu = mu.start();
  auto srho = rho.start();
  double dsum = 0.0, asum = 0.0, cum = 0.0;
  for (size_t t = 0; t < x.size(); ++t) {
    std::vector<double> p = smu->conditional();
    std::vector<double> q = srho->conditional();
    double d = 0.0, adist = 0.0;
    for (size_t s = 0; s < p.size(); ++s) {
      adist += std::abs(p[s] - q[s]);
      if (p[s] == 0.0) continue;
      d = q[s] == 0.0 ? kPosInf : d + p[s] * std::log2(p[s] / q[s]);
    }
    d = std::max(d, 0.0);
    Symbol a = x[t];
    cum += safe_log2(p[static_cast<size_t>(a)]) - safe_log2(q[static_cast<size_t>(a)]);
    dsum += d;
    asum += adist;
    rep.delta.push_back(d);
    rep.a.push_back(adist);
    rep.dbar.push_back(dsum / static_cast<double>(t + 1));
    rep.abar.push_back(asum / static_cast<double>(t + 1));
    rep.cum_logloss.push_back(cum);
    smu->advance(a);
    srho->advance(a);
  }
  return rep;
}

PinskerVerdict pinsker_check(const LossReport& report) {
  PinskerVerdict v;
  const double factor = 2.0 * std::numbers::ln2;  // bit-corrected Pinsker constant
  const double tol = 1e-9;
  for (size_t t = 0; t < report.delta.size(); ++t) {
    double lhs = report.a[t] * report.a[t];
    double rhs = factor * report.delta[t];
    if (lhs > rhs + tol) {
      return {false, static_cast<int>(t) + 1, lhs, rhs};
    }
    lhs = report.abar[t] * report.abar[t];
    rhs = factor * report.dbar[t];
    if (lhs > rhs + tol) {
      return {false, static_cast<int>(t) + 1, lhs, rhs};
    }
  }
  return v;
}

}  // namespace predlab
