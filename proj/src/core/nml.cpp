#include "core/nml.hpp"

#include <cmath>
#include <numbers>

namespace predlab {

namespace {

double lgamma2(double x) { return std::lgamma(x) / std::numbers::ln2; }
double log2_binom(int n, int k) {
  return lgamma2(n + 1.0) - lgamma2(k + 1.0) - lgamma2(n - k + 1.0);
}

double log2_w_quadratic(int k) {
  return std::log2(6.0 / (std::numbers::pi * std::numbers::pi)) -
         2.0 * std::log2(static_cast<double>(k));
}

}  // namespace

NmlTable nml_table(const ModelClass& c, int n, uint64_t cap) {
  Alphabet a = c.alphabet();
  uint64_t cells = cell_count(a, n, cap);
  NmlTable t;
  t.n = n;
  t.alphabet = a;
  t.log2_cx.assign(static_cast<size_t>(cells), kNegInf);
  for (uint64_t code = 0; code < cells; ++code) {
    Seq x = word_from_code(code, n, a.size);
    double best = kNegInf;
    for (const auto& m : c.measures) best = std::max(best, m->log2_prob(x));
    t.log2_cx[static_cast<size_t>(code)] = best;
  }
  t.log2_cn = log2_sum(t.log2_cx);
  if (t.log2_cn < -1e-9) fail(Errc::internal, "nml: normalizer below 1");
  return t;
}

double bernoulli_log2_sup(int n, int ones) {
  if (n <= 0 || ones < 0 || ones > n) fail(Errc::invalid_argument, "bernoulli sup: bad counts");
  double k = static_cast<double>(ones), dn = static_cast<double>(n);
  double acc = 0.0;
  if (ones > 0) acc += k * std::log2(k / dn);
  if (ones < n) acc += (dn - k) * std::log2((dn - k) / dn);
  return acc;
}

double bernoulli_log2_cn(int n) {
  std::vector<double> terms(static_cast<size_t>(n + 1));
  for (int k = 0; k <= n; ++k)
    terms[static_cast<size_t>(k)] = log2_binom(n, k) + bernoulli_log2_sup(n, k);
  return log2_sum(terms);
}

ModelClass nml_negative_example_class() {
  Alphabet a{2};
  ModelClass c;
  c.label = "nml-negative-example";
  c.generator = "two-step class with mu3 = (dirac 00 + dirac 01)/2";
  c.measures.push_back(make_dirac(a, seq_from_string("00"), 0));
  c.measures.push_back(make_dirac(a, seq_from_string("01"), 0));
  auto mu3 = std::make_shared<MixturePredictor>(
      std::vector<MeasurePtr>{make_dirac(a, seq_from_string("00"), 0),
                              make_dirac(a, seq_from_string("01"), 0)},
      std::vector<double>{-1.0, -1.0}, "mu3(fair second symbol)");
  c.measures.push_back(mu3);
  c.measures.push_back(make_dirac(a, seq_from_string("11"), 0));
  return c;
}

double nml_conditional_pathology() {
  ModelClass c = nml_negative_example_class();
  NmlTable t1 = nml_table(c, 1);
  NmlTable t2 = nml_table(c, 2);
  // lambda(x|y) := lambda(yx)/lambda(y) across the two horizons
  const auto& mu3 = *c.measures[2];
  std::vector<double> cond = mu3.conditional(seq_from_string("0"));
  double d = 0.0;
  for (int s = 0; s < 2; ++s) {
    double p = cond[static_cast<size_t>(s)];
    if (p == 0.0) continue;
    double llam = t2.log2_lambda(word_code(Seq{0, s}, 2)) - t1.log2_lambda(0);
    d += p * (std::log2(p) - llam);
  }
  return d;
}

// --- rho_c over an explicit finite class -------------------------------------

namespace {

// Joint-probability-defined measures share this conditional-from-ratios shim.
class JointDefinedMeasure : public ProcessMeasure {
 public:
  using ProcessMeasure::ProcessMeasure;
  virtual double log2_joint(SeqView x) const = 0;

  std::vector<double> conditional(SeqView prefix) const override {
    double lp = log2_joint(prefix);
    if (lp == kNegInf)
      fail(Errc::undefined_conditional,
           label() + ": conditional on a zero-probability prefix is undefined");
    Seq next(prefix.begin(), prefix.end());
    next.push_back(0);
    std::vector<double> c(static_cast<size_t>(alphabet().size), 0.0);
    double sum = 0.0;
    for (int s = 0; s < alphabet().size; ++s) {
      next.back() = s;
      c[static_cast<size_t>(s)] = exp2_safe(log2_joint(next) - lp);
      sum += c[static_cast<size_t>(s)];
    }
    if (sum <= 0.0)
      fail(Errc::internal, label() + ": joint family is not consistent");
    for (double& p : c) p /= sum;  // absorb float residue from the ratios
    return c;
  }
};

class RhoCMeasure : public JointDefinedMeasure {
 public:
  RhoCMeasure(Alphabet a, int max_horizon, std::vector<std::vector<std::vector<double>>> marg,
              std::string label)
      : JointDefinedMeasure(a, std::move(label)), n_max_(max_horizon), marg_(std::move(marg)) {}

  // rho_c(x_{1..t}) = sum_{k<t} w_k lambda_k(x_{1..k}) [tail zeros]
  //                 + sum_{k>=t} w_k marg_k(x_{1..t})
  double log2_joint(SeqView x) const override {
    int t = static_cast<int>(x.size());
    if (t == 0) return 0.0;
    std::vector<double> terms;
    int m = alphabet().size;
    for (int k = 1; k <= n_max_; ++k) {
      double lcomp;
      if (k < t) {
        bool zero_tail = true;
        for (int i = k; i < t && zero_tail; ++i) zero_tail = x[static_cast<size_t>(i)] == 0;
        if (!zero_tail) continue;
        lcomp = marg_at(k, k, x);
      } else {
        lcomp = marg_at(k, t, x);
      }
      if (lcomp == kNegInf) continue;
      terms.push_back(log2_w_quadratic(k) + lcomp);
      (void)m;
    }
    return log2_sum(terms);
  }

 private:
  double marg_at(int k, int t, SeqView x) const {
    uint64_t code = word_code(x.subspan(0, static_cast<size_t>(t)), alphabet().size);
    return marg_[static_cast<size_t>(k)][static_cast<size_t>(t)][static_cast<size_t>(code)];
  }

  int n_max_;
  // marg_[k][t][code]: log2 of the horizon-k table mass of the length-t prefix
  std::vector<std::vector<std::vector<double>>> marg_;
};

}  // namespace

MeasurePtr build_rho_c(const ModelClass& c, int max_horizon, uint64_t cap) {
  Alphabet a = c.alphabet();
  if (max_horizon < 1) fail(Errc::invalid_argument, "rho_c: max_horizon must be >= 1");
  std::vector<std::vector<std::vector<double>>> marg(static_cast<size_t>(max_horizon) + 1);
  for (int k = 1; k <= max_horizon; ++k) {
    NmlTable t = nml_table(c, k, cap);
    auto& per_t = marg[static_cast<size_t>(k)];
    per_t.resize(static_cast<size_t>(k) + 1);
    std::vector<double> cur(t.log2_cx.size());
    for (size_t i = 0; i < cur.size(); ++i) cur[i] = t.log2_lambda(static_cast<uint64_t>(i));
    per_t[static_cast<size_t>(k)] = cur;
    for (int t2 = k - 1; t2 >= 1; --t2) {
      std::vector<double> shorter(cur.size() / static_cast<size_t>(a.size));
      for (size_t i = 0; i < shorter.size(); ++i) {
        double acc = kNegInf;
        for (int s = 0; s < a.size; ++s)
          acc = log2_add(acc, cur[i * static_cast<size_t>(a.size) + static_cast<size_t>(s)]);
        shorter[i] = acc;
      }
      per_t[static_cast<size_t>(t2)] = shorter;
      cur.swap(shorter);
    }
  }
  return std::make_shared<RhoCMeasure>(a, max_horizon, std::move(marg),
                                       "rho_c(" + c.label + ",N=" + std::to_string(max_horizon) +
                                           ")");
}

double rho_c_bound_bits(double log2_cn, int n) {
  return log2_cn + 2.0 * std::log2(static_cast<double>(n)) +
         std::log2(std::numbers::pi * std::numbers::pi / 6.0);
}

double bernoulli_rho_c_loss(double p1, int n, int k_max) {
  if (!(p1 > 0.0 && p1 < 1.0))
    fail(Errc::invalid_argument, "bernoulli_rho_c_loss: p must lie in (0,1)");
  if (k_max < n) fail(Errc::invalid_argument, "bernoulli_rho_c_loss: k_max must be >= n");
  // tables over k = 1..k_max
  std::vector<double> lcn(static_cast<size_t>(k_max) + 1, 0.0);
  for (int k = 1; k <= k_max; ++k) lcn[static_cast<size_t>(k)] = bernoulli_log2_cn(k);

  // S1[c][L]: log2 sum over k in [max(L,1), n-1] of w_k sup(k,c)/c_k
  // (the zero-tail components, whose argument keeps the same ones count).
  std::vector<std::vector<double>> s1(static_cast<size_t>(n) + 1,
                                      std::vector<double>(static_cast<size_t>(n) + 1, kNegInf));
  for (int c = 0; c <= n; ++c) {
    double acc = kNegInf;
    for (int k = n - 1; k >= 1; --k) {
      if (k >= c) {
        double term = log2_w_quadratic(k) + bernoulli_log2_sup(k, c) - lcn[static_cast<size_t>(k)];
        acc = log2_add(acc, term);
      }
      int L = std::max(k, 1);
      // acc now covers all k' >= k; store for L == k (and L == 0 uses k >= 1)
      s1[static_cast<size_t>(c)][static_cast<size_t>(L)] = acc;
    }
    s1[static_cast<size_t>(c)][0] = s1[static_cast<size_t>(c)][1];
  }

  // S2[c]: log2 sum over k in [n, k_max] of w_k marg_k(n, c)
  // with marg_k(n,c) = sum_j C(k-n, j) sup(k, c+j) / c_k.
  std::vector<double> s2(static_cast<size_t>(n) + 1, kNegInf);
  for (int c = 0; c <= n; ++c) {
    double acc = kNegInf;
    for (int k = n; k <= k_max; ++k) {
      double inner = kNegInf;
      for (int j = 0; j <= k - n; ++j)
        inner = log2_add(inner, log2_binom(k - n, j) + bernoulli_log2_sup(k, c + j));
      acc = log2_add(acc, log2_w_quadratic(k) + inner - lcn[static_cast<size_t>(k)]);
    }
    s2[static_cast<size_t>(c)] = acc;
  }

  double l0 = std::log2(1.0 - p1), l1 = std::log2(p1);
  double loss = 0.0;
  for (int c = 0; c <= n; ++c) {
    double lmu = c * l1 + (n - c) * l0;
    int l_lo = c == 0 ? 0 : c;
    int l_hi = c == 0 ? 0 : n;
    for (int L = l_lo; L <= l_hi; ++L) {
      double lcount = c == 0 ? 0.0 : log2_binom(L - 1, c - 1);
      double lrho = log2_add(s1[static_cast<size_t>(c)][static_cast<size_t>(L)],
                             s2[static_cast<size_t>(c)]);
      // sequences with the last 1 at L keep their count under every k >= L
      if (L == n) lrho = s2[static_cast<size_t>(c)];
      loss += std::exp2(lcount + lmu) * (lmu - lrho);
    }
  }
  return loss;
}

}  // namespace predlab
