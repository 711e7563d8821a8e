#pragma once

#include "core/mixture.hpp"

namespace predlab {

// Per-horizon normalized maximum likelihood over a class: per-sequence
// suprema c_x, normalizer c_n, and the distribution lambda = c_x / c_n.
// The family of lambdas over n is not a process measure; the pathology
// evaluator below exhibits a negative conditional divergence.
struct NmlTable {
  int n = 0;
  Alphabet alphabet;
  std::vector<double> log2_cx;  // indexed by word code
  double log2_cn = 0.0;

  double log2_lambda(uint64_t code) const {
    double cx = log2_cx[static_cast<size_t>(code)];
    return cx == kNegInf ? kNegInf : cx - log2_cn;
  }
};

NmlTable nml_table(const ModelClass& c, int n, uint64_t cap = 1u << 24);

// Analytic suprema for the binary i.i.d. family.
double bernoulli_log2_sup(int n, int ones);
double bernoulli_log2_cn(int n);

// The four-measure, two-step class whose conditional NML estimate lies below
// one of its members: d_2(mu_3(.|0), lambda(.|0)) = log2(3/4) < 0.
ModelClass nml_negative_example_class();
double nml_conditional_pathology();

// Mixture patch rho_c = sum_k w_k mu_k, w_k = (6/pi^2)/k^2, where mu_k runs
// the horizon-k NML table for k steps and then emits zeros.
MeasurePtr build_rho_c(const ModelClass& c, int max_horizon, uint64_t cap = 1u << 24);

// Exact L_n(Bernoulli(p1), rho_c) for the analytic binary i.i.d. family,
// grouping sequences by (ones count, last-one position). Components beyond
// k_max are dropped, which only raises the returned value, so upper-bound
// verdicts remain valid.
double bernoulli_rho_c_loss(double p1, int n, int k_max);

// Right side of the mixture-patch guarantee, per-sequence-total bits:
// log2 c_n + 2 log2 n + log2(pi^2/6).
double rho_c_bound_bits(double log2_cn, int n);

}  // namespace predlab
