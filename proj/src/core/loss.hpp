#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/mixture.hpp"

namespace predlab {

enum class Method { enumerate, binomial, monte_carlo };

std::string method_name(Method m);

struct MonteCarloParams {
  int replicas = 100;
  uint64_t seed = 0;
  int threads = 1;
};

struct KlValue {
  double bits = 0.0;       // L_n, may be +inf
  double std_error = 0.0;  // 0 for exact methods
  Method method = Method::enumerate;
};

// Per-step conditional KL divergence delta(mu, rho | prefix) in bits.
// Conventions: 0 log 0/q = 0; p > 0 with q = 0 gives +inf.
double kl_step(const ProcessMeasure& mu, const ProcessMeasure& rho, SeqView prefix);

// L_n(mu, rho) = sum_x mu(x) log2(mu(x)/rho(x)) over X^n.
//   enumerate: exact, |X|^n capped at 2^24 cells;
//   binomial:  exact via counts, requires both families to declare a count
//              law and a binary alphabet;
//   monte_carlo: pathwise log-ratio average with replica standard error.
KlValue expected_cumulative_kl(const ProcessMeasure& mu, const ProcessMeasure& rho, int n,
                               Method method, const MonteCarloParams& mc = {});

struct WorstCaseLoss {
  double bits_per_step = 0.0;
  size_t argmax = 0;
  std::string caveat = "finite-class, finite-n surrogate";
};

WorstCaseLoss worst_case_loss(const ModelClass& c, const ProcessMeasure& rho, int n,
                              Method method, const MonteCarloParams& mc = {});

// (1/n)(L_n(nu, rho) - L_n(nu, mu)): finite-n empirical regret of rho against
// the expert mu on data from nu.
KlValue regret_rate(const ProcessMeasure& nu, const ProcessMeasure& mu,
                    const ProcessMeasure& rho, int n, Method method,
                    const MonteCarloParams& mc = {});

struct TVReport {
  int horizon = 0;
  double value = 0.0;  // in [0,1]; 1 when the conditioning prefix has mass 0
  bool prefix_degenerate = false;
};

// Exact half-L1 distance between the two conditional laws over m-step
// cylinders; lower-bounds the sup over the full future sigma-field.
TVReport tv_conditional(const ProcessMeasure& mu, const ProcessMeasure& rho, SeqView prefix,
                        int m);

struct DinfReport {
  int horizon = 0;
  double value = 0.0;  // +inf when one measure vanishes where the other does not
  bool infinite = false;
  Seq witness;
};

// Finite-horizon sup over X^n of (1/n)|log2 mu1(x)/mu2(x)|, log 0/0 := 0.
DinfReport d_inf(const ProcessMeasure& mu1, const ProcessMeasure& mu2, int n);

// Per-step divergence series along one path.
struct LossReport {
  std::string mu_label, rho_label;
  std::string method;
  uint64_t seed = 0;
  Seq path;
  std::vector<double> delta;  // conditional KL per step, bits
  std::vector<double> a;      // absolute distance per step
  std::vector<double> dbar;   // running average of delta
  std::vector<double> abar;   // running average of a
  std::vector<double> cum_logloss;  // cumulative log2 mu(x_t|.)/rho(x_t|.)
};

LossReport trace_path(const ProcessMeasure& mu, const ProcessMeasure& rho, SeqView x);

struct PinskerVerdict {
  bool pass = true;
  int witness_step = -1;  // 1-based step of the first violation
  double lhs = 0.0, rhs = 0.0;
};

// a_t^2 <= 2 ln2 delta_t and abar_n^2 <= 2 ln2 dbar_n, bit-corrected.
PinskerVerdict pinsker_check(const LossReport& report);

// Enumeration helper shared by the exact evaluators: visits every x in X^n
// with both log2 probabilities. Descents where both measures already have
// mass 0 are pruned; with mu_weighted set, subtrees with mu-mass 0 are
// skipped too (their mu-weighted contribution vanishes).
void for_each_cell(const ProcessMeasure& mu, const ProcessMeasure& rho, int n, bool mu_weighted,
                   const std::function<void(SeqView, double, double)>& visit,
                   uint64_t cap = 1u << 24);

}  // namespace predlab
