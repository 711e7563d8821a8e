#pragma once

#include <functional>

#include "core/loss.hpp"

namespace predlab {

// --- impossibility-of-uniform-prediction search ------------------------------

// Greedy adversarial sequence against an arbitrary predictor: each step picks
// the symbol with the smallest predicted probability (ties to the lowest
// symbol), forcing pathwise loss >= n log2|X| bits after n steps.
Seq adversarial_sequence(const ProcessMeasure& rho, int n);

// --- lower-bound mechanism over eventually-zero sequences --------------------

// The class of Dirac measures on binary sequences that are 0 from some point
// on, enumerated as: index 1 = the all-zeros sequence, then for each k >= 1
// the 2^{k-1} sequences whose last 1 sits at position k, in lexicographic
// order of the first k-1 bits. Telescoping prior w_i = 1/(i(i+1)).
struct LbSearchResult {
  int n = 0;
  long depth = 0;          // sequences with last 1 beyond `depth` are truncated away
  double prior_tail = 0.0; // truncated prior mass
  double w_s = 0.0;        // prior mass on sequences that are 0 from position n on
  double nu_min_log2 = 0.0;
  Seq argmin;              // length-n prefix with x_n = 1 minimizing the mixture mass
  double claim_log2 = 0.0; // 2^{-n} (1 - W_s), the counting bound
  double regret = 0.0;     // -log2 nu(argmin) - n, vs the fair-coin reference
  double regret_floor = 0.0;  // -log2(1 - W_s)
  bool pass = false;
};

LbSearchResult lb_search(int n, long depth);

// --- middle-case family -------------------------------------------------------

// gamma'_t: follows the target with probability 2/3 per step while on the
// target prefix; off the target it is a fair coin.
MeasurePtr make_tracking_measure(Seq target_pattern, Symbol tail);

// --- suboptimality of Bayesian combinations ----------------------------------

struct SuboptimalBayesParams {
  double p = 0.3;       // target frequency of symbol 1 (p in (0, 1/2))
  int n = 2000;
  int support = 200;    // sampled support sequences representing the class
  int seeds = 50;
  uint64_t seed = 1;
  int band_from = 10;   // frequency band |freq_t - p| <= log2(t)/sqrt(t) enforced from here
  bool smooth = true;   // mix the Bayesian with the uniform i.i.d. to keep losses finite
};

struct SuboptimalBayesResult {
  double h_p = 0.0;
  double bayes_mean = 0.0, bayes_se = 0.0;  // per-step loss of the Bayesian, U-averaged
  double rho_mean = 0.0, rho_se = 0.0;      // per-step loss of the tripartite predictor
  int rejected_draws = 0;
};

SuboptimalBayesResult suboptimal_bayes_experiment(const SuboptimalBayesParams& params);

// Ternary i.i.d. over {0,1,2} with P(1) = p, P(0) = 1-p, P(2) = 0.
MeasurePtr make_binary_in_ternary(double p1);
// Mixture over all "a then all 2s" Diracs, w_a = 2^{-(|a|+1)} 3^{-|a|};
// closed-form joint 6^{-m} on 2-free prefixes.
MeasurePtr make_all_twos_closure();
// The tripartite predictor (beta_p + uniform + closure)/3.
MeasurePtr make_tripartite_rho(double p1);

// --- weights-matter example ---------------------------------------------------

struct WeightsMatterResult {
  int n = 0;
  double loss_quadratic = 0.0;   // -log2 sum_{k>=n} w_k, quadratic ladder
  double loss_geometric = 0.0;   // exactly n-1 for the 2^-k ladder
  double direct_quadratic = 0.0; // same values recomputed from the ladder alone
  double direct_geometric = 0.0;
};

WeightsMatterResult weights_matter(int n, int k_max);

// --- contamination constructions ---------------------------------------------

// mu = Dirac(1...), rho(x_t = 1) = t/(t+1) independently, chi follows 1s but
// collapses at t = 2^{2^k}. Closed-form contaminated conditional at those
// steps; the sequence tends to 0.
struct NosumAdPoint {
  long n = 0;
  double conditional = 0.0;      // (rho+chi)/2 (x_n = 1 | 1^{n-1})
  double closed_form_bound = 0.0;  // (1/(n+1) + 2/n) / (1/n + 2/sqrt(n))
};
std::vector<NosumAdPoint> nosum_ad_points(int k_max);
MeasurePtr make_nosum_ad_rho();
MeasurePtr make_nosum_ad_chi(int k_max);

// mu fair coin; rho fair except P(1)=0 at t = k^2; chi i.i.d. with P(1)=1/3.
struct NosumAvadPathResult {
  bool diverged = false;
  long divergence_step = 0;
  double abar_final = 0.0;
  bool persistent = false;  // abar_m >= 1/4 for all checked m >= N0
};
NosumAvadPathResult nosum_avad_path(int n, uint64_t seed);

// mu = Dirac(1...), rho emits 1 surely except P(1) = 1/2 at sparse steps 4^k.
struct NodomResult {
  std::vector<double> delta_at_spikes;  // conditional KL at each spike, = 1 bit
  bool dominance_ok = false;
  double c_log2_at_horizon = 0.0;
};
NodomResult nodom_check(int k_max);

// --- dominance with decreasing coefficients ------------------------------------

enum class DominanceClass { bounded_below, subexponential, square_summable, failing };

std::string dominance_class_name(DominanceClass c);

struct DominanceCert {
  bool passed = false;
  DominanceClass condition_class = DominanceClass::failing;
  int horizon = 0;
  double min_slack_bits = 0.0;  // min over checked prefixes of log2 rho - log2 c_n mu
  Seq violation_witness;
  std::vector<Seq> equality_witnesses;  // |slack| <= 1e-9
};

// Verifies rho(x_{1..n}) >= c_n mu(x_{1..n}) pointwise; exhaustive over all
// prefixes up to the horizon, or along sampled mu-paths.
DominanceCert dominance_check(const ProcessMeasure& rho, const ProcessMeasure& mu,
                              const std::function<double(int)>& log2_cn, int horizon,
                              DominanceClass declared, bool exhaustive, int sample_paths = 0,
                              uint64_t seed = 0);

struct DominanceConsequence {
  bool applicable = false;
  bool pass = false;
  double lhs = 0.0, rhs = 0.0;
  std::vector<double> median_dbar;  // square-summable mode: medians per horizon
};

// subexponential: (1/n)L_n(mu,rho) <= (1/n)log2 c_n^{-1} + eps, exact method.
// square-summable: sampled-path dbar_n decreasing in median across horizons.
DominanceConsequence dominance_consequence_check(const DominanceCert& cert,
                                                 const ProcessMeasure& rho,
                                                 const ProcessMeasure& mu,
                                                 const std::function<double(int)>& log2_cn,
                                                 int n, Method method, int reps, uint64_t seed,
                                                 const std::vector<int>& horizons = {});

// Synthetic pair for the square-summable regime: mu is a fair coin and rho
// leaks probability toward symbol 1 on a budget whose running total is
// F(n) = max_{m<=n} sqrt(m)/log2(m+1); half of each step's budget is spent
// only after observing a 1, making the divergence path-dependent.
// Dominance holds with c_n = 2^-F(n).
MeasurePtr make_leaky_coin(int max_horizon);
double leaky_coin_log2_cn(int n);

}  // namespace predlab
