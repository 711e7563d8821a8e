#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core/alphabet.hpp"
#include "core/logdomain.hpp"
#include "core/rng.hpp"

namespace predlab {

// Per-path evaluator over a growing prefix. Measures with nontrivial state
// (chains, mixtures) override ProcessMeasure::start() with an O(1)-advance
// implementation; the default replays conditional(prefix).
class StepState {
 public:
  virtual ~StepState() = default;
  // Next-symbol distribution given the prefix consumed so far. Throws
  // Errc::undefined_conditional on zero-probability histories that carry no
  // declared continuation.
  virtual std::vector<double> conditional() const = 0;
  virtual void advance(Symbol a) = 0;
  virtual std::unique_ptr<StepState> clone() const = 0;
};

// Log-probability of a length-n word as a function of symbol counts only.
// Families declare exchangeability by implementing this; it is never inferred.
class ExchangeableLaw {
 public:
  virtual ~ExchangeableLaw() = default;
  virtual double log2_prob_counts(int n, std::span<const int> counts) const = 0;
};

// A stochastic process on X^inf exposed through exact conditional
// next-symbol distributions; serves as both data source and predictor.
class ProcessMeasure {
 public:
  ProcessMeasure(Alphabet a, std::string label) : alphabet_(a), label_(std::move(label)) {}
  virtual ~ProcessMeasure() = default;

  const Alphabet& alphabet() const { return alphabet_; }
  const std::string& label() const { return label_; }

  virtual std::vector<double> conditional(SeqView prefix) const = 0;
  virtual std::unique_ptr<StepState> start() const;

  // Declared count-statistic law, when the family has one.
  virtual const ExchangeableLaw* exchangeable() const { return nullptr; }

  // Chain rule in log domain: the sum of conditional log2 factors.
  // Returns -inf as soon as a factor is 0, without consuming the rest.
  double log2_prob(SeqView x) const;

 private:
  Alphabet alphabet_;
  std::string label_;
};

using MeasurePtr = std::shared_ptr<const ProcessMeasure>;

// Validates that v is a distribution over the alphabet within 2^-40 relative
// tolerance and clamps tiny negative rounding residue.
void check_distribution(const Alphabet& a, std::vector<double>& v, const std::string& who);

Seq sample(const ProcessMeasure& m, int n, RngStream& rng);

// --- basic families ---------------------------------------------------------

// I.i.d. with a fixed next-symbol distribution.
class IidMeasure : public ProcessMeasure {
 public:
  IidMeasure(Alphabet a, std::vector<double> probs, std::string label);
  std::vector<double> conditional(SeqView prefix) const override;
  std::unique_ptr<StepState> start() const override;
  const ExchangeableLaw* exchangeable() const override { return &law_; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  struct Law : ExchangeableLaw {
    const IidMeasure* self;
    double log2_prob_counts(int n, std::span<const int> counts) const override;
  };
  std::vector<double> probs_;
  Law law_;
};

// Bernoulli(p): binary i.i.d. with p the probability of symbol 0.
MeasurePtr make_bernoulli(double p0);
MeasurePtr make_uniform_iid(Alphabet a);

// Deterministic measure concentrated on one sequence: an explicit pattern
// followed either by a constant tail symbol or by cyclic repetition.
class DiracMeasure : public ProcessMeasure {
 public:
  DiracMeasure(Alphabet a, Seq pattern, Symbol tail, bool repeat, std::string label);
  std::vector<double> conditional(SeqView prefix) const override;
  std::unique_ptr<StepState> start() const override;
  Symbol target(size_t t) const;
  Seq target_prefix(int n) const;

 private:
  Seq pattern_;
  Symbol tail_;
  bool repeat_;
};

MeasurePtr make_dirac(const Alphabet& a, Seq pattern, Symbol tail = 0);
MeasurePtr make_dirac_repeat(const Alphabet& a, Seq pattern);

// Additive smoothing estimator: P(a|x) = (count_a + alpha) / (n + alpha |X|).
// alpha = 1 is the add-one rule, alpha = 1/2 the Krichevsky-Trofimov rule.
class AdditiveSmoothingMeasure : public ProcessMeasure {
 public:
  AdditiveSmoothingMeasure(Alphabet a, double alpha, std::string label);
  std::vector<double> conditional(SeqView prefix) const override;
  std::unique_ptr<StepState> start() const override;
  const ExchangeableLaw* exchangeable() const override { return &law_; }
  double alpha() const { return alpha_; }

 private:
  struct Law : ExchangeableLaw {
    const AdditiveSmoothingMeasure* self;
    double log2_prob_counts(int n, std::span<const int> counts) const override;
  };
  double alpha_;
  Law law_;
};

MeasurePtr make_laplace(Alphabet a = Alphabet{2});
MeasurePtr make_kt(Alphabet a = Alphabet{2});

// Independent steps with a step-indexed next-symbol law (not identically
// distributed). Used by the contamination and dominance constructions.
class StepwiseIidMeasure : public ProcessMeasure {
 public:
  StepwiseIidMeasure(Alphabet a, std::function<std::vector<double>(int64_t t)> law,
                     std::string label);
  std::vector<double> conditional(SeqView prefix) const override;
  std::unique_ptr<StepState> start() const override;
  std::vector<double> law_at(int64_t t) const;  // t is 1-based

 private:
  std::function<std::vector<double>(int64_t)> law_;
};

// --- finite-memory family ---------------------------------------------------

using CountMatrix = std::vector<std::vector<int64_t>>;  // [context][symbol]

class MarkovMeasure : public ProcessMeasure {
 public:
  // rows: one next-symbol distribution per context code (|X|^k rows);
  // initial: joint law of the first k symbols, indexed by word code.
  MarkovMeasure(Alphabet a, int order, std::vector<std::vector<double>> rows,
                std::vector<double> initial, std::string label);

  std::vector<double> conditional(SeqView prefix) const override;
  std::unique_ptr<StepState> start() const override;

  int order() const { return order_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  const std::vector<double>& initial() const { return initial_; }
  bool stationary_start() const { return stationary_start_; }

  // log2 prob of a path from its transition count matrix plus the first-k
  // word; the fast path for scoring large Markov classes.
  double log2_prob_counts(SeqView first_k, const CountMatrix& counts) const;

 private:
  int order_;
  std::vector<std::vector<double>> rows_;
  std::vector<double> initial_;
  bool stationary_start_;
};

// Stationary law of the context chain by renormalized power iteration
// (tol 1e-12, at most 1e5 sweeps). For reducible chains this returns one
// stationary law without any uniqueness claim.
std::vector<double> stationary_context_distribution(const Alphabet& a, int order,
                                                    const std::vector<std::vector<double>>& rows);

MeasurePtr make_markov(const Alphabet& a, int order, std::vector<std::vector<double>> rows,
                       std::optional<std::vector<double>> initial = std::nullopt,
                       std::string label = "");

CountMatrix markov_transition_counts(SeqView x, const Alphabet& a, int order);

// Uniform mixture over the cyclic shifts of a pattern; stationary.
MeasurePtr make_periodic(const Alphabet& a, Seq pattern);

// k-order conditional Shannon entropy h_k = -E log2 mu(x_{k+1} | x_{1..k}),
// exact from stationary block probabilities. Requires a stationary start.
double entropy_rate(const MarkovMeasure& m, int k);

}  // namespace predlab
