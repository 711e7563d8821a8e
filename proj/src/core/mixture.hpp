#pragma once

#include <memory>
#include <string>
#include <vector>

#include "core/measure.hpp"

namespace predlab {

// Prior weight ladders used throughout. Countable schemes are truncated to a
// finite support by the caller; the dropped tail is reported and the prior is
// never renormalized, so -log2 w_k penalties stay literally true.
class WeightScheme {
 public:
  enum class Kind { main_theorem, quadratic, telescoping, geometric, custom };

  static WeightScheme main_theorem();  // w_1 = 1/2, w_k = w / (k log2^2 k)
  static WeightScheme quadratic();     // w_k = (6/pi^2) / k^2
  static WeightScheme telescoping();   // w_k = 1 / (k (k+1))
  static WeightScheme geometric();     // w_k = 2^-k
  static WeightScheme custom(std::vector<double> weights);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double weight(int k) const;  // k is 1-based
  double log2_weight(int k) const;
  std::vector<double> log2_weights(int count) const;
  double tail_mass_beyond(int count) const;
  // Normalizer w of the main-theorem ladder (also appears in the cover bound).
  static double main_theorem_normalizer();

 private:
  WeightScheme(Kind k, std::string name) : kind_(k), name_(std::move(name)) {}
  Kind kind_;
  std::string name_;
  std::vector<double> custom_;
};

// A finite, indexed family of process measures standing for a model class.
struct ModelClass {
  std::string label;
  std::vector<MeasurePtr> measures;
  std::string generator;  // grid resolution / orders, free-form metadata
  std::vector<double> intended_log2_weights;  // optional, per measure

  Alphabet alphabet() const;
  size_t size() const { return measures.size(); }
};

inline constexpr size_t kDefaultClassCap = 300000;

// Bernoulli(i/r), i = 0..r, with p the probability of symbol 0.
ModelClass build_bernoulli_grid(int r);

// All binary Markov tables of order k <= max_order with conditionals on the
// grid {i/r}; intended weights are quadratic over the order times uniform
// within an order.
ModelClass build_markov_grid(int max_order, int r, size_t cap = kDefaultClassCap);

// Weighted combination sum_k w_k mu_k with a log-domain Bayesian posterior.
class MixturePredictor : public ProcessMeasure {
 public:
  MixturePredictor(std::vector<MeasurePtr> components, std::vector<double> log2_weights,
                   std::string label, double dropped_tail = 0.0);

  static std::shared_ptr<MixturePredictor> over(std::vector<MeasurePtr> components,
                                                const WeightScheme& scheme, std::string label);
  static std::shared_ptr<MixturePredictor> over_class(const ModelClass& c,
                                                      const WeightScheme& scheme);

  size_t size() const { return components_.size(); }
  const MeasurePtr& component(size_t k) const { return components_[k]; }
  double log2_prior(size_t k) const { return log2_prior_[k]; }
  double dropped_tail() const { return dropped_tail_; }
  double total_prior_mass() const;

  // Exact-recompute path: per-component joints evaluated from scratch.
  std::vector<double> conditional(SeqView prefix) const override;
  // Incremental path: one conditional per component per step.
  std::unique_ptr<StepState> start() const override;
  const ExchangeableLaw* exchangeable() const override;

  // Un-renormalized mixture mass log2 sum_k w_k mu_k(x). When the truncated
  // prior sums below 1 this lies below the chain-rule joint log2_prob (the
  // process view renormalizes at the first step); the ladder bounds
  // -log2 mass(x) <= -log2 w_k - log2 mu_k(x) are stated for this quantity.
  double log2_mass(SeqView x) const;

  // Normalized posterior log2-weights after the prefix (exponentials sum to 1).
  std::vector<double> posterior_log2(SeqView prefix) const;
  size_t posterior_argmax(SeqView prefix) const;  // ties to the lowest index

  // -log2 mix(x) + log2 mu_k(x); asserts the <= -log2 w_k contract.
  double regret_vs_component(size_t k, SeqView x) const;

  // Mixture-of-mixtures flattening with product weights.
  std::shared_ptr<MixturePredictor> flattened() const;

 private:
  friend class MixtureState;
  std::vector<MeasurePtr> components_;
  std::vector<double> log2_prior_;
  double dropped_tail_;
  mutable std::unique_ptr<ExchangeableLaw> law_;  // built lazily when eligible
};

}  // namespace predlab
