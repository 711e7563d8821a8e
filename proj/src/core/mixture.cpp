#include "core/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace predlab {

namespace {

// sum_{k>=2} 1/(k log2^2 k), summed upward with an integral majorant for the
// tail so the resulting normalizer keeps the total weight <= 1.
double main_theorem_series_upper() {
  static const double value = [] {
    const long K = 1 << 21;
    double acc = 0.0;
    for (long k = 2; k <= K; ++k) {
      double l = std::log2(static_cast<double>(k));
      acc += 1.0 / (static_cast<double>(k) * l * l);
    }
    return acc + std::numbers::ln2 / std::log2(static_cast<double>(K));
  }();
  return value;
}

}  // namespace

double WeightScheme::main_theorem_normalizer() { return 0.5 / main_theorem_series_upper(); }

WeightScheme WeightScheme::main_theorem() { return WeightScheme(Kind::main_theorem, "main-theorem"); }
WeightScheme WeightScheme::quadratic() { return WeightScheme(Kind::quadratic, "quadratic"); }
WeightScheme WeightScheme::telescoping() { return WeightScheme(Kind::telescoping, "telescoping"); }
WeightScheme WeightScheme::geometric() { return WeightScheme(Kind::geometric, "geometric"); }

WeightScheme WeightScheme::custom(std::vector<double> weights) {
  WeightScheme s(Kind::custom, "custom");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) fail(Errc::invalid_argument, "weights must be positive");
    sum += w;
  }
  if (sum > 1.0 + 1e-12) fail(Errc::invalid_argument, "custom weights exceed total mass 1");
  s.custom_ = std::move(weights);
  return s;
}

double WeightScheme::weight(int k) const {
  if (k < 1) fail(Errc::invalid_argument, "weight index is 1-based");
  switch (kind_) {
    case Kind::main_theorem: {
      if (k == 1) return 0.5;
      double l = std::log2(static_cast<double>(k));
      return main_theorem_normalizer() / (static_cast<double>(k) * l * l);
    }
    case Kind::quadratic:
      return (6.0 / (std::numbers::pi * std::numbers::pi)) / (static_cast<double>(k) * k);
    case Kind::telescoping:
      return 1.0 / (static_cast<double>(k) * (k + 1.0));
    case Kind::geometric:
      return std::exp2(-static_cast<double>(k));
    case Kind::custom:
      if (static_cast<size_t>(k) > custom_.size())
        fail(Errc::invalid_argument, "custom weight index out of range");
      return custom_[static_cast<size_t>(k - 1)];
  }
  return 0.0;
}

double WeightScheme::log2_weight(int k) const {
  if (k < 1) fail(Errc::invalid_argument, "weight index is 1-based");
  // computed directly in log domain: deep ladders underflow in linear form
  switch (kind_) {
    case Kind::main_theorem: {
      if (k == 1) return -1.0;
      double l = std::log2(static_cast<double>(k));
      return std::log2(main_theorem_normalizer()) - std::log2(static_cast<double>(k)) -
             2.0 * std::log2(l);
    }
    case Kind::quadratic:
      return std::log2(6.0 / (std::numbers::pi * std::numbers::pi)) -
             2.0 * std::log2(static_cast<double>(k));
    case Kind::telescoping:
      return -std::log2(static_cast<double>(k)) - std::log2(static_cast<double>(k) + 1.0);
    case Kind::geometric:
      return -static_cast<double>(k);
    case Kind::custom:
      return std::log2(weight(k));
  }
  return kNegInf;
}

std::vector<double> WeightScheme::log2_weights(int count) const {
  std::vector<double> out(static_cast<size_t>(count));
  for (int k = 1; k <= count; ++k) out[static_cast<size_t>(k - 1)] = log2_weight(k);
  return out;
}

double WeightScheme::tail_mass_beyond(int count) const {
  switch (kind_) {
    case Kind::geometric:
      return std::exp2(-static_cast<double>(count));
    case Kind::telescoping:
      return 1.0 / (static_cast<double>(count) + 1.0);
    case Kind::quadratic: {
      double acc = 0.0;  // crude upper bound 1/count is fine for reporting
      (void)acc;
      return (6.0 / (std::numbers::pi * std::numbers::pi)) / static_cast<double>(count);
    }
    case Kind::main_theorem:
      return std::numbers::ln2 * main_theorem_normalizer() /
             std::log2(static_cast<double>(count));
    case Kind::custom:
      return 0.0;
  }
  return 0.0;
}

// --- ModelClass --------------------------------------------------------------

Alphabet ModelClass::alphabet() const {
  if (measures.empty()) fail(Errc::invalid_argument, "model class is empty");
  Alphabet a = measures.front()->alphabet();
  for (const auto& m : measures)
    if (!(m->alphabet() == a)) fail(Errc::invalid_argument, "model class mixes alphabets");
  return a;
}

ModelClass build_bernoulli_grid(int r) {
  if (r < 1) fail(Errc::invalid_argument, "bernoulli grid: r must be >= 1");
  ModelClass c;
  c.label = "bernoulli_grid(r=" + std::to_string(r) + ")";
  c.generator = "p = i/r, i = 0..r, p is the probability of symbol 0";
  for (int i = 0; i <= r; ++i)
    c.measures.push_back(make_bernoulli(static_cast<double>(i) / r));
  return c;
}

ModelClass build_markov_grid(int max_order, int r, size_t cap) {
  if (max_order < 0 || r < 1) fail(Errc::invalid_argument, "markov grid: bad parameters");
  Alphabet a{2};
  // class size check before any construction
  size_t total = 0;
  std::vector<size_t> layer_size;
  for (int k = 0; k <= max_order; ++k) {
    size_t contexts = static_cast<size_t>(1) << k;
    double sz = std::pow(static_cast<double>(r + 1), static_cast<double>(contexts));
    if (sz > static_cast<double>(cap) || total + static_cast<size_t>(sz) > cap) {
      std::ostringstream os;
      os << "markov grid: class size " << total << " + (r+1)^(2^" << k << ") = " << sz
         << " exceeds cap " << cap;
      fail(Errc::resource_limit, os.str());
    }
    layer_size.push_back(static_cast<size_t>(sz));
    total += static_cast<size_t>(sz);
  }

  ModelClass c;
  c.label = "markov_grid(K=" + std::to_string(max_order) + ",r=" + std::to_string(r) + ")";
  c.generator = "orders 0..K, binary tables with P(0|ctx) on the grid i/r";
  WeightScheme order_weights = WeightScheme::quadratic();
  for (int k = 0; k <= max_order; ++k) {
    size_t contexts = static_cast<size_t>(1) << k;
    size_t count = layer_size[static_cast<size_t>(k)];
    double lw = order_weights.log2_weight(k + 1) - std::log2(static_cast<double>(count));
    // enumerate tables as base-(r+1) numbers over contexts
    std::vector<size_t> digit(contexts, 0);
    for (size_t idx = 0; idx < count; ++idx) {
      std::vector<std::vector<double>> rows(contexts);
      for (size_t ctx = 0; ctx < contexts; ++ctx) {
        double p0 = static_cast<double>(digit[ctx]) / r;
        rows[ctx] = {p0, 1.0 - p0};
      }
      std::ostringstream label;
      label << "markov(k=" << k << ",#" << idx << ")";
      c.measures.push_back(make_markov(a, k, std::move(rows), std::nullopt, label.str()));
      c.intended_log2_weights.push_back(lw);
      for (size_t ctx = 0; ctx < contexts; ++ctx) {
        if (++digit[ctx] <= static_cast<size_t>(r)) break;
        digit[ctx] = 0;
      }
    }
  }
  return c;
}

// --- MixturePredictor --------------------------------------------------------

namespace {

class MixtureLaw : public ExchangeableLaw {
 public:
  MixtureLaw(const MixturePredictor* self, std::vector<const ExchangeableLaw*> laws)
      : self_(self),
        laws_(std::move(laws)),
        log2_total_(std::log2(self->total_prior_mass())) {}
  // renormalized, matching the process view of a truncated prior
  double log2_prob_counts(int n, std::span<const int> counts) const override {
    std::vector<double> terms(laws_.size());
    for (size_t k = 0; k < laws_.size(); ++k)
      terms[k] = self_->log2_prior(k) + laws_[k]->log2_prob_counts(n, counts);
    return log2_sum(terms) - log2_total_;
  }

 private:
  const MixturePredictor* self_;
  std::vector<const ExchangeableLaw*> laws_;
  double log2_total_;
};

}  // namespace

class MixtureState : public StepState {
 public:
  explicit MixtureState(const MixturePredictor* m) : m_(m) {
    states_.reserve(m->size());
    loglik_.assign(m->size(), 0.0);
    for (size_t k = 0; k < m->size(); ++k) states_.push_back(m->component(k)->start());
  }

  MixtureState(const MixtureState& o) : m_(o.m_), loglik_(o.loglik_) {
    states_.reserve(o.states_.size());
    for (const auto& s : o.states_) states_.push_back(s ? s->clone() : nullptr);
  }

  std::vector<double> conditional() const override {
    double norm = kNegInf;
    std::vector<double> lw(m_->size(), kNegInf);
    for (size_t k = 0; k < m_->size(); ++k) {
      if (loglik_[k] == kNegInf) continue;
      lw[k] = m_->log2_prior(k) + loglik_[k];
      norm = log2_add(norm, lw[k]);
    }
    if (norm == kNegInf)
      fail(Errc::mixture_annihilated, m_->label() + ": all posterior weights are zero");
    std::vector<double> dist(static_cast<size_t>(m_->alphabet().size), 0.0);
    for (size_t k = 0; k < m_->size(); ++k) {
      if (lw[k] == kNegInf) continue;
      double post = std::exp2(lw[k] - norm);
      std::vector<double> c = states_[k]->conditional();
      for (size_t a = 0; a < dist.size(); ++a) dist[a] += post * c[a];
    }
    return dist;
  }

  void advance(Symbol a) override {
    for (size_t k = 0; k < m_->size(); ++k) {
      if (loglik_[k] == kNegInf) continue;
      double p = states_[k]->conditional()[static_cast<size_t>(a)];
      if (p <= 0.0) {
        loglik_[k] = kNegInf;  // dropped; its state is never consulted again
        states_[k].reset();
        continue;
      }
      loglik_[k] += std::log2(p);
      states_[k]->advance(a);
    }
  }

  std::unique_ptr<StepState> clone() const override { return std::make_unique<MixtureState>(*this); }

  const std::vector<double>& loglik() const { return loglik_; }

 private:
  const MixturePredictor* m_;
  std::vector<std::unique_ptr<StepState>> states_;
  std::vector<double> loglik_;
};

MixturePredictor::MixturePredictor(std::vector<MeasurePtr> components,
                                   std::vector<double> log2_weights, std::string label,
                                   double dropped_tail)
    : ProcessMeasure(components.empty() ? Alphabet{2} : components.front()->alphabet(),
                     std::move(label)),
      components_(std::move(components)),
      log2_prior_(std::move(log2_weights)),
      dropped_tail_(dropped_tail) {
  if (components_.empty()) fail(Errc::invalid_argument, "mixture: no components");
  if (components_.size() != log2_prior_.size())
    fail(Errc::invalid_argument, "mixture: weight count mismatch");
  double mass = 0.0;
  for (size_t k = 0; k < components_.size(); ++k) {
    if (!(components_[k]->alphabet() == alphabet()))
      fail(Errc::invalid_argument, "mixture: components mix alphabets");
    if (std::isnan(log2_prior_[k]) || log2_prior_[k] > 0.0 || log2_prior_[k] == kNegInf)
      fail(Errc::invalid_argument, "mixture: weights must lie in (0,1]");
    mass += std::exp2(log2_prior_[k]);
  }
  if (mass > 1.0 + 1e-9) fail(Errc::invalid_argument, "mixture: prior mass exceeds 1");
}

std::shared_ptr<MixturePredictor> MixturePredictor::over(std::vector<MeasurePtr> components,
                                                         const WeightScheme& scheme,
                                                         std::string label) {
  int count = static_cast<int>(components.size());
  double tail = scheme.kind() == WeightScheme::Kind::custom ? 0.0 : scheme.tail_mass_beyond(count);
  return std::make_shared<MixturePredictor>(std::move(components), scheme.log2_weights(count),
                                            std::move(label), tail);
}

std::shared_ptr<MixturePredictor> MixturePredictor::over_class(const ModelClass& c,
                                                               const WeightScheme& scheme) {
  if (!c.intended_log2_weights.empty()) {
    return std::make_shared<MixturePredictor>(c.measures, c.intended_log2_weights,
                                              "mix(" + c.label + ")", 0.0);
  }
  return over(c.measures, scheme, "mix(" + c.label + "," + scheme.name() + ")");
}

double MixturePredictor::total_prior_mass() const {
  double mass = 0.0;
  for (double lw : log2_prior_) mass += std::exp2(lw);
  return mass;
}

std::vector<double> MixturePredictor::conditional(SeqView prefix) const {
  std::vector<double> lw(size(), kNegInf);
  double norm = kNegInf;
  for (size_t k = 0; k < size(); ++k) {
    double lj = components_[k]->log2_prob(prefix);
    if (lj == kNegInf) continue;
    lw[k] = log2_prior_[k] + lj;
    norm = log2_add(norm, lw[k]);
  }
  if (norm == kNegInf)
    fail(Errc::mixture_annihilated, label() + ": all posterior weights are zero");
  std::vector<double> dist(static_cast<size_t>(alphabet().size), 0.0);
  for (size_t k = 0; k < size(); ++k) {
    if (lw[k] == kNegInf) continue;
    double post = std::exp2(lw[k] - norm);
    std::vector<double> c = components_[k]->conditional(prefix);
    for (size_t a = 0; a < dist.size(); ++a) dist[a] += post * c[a];
  }
  return dist;
}

std::unique_ptr<StepState> MixturePredictor::start() const {
  return std::make_unique<MixtureState>(this);
}

const ExchangeableLaw* MixturePredictor::exchangeable() const {
  if (law_) return law_.get();
  std::vector<const ExchangeableLaw*> laws;
  laws.reserve(size());
  for (const auto& c : components_) {
    const ExchangeableLaw* l = c->exchangeable();
    if (!l) return nullptr;
    laws.push_back(l);
  }
  law_ = std::make_unique<MixtureLaw>(this, std::move(laws));
  return law_.get();
}

double MixturePredictor::log2_mass(SeqView x) const {
  std::vector<double> terms;
  terms.reserve(size());
  for (size_t k = 0; k < size(); ++k) {
    double lj = components_[k]->log2_prob(x);
    if (lj == kNegInf) continue;
    terms.push_back(log2_prior_[k] + lj);
  }
  return log2_sum(terms);  // one max extraction keeps the sum sharp
}

std::vector<double> MixturePredictor::posterior_log2(SeqView prefix) const {
  std::vector<double> lw(size(), kNegInf);
  double norm = kNegInf;
  for (size_t k = 0; k < size(); ++k) {
    double lj = components_[k]->log2_prob(prefix);
    if (lj == kNegInf) continue;
    lw[k] = log2_prior_[k] + lj;
    norm = log2_add(norm, lw[k]);
  }
  if (norm == kNegInf)
    fail(Errc::mixture_annihilated, label() + ": all posterior weights are zero");
  for (double& l : lw)
    if (l != kNegInf) l -= norm;
  return lw;
}

size_t MixturePredictor::posterior_argmax(SeqView prefix) const {
  std::vector<double> post = posterior_log2(prefix);
  size_t best = 0;
  for (size_t k = 1; k < post.size(); ++k)
    if (post[k] > post[best]) best = k;  // strict: ties stay on the lowest index
  return best;
}

double MixturePredictor::regret_vs_component(size_t k, SeqView x) const {
  if (k >= size()) fail(Errc::invalid_argument, "regret_vs_component: index out of range");
  double lmu = components_[k]->log2_prob(x);
  if (lmu == kNegInf)
    fail(Errc::invalid_argument, "regret_vs_component: component gives the sequence mass 0");
  double lmix = log2_mass(x);
  double regret = -lmix + lmu;
  if (regret > -log2_prior_[k] + 1e-9)
    fail(Errc::internal, "mixture bound violated: regret exceeds -log2 w_k");
  return regret;
}

std::shared_ptr<MixturePredictor> MixturePredictor::flattened() const {
  std::vector<MeasurePtr> comps;
  std::vector<double> lws;
  double tail = dropped_tail_;
  for (size_t k = 0; k < size(); ++k) {
    auto inner = std::dynamic_pointer_cast<const MixturePredictor>(components_[k]);
    if (!inner) {
      comps.push_back(components_[k]);
      lws.push_back(log2_prior_[k]);
      continue;
    }
    for (size_t j = 0; j < inner->size(); ++j) {
      comps.push_back(inner->component(j));
      lws.push_back(log2_prior_[k] + inner->log2_prior(j));
    }
    tail += std::exp2(log2_prior_[k]) * inner->dropped_tail();
  }
  return std::make_shared<MixturePredictor>(std::move(comps), std::move(lws),
                                            label() + "|flat", tail);
}

}  // namespace predlab
