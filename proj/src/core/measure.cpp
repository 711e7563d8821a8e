#include "core/measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace predlab {

namespace {

constexpr double kDistTol = 0x1.0p-40;

std::string format_param(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Replays the pure conditional(prefix) interface.
class ReplayState : public StepState {
 public:
  ReplayState(const ProcessMeasure* m, Seq prefix) : m_(m), prefix_(std::move(prefix)) {}
  std::vector<double> conditional() const override { return m_->conditional(prefix_); }
  void advance(Symbol a) override { prefix_.push_back(a); }
  std::unique_ptr<StepState> clone() const override {
    return std::make_unique<ReplayState>(m_, prefix_);
  }

 private:
  const ProcessMeasure* m_;
  Seq prefix_;
};

}  // namespace

void check_distribution(const Alphabet& a, std::vector<double>& v, const std::string& who) {
  if (static_cast<int>(v.size()) != a.size)
    fail(Errc::invalid_argument, who + ": distribution has wrong arity");
  double sum = 0.0;
  for (double& p : v) {
    if (std::isnan(p)) fail(Errc::invalid_argument, who + ": NaN probability");
    if (p < 0.0) {
      if (p < -kDistTol) fail(Errc::invalid_argument, who + ": negative probability");
      p = 0.0;
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kDistTol * std::max(1.0, sum))
    fail(Errc::invalid_argument, who + ": probabilities do not sum to 1");
}

std::unique_ptr<StepState> ProcessMeasure::start() const {
  return std::make_unique<ReplayState>(this, Seq{});
}

double ProcessMeasure::log2_prob(SeqView x) const {
  auto st = start();
  double acc = 0.0;
  for (Symbol a : x) {
    check_symbol(alphabet_, a);
    std::vector<double> c = st->conditional();
    double p = c[static_cast<size_t>(a)];
    if (p <= 0.0) return kNegInf;
    acc += std::log2(p);
    st->advance(a);
  }
  return acc;
}

Seq sample(const ProcessMeasure& m, int n, RngStream& rng) {
  if (n < 0) fail(Errc::invalid_argument, "sample: negative length");
  Seq out;
  out.reserve(static_cast<size_t>(n));
  auto st = m.start();
  for (int t = 0; t < n; ++t) {
    std::vector<double> c = st->conditional();
    Symbol a = rng.pick(c);
    out.push_back(a);
    st->advance(a);
  }
  return out;
}

// --- IidMeasure -------------------------------------------------------------

namespace {
class IidState : public StepState {
 public:
  explicit IidState(const std::vector<double>* probs) : probs_(probs) {}
  std::vector<double> conditional() const override { return *probs_; }
  void advance(Symbol) override {}
  std::unique_ptr<StepState> clone() const override { return std::make_unique<IidState>(probs_); }

 private:
  const std::vector<double>* probs_;
};
}  // namespace

IidMeasure::IidMeasure(Alphabet a, std::vector<double> probs, std::string label)
    : ProcessMeasure(a, std::move(label)), probs_(std::move(probs)) {
  check_distribution(alphabet(), probs_, this->label());
  law_.self = this;
}

std::vector<double> IidMeasure::conditional(SeqView) const { return probs_; }

std::unique_ptr<StepState> IidMeasure::start() const { return std::make_unique<IidState>(&probs_); }

double IidMeasure::Law::log2_prob_counts(int n, std::span<const int> counts) const {
  (void)n;
  double acc = 0.0;
  for (size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    double p = self->probs_[i];
    if (p <= 0.0) return kNegInf;
    acc += counts[i] * std::log2(p);
  }
  return acc;
}

MeasurePtr make_bernoulli(double p0) {
  if (p0 < 0.0 || p0 > 1.0) fail(Errc::invalid_argument, "bernoulli: p must lie in [0,1]");
  return std::make_shared<IidMeasure>(Alphabet{2}, std::vector<double>{p0, 1.0 - p0},
                                      "bernoulli(" + format_param(p0) + ")");
}

MeasurePtr make_uniform_iid(Alphabet a) {
  std::vector<double> probs(static_cast<size_t>(a.size), 1.0 / a.size);
  return std::make_shared<IidMeasure>(a, std::move(probs),
                                      "uniform(" + std::to_string(a.size) + ")");
}

// --- DiracMeasure -----------------------------------------------------------

DiracMeasure::DiracMeasure(Alphabet a, Seq pattern, Symbol tail, bool repeat, std::string label)
    : ProcessMeasure(a, std::move(label)),
      pattern_(std::move(pattern)),
      tail_(tail),
      repeat_(repeat) {
  for (Symbol s : pattern_) check_symbol(a, s);
  if (!repeat_) check_symbol(a, tail_);
  if (repeat_ && pattern_.empty()) fail(Errc::invalid_argument, "dirac: empty cycle pattern");
}

Symbol DiracMeasure::target(size_t t) const {
  if (repeat_) return pattern_[t % pattern_.size()];
  return t < pattern_.size() ? pattern_[t] : tail_;
}

Seq DiracMeasure::target_prefix(int n) const {
  Seq out(static_cast<size_t>(n));
  for (int t = 0; t < n; ++t) out[static_cast<size_t>(t)] = target(static_cast<size_t>(t));
  return out;
}

std::vector<double> DiracMeasure::conditional(SeqView prefix) const {
  for (size_t t = 0; t < prefix.size(); ++t) {
    if (prefix[t] != target(t))
      fail(Errc::undefined_conditional,
           label() + ": conditional on a zero-probability prefix is undefined");
  }
  std::vector<double> c(static_cast<size_t>(alphabet().size), 0.0);
  c[static_cast<size_t>(target(prefix.size()))] = 1.0;
  return c;
}

namespace {
class DiracState : public StepState {
 public:
  DiracState(const DiracMeasure* m, size_t t, bool dead) : m_(m), t_(t), dead_(dead) {}
  std::vector<double> conditional() const override {
    if (dead_)
      fail(Errc::undefined_conditional,
           m_->label() + ": conditional on a zero-probability prefix is undefined");
    std::vector<double> c(static_cast<size_t>(m_->alphabet().size), 0.0);
    c[static_cast<size_t>(m_->target(t_))] = 1.0;
    return c;
  }
  void advance(Symbol a) override {
    if (!dead_ && a != m_->target(t_)) dead_ = true;
    ++t_;
  }
  std::unique_ptr<StepState> clone() const override {
    return std::make_unique<DiracState>(m_, t_, dead_);
  }

 private:
  const DiracMeasure* m_;
  size_t t_;
  bool dead_;
};
}  // namespace

std::unique_ptr<StepState> DiracMeasure::start() const {
  return std::make_unique<DiracState>(this, 0, false);
}

MeasurePtr make_dirac(const Alphabet& a, Seq pattern, Symbol tail) {
  std::string label = "dirac(" + seq_to_string(pattern) + "|" + std::to_string(tail) + "...)";
  return std::make_shared<DiracMeasure>(a, std::move(pattern), tail, false, std::move(label));
}

MeasurePtr make_dirac_repeat(const Alphabet& a, Seq pattern) {
  std::string label = "dirac_cycle(" + seq_to_string(pattern) + ")";
  return std::make_shared<DiracMeasure>(a, std::move(pattern), 0, true, std::move(label));
}

// --- AdditiveSmoothingMeasure -----------------------------------------------

AdditiveSmoothingMeasure::AdditiveSmoothingMeasure(Alphabet a, double alpha, std::string label)
    : ProcessMeasure(a, std::move(label)), alpha_(alpha) {
  if (!(alpha > 0.0)) fail(Errc::invalid_argument, "additive smoothing: alpha must be positive");
  law_.self = this;
}

std::vector<double> AdditiveSmoothingMeasure::conditional(SeqView prefix) const {
  std::vector<double> c(static_cast<size_t>(alphabet().size), 0.0);
  for (Symbol s : prefix) c[static_cast<size_t>(s)] += 1.0;
  double denom = static_cast<double>(prefix.size()) + alpha_ * alphabet().size;
  for (double& p : c) p = (p + alpha_) / denom;
  return c;
}

namespace {
class CountState : public StepState {
 public:
  CountState(const AdditiveSmoothingMeasure* m, std::vector<int64_t> counts, int64_t n)
      : m_(m), counts_(std::move(counts)), n_(n) {}
  std::vector<double> conditional() const override {
    std::vector<double> c(counts_.size());
    double denom = static_cast<double>(n_) + m_->alpha() * m_->alphabet().size;
    for (size_t i = 0; i < counts_.size(); ++i)
      c[i] = (static_cast<double>(counts_[i]) + m_->alpha()) / denom;
    return c;
  }
  void advance(Symbol a) override {
    ++counts_[static_cast<size_t>(a)];
    ++n_;
  }
  std::unique_ptr<StepState> clone() const override {
    return std::make_unique<CountState>(m_, counts_, n_);
  }

 private:
  const AdditiveSmoothingMeasure* m_;
  std::vector<int64_t> counts_;
  int64_t n_;
};
}  // namespace

std::unique_ptr<StepState> AdditiveSmoothingMeasure::start() const {
  return std::make_unique<CountState>(this, std::vector<int64_t>(alphabet().size, 0), 0);
}

double AdditiveSmoothingMeasure::Law::log2_prob_counts(int n, std::span<const int> counts) const {
  // prod_t (count-so-far + alpha) / (t - 1 + alpha m): order-independent.
  double alpha = self->alpha_;
  int m = self->alphabet().size;
  double acc = 0.0;
  for (int t = 0; t < n; ++t) acc -= std::log2(t + alpha * m);
  for (size_t i = 0; i < counts.size(); ++i)
    for (int j = 0; j < counts[i]; ++j) acc += std::log2(j + alpha);
  return acc;
}

MeasurePtr make_laplace(Alphabet a) {
  return std::make_shared<AdditiveSmoothingMeasure>(a, 1.0, "laplace(" + std::to_string(a.size) + ")");
}

MeasurePtr make_kt(Alphabet a) {
  return std::make_shared<AdditiveSmoothingMeasure>(a, 0.5, "kt(" + std::to_string(a.size) + ")");
}

// --- StepwiseIidMeasure -----------------------------------------------------

StepwiseIidMeasure::StepwiseIidMeasure(Alphabet a,
                                       std::function<std::vector<double>(int64_t)> law,
                                       std::string label)
    : ProcessMeasure(a, std::move(label)), law_(std::move(law)) {}

std::vector<double> StepwiseIidMeasure::law_at(int64_t t) const {
  std::vector<double> c = law_(t);
  check_distribution(alphabet(), c, label());
  return c;
}

std::vector<double> StepwiseIidMeasure::conditional(SeqView prefix) const {
  return law_at(static_cast<int64_t>(prefix.size()) + 1);
}

namespace {
class StepwiseState : public StepState {
 public:
  StepwiseState(const StepwiseIidMeasure* m, int64_t t) : m_(m), t_(t) {}
  std::vector<double> conditional() const override { return m_->law_at(t_ + 1); }
  void advance(Symbol) override { ++t_; }
  std::unique_ptr<StepState> clone() const override {
    return std::make_unique<StepwiseState>(m_, t_);
  }

 private:
  const StepwiseIidMeasure* m_;
  int64_t t_;
};
}  // namespace

std::unique_ptr<StepState> StepwiseIidMeasure::start() const {
  return std::make_unique<StepwiseState>(this, 0);
}

// --- MarkovMeasure ----------------------------------------------------------

namespace {
size_t context_count(const Alphabet& a, int order) {
  uint64_t c = 1;
  for (int i = 0; i < order; ++i) {
    c *= static_cast<uint64_t>(a.size);
    if (c > (1u << 24)) fail(Errc::resource_limit, "markov: context space too large");
  }
  return static_cast<size_t>(c);
}
}  // namespace

MarkovMeasure::MarkovMeasure(Alphabet a, int order, std::vector<std::vector<double>> rows,
                             std::vector<double> initial, std::string label)
    : ProcessMeasure(a, std::move(label)),
      order_(order),
      rows_(std::move(rows)),
      initial_(std::move(initial)),
      stationary_start_(false) {
  if (order < 0) fail(Errc::invalid_argument, "markov: negative order");
  size_t nctx = context_count(a, order);
  if (rows_.size() != nctx) fail(Errc::invalid_argument, "markov: table has wrong row count");
  for (auto& r : rows_) check_distribution(a, r, this->label());
  if (initial_.size() != nctx)
    fail(Errc::invalid_argument, "markov: initial law has wrong arity");
  double sum = 0.0;
  for (double p : initial_) {
    if (p < 0.0) fail(Errc::invalid_argument, "markov: negative initial probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) fail(Errc::invalid_argument, "markov: initial law must sum to 1");

  // Is the supplied initial law invariant under one context-chain sweep?
  std::vector<double> next(nctx, 0.0);
  for (size_t c = 0; c < nctx; ++c) {
    if (initial_[c] == 0.0) continue;
    for (int s = 0; s < a.size; ++s) {
      size_t c2 = (c * static_cast<size_t>(a.size) + static_cast<size_t>(s)) % nctx;
      next[c2] += initial_[c] * rows_[c][static_cast<size_t>(s)];
    }
  }
  double drift = 0.0;
  for (size_t c = 0; c < nctx; ++c) drift += std::abs(next[c] - initial_[c]);
  stationary_start_ = (order == 0) || drift <= 1e-9;
}

std::vector<double> MarkovMeasure::conditional(SeqView prefix) const {
  int t = static_cast<int>(prefix.size());
  int m = alphabet().size;
  if (t >= order_) {
    SeqView ctx = prefix.subspan(prefix.size() - static_cast<size_t>(order_));
    return rows_[static_cast<size_t>(word_code(ctx, m))];
  }
  // Marginal of the initial joint law of the first `order_` symbols.
  size_t block = 1;
  for (int i = 0; i < order_ - t - 1; ++i) block *= static_cast<size_t>(m);
  std::vector<double> c(static_cast<size_t>(m), 0.0);
  double denom = 0.0;
  uint64_t base = word_code(prefix, m);
  for (int s = 0; s < m; ++s) {
    uint64_t lo = (base * static_cast<uint64_t>(m) + static_cast<uint64_t>(s)) * block;
    double mass = 0.0;
    for (size_t j = 0; j < block; ++j) mass += initial_[static_cast<size_t>(lo) + j];
    c[static_cast<size_t>(s)] = mass;
    denom += mass;
  }
  if (denom <= 0.0)
    fail(Errc::undefined_conditional,
         label() + ": conditional on a zero-probability prefix is undefined");
  for (double& p : c) p /= denom;
  return c;
}

namespace {
class MarkovState : public StepState {
 public:
  MarkovState(const MarkovMeasure* m, Seq head, size_t ctx) : m_(m), head_(std::move(head)), ctx_(ctx) {}
  std::vector<double> conditional() const override {
    if (static_cast<int>(head_.size()) < m_->order()) return m_->conditional(head_);
    return m_->rows()[ctx_];
  }
  void advance(Symbol a) override {
    int m = m_->alphabet().size;
    if (static_cast<int>(head_.size()) < m_->order()) {
      head_.push_back(a);
      if (static_cast<int>(head_.size()) == m_->order())
        ctx_ = static_cast<size_t>(word_code(head_, m));
    } else if (m_->order() > 0) {
      size_t nctx = m_->rows().size();
      ctx_ = (ctx_ * static_cast<size_t>(m) + static_cast<size_t>(a)) % nctx;
      head_.push_back(a);  // head only grows until order; keep size bounded
      if (static_cast<int>(head_.size()) > m_->order()) head_.erase(head_.begin());
    }
  }
  std::unique_ptr<StepState> clone() const override {
    return std::make_unique<MarkovState>(m_, head_, ctx_);
  }

 private:
  const MarkovMeasure* m_;
  Seq head_;
  size_t ctx_;
};
}  // namespace

std::unique_ptr<StepState> MarkovMeasure::start() const {
  return std::make_unique<MarkovState>(this, Seq{}, 0);
}

double MarkovMeasure::log2_prob_counts(SeqView first_k, const CountMatrix& counts) const {
  double acc;
  if (order_ == 0) {
    acc = 0.0;
  } else {
    if (static_cast<int>(first_k.size()) != order_)
      fail(Errc::invalid_argument, "log2_prob_counts: head has wrong length");
    double p0 = initial_[static_cast<size_t>(word_code(first_k, alphabet().size))];
    if (p0 <= 0.0) return kNegInf;
    acc = std::log2(p0);
  }
  for (size_t c = 0; c < counts.size(); ++c) {
    for (size_t s = 0; s < counts[c].size(); ++s) {
      int64_t k = counts[c][s];
      if (k == 0) continue;
      double p = rows_[c][s];
      if (p <= 0.0) return kNegInf;
      acc += static_cast<double>(k) * std::log2(p);
    }
  }
  return acc;
}

std::vector<double> stationary_context_distribution(
    const Alphabet& a, int order, const std::vector<std::vector<double>>& rows) {
  size_t nctx = context_count(a, order);
  if (rows.size() != nctx) fail(Errc::invalid_argument, "stationary: wrong row count");
  std::vector<double> pi(nctx, 1.0 / static_cast<double>(nctx));
  std::vector<double> next(nctx);
  // Lazy sweep pi <- (pi + T pi)/2: same fixed points, converges even for
  // periodic context chains.
  for (int iter = 0; iter < 100000; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (size_t c = 0; c < nctx; ++c) {
      if (pi[c] == 0.0) continue;
      for (int s = 0; s < a.size; ++s) {
        size_t c2 = (c * static_cast<size_t>(a.size) + static_cast<size_t>(s)) % nctx;
        next[c2] += pi[c] * rows[c][static_cast<size_t>(s)];
      }
    }
    double sum = 0.0;
    for (size_t c = 0; c < nctx; ++c) {
      next[c] = 0.5 * (next[c] + pi[c]);
      sum += next[c];
    }
    for (double& p : next) p /= sum;
    double diff = 0.0;
    for (size_t c = 0; c < nctx; ++c) diff += std::abs(next[c] - pi[c]);
    pi.swap(next);
    if (diff <= 1e-12) break;
  }
  return pi;
}

MeasurePtr make_markov(const Alphabet& a, int order, std::vector<std::vector<double>> rows,
                       std::optional<std::vector<double>> initial, std::string label) {
  std::vector<double> init =
      initial ? std::move(*initial) : stationary_context_distribution(a, order, rows);
  if (label.empty()) label = "markov(k=" + std::to_string(order) + ")";
  return std::make_shared<MarkovMeasure>(a, order, std::move(rows), std::move(init),
                                         std::move(label));
}

CountMatrix markov_transition_counts(SeqView x, const Alphabet& a, int order) {
  size_t nctx = context_count(a, order);
  CountMatrix counts(nctx, std::vector<int64_t>(static_cast<size_t>(a.size), 0));
  if (static_cast<int>(x.size()) <= order) return counts;
  uint64_t ctx = word_code(x.subspan(0, static_cast<size_t>(order)), a.size);
  for (size_t t = static_cast<size_t>(order); t < x.size(); ++t) {
    ++counts[static_cast<size_t>(ctx)][static_cast<size_t>(x[t])];
    if (order > 0)
      ctx = (ctx * static_cast<uint64_t>(a.size) + static_cast<uint64_t>(x[t])) %
            static_cast<uint64_t>(nctx);
  }
  return counts;
}

// --- periodic ---------------------------------------------------------------

namespace {
// Uniform mixture over phase shifts of one cycle.
class PeriodicMeasure : public ProcessMeasure {
 public:
  PeriodicMeasure(Alphabet a, Seq pattern)
      : ProcessMeasure(a, "periodic(" + seq_to_string(pattern) + ")"), pattern_(std::move(pattern)) {}

  std::vector<double> conditional(SeqView prefix) const override {
    size_t period = pattern_.size();
    std::vector<double> c(static_cast<size_t>(alphabet().size), 0.0);
    int alive = 0;
    for (size_t off = 0; off < period; ++off) {
      bool ok = true;
      for (size_t t = 0; t < prefix.size() && ok; ++t)
        ok = pattern_[(off + t) % period] == prefix[t];
      if (!ok) continue;
      ++alive;
      c[static_cast<size_t>(pattern_[(off + prefix.size()) % period])] += 1.0;
    }
    if (alive == 0)
      fail(Errc::undefined_conditional,
           label() + ": conditional on a zero-probability prefix is undefined");
    for (double& p : c) p /= alive;
    return c;
  }

 private:
  Seq pattern_;
};
}  // namespace

MeasurePtr make_periodic(const Alphabet& a, Seq pattern) {
  if (pattern.empty()) fail(Errc::invalid_argument, "periodic: empty pattern");
  for (Symbol s : pattern) check_symbol(a, s);
  return std::make_shared<PeriodicMeasure>(a, std::move(pattern));
}

// --- entropy rate -----------------------------------------------------------

double entropy_rate(const MarkovMeasure& m, int k) {
  if (k < 0) fail(Errc::invalid_argument, "entropy_rate: negative k");
  if (!m.stationary_start())
    fail(Errc::invalid_argument, "entropy_rate: measure does not have a stationary start");
  uint64_t cells = cell_count(m.alphabet(), k + 1, 1u << 24);
  double h = 0.0;
  for (uint64_t code = 0; code < cells; ++code) {
    Seq block = word_from_code(code, k + 1, m.alphabet().size);
    double ljoint = m.log2_prob(block);
    if (ljoint == kNegInf) continue;
    double lhead = m.log2_prob(SeqView(block).subspan(0, static_cast<size_t>(k)));
    h -= std::exp2(ljoint) * (ljoint - lhead);
  }
  return h;
}

}  // namespace predlab
