#include "core/chain.hpp"

#include <cmath>
#include <numbers>

namespace predlab {

double zeta2_tail(long boundary) {
  if (boundary < 1) fail(Errc::invalid_argument, "zeta2_tail: boundary must be >= 1");
  double acc = 0.0;
  long b = boundary;
  long direct_until = boundary + 256;
  for (long j = boundary + 1; j <= direct_until; ++j) acc += 1.0 / (static_cast<double>(j) * j);
  // psi'(z) asymptotic for the remainder, z = direct_until + 1
  double z = static_cast<double>(direct_until) + 1.0;
  double inv = 1.0 / z;
  double inv2 = inv * inv;
  double rem = inv + 0.5 * inv2 + inv * inv2 / 6.0 - inv * inv2 * inv2 / 30.0 +
               inv * inv2 * inv2 * inv2 / 42.0;
  (void)b;
  return acc + rem;
}

double ChainSpec::climb_prob(long j) const {
  if (variant == Variant::stationary_plus) {
    double dj = static_cast<double>(j);
    return (dj * dj) / ((dj + 1.0) * (dj + 1.0));
  }
  return 2.0 / 3.0;
}

double ChainSpec::pi1() const {
  if (variant == Variant::stationary_plus) return 6.0 / (std::numbers::pi * std::numbers::pi);
  return 1.0 / 3.0;  // pi_0 of the reset state
}

double ChainSpec::stationary_prob(long j) const {
  if (variant == Variant::stationary_plus) {
    double dj = static_cast<double>(j);
    return pi1() / (dj * dj);
  }
  return (1.0 / 3.0) * std::pow(2.0 / 3.0, static_cast<double>(j));
}

double ChainSpec::tail_mass(long boundary) const {
  if (variant == Variant::stationary_plus) return pi1() * zeta2_tail(boundary);
  return std::pow(2.0 / 3.0, static_cast<double>(boundary) + 1.0);
}

double ChainSpec::far_reset_mass(long boundary) const {
  if (variant == Variant::stationary_plus) {
    // sum_{j>B} pi_j (1-p_j) telescopes to pi_1/(B+1)^2.
    double b1 = static_cast<double>(boundary) + 1.0;
    return pi1() / (b1 * b1);
  }
  return tail_mass(boundary) / 3.0;
}

double ChainSpec::first_return_mass(long n) const {
  if (variant != Variant::stationary_plus)
    fail(Errc::not_applicable, "first_return_mass: stationary-plus only");
  double dn = static_cast<double>(n);
  return (1.0 - (dn * dn) / ((dn + 1.0) * (dn + 1.0))) / (dn * dn);
}

double ChainSpec::pi1_via_return_series(long n_terms) const {
  if (variant != Variant::stationary_plus)
    fail(Errc::not_applicable, "pi1_via_return_series: stationary-plus only");
  // sum_n n f11(n) partial + analytic remainder zeta2_tail(N) + N/(N+1)^2.
  double s = 0.0;
  for (long n = 1; n <= n_terms; ++n) s += static_cast<double>(n) * first_return_mass(n);
  double dn = static_cast<double>(n_terms);
  s += zeta2_tail(n_terms) + dn / ((dn + 1.0) * (dn + 1.0));
  return 1.0 / s;
}

// --- ChainMeasure -----------------------------------------------------------

ChainMeasure::ChainMeasure(ChainSpec spec, Seq target_bits, Symbol tail_bit, std::string label)
    : ProcessMeasure(Alphabet{spec.variant == ChainSpec::Variant::stationary_plus ? 2 : 3},
                     std::move(label)),
      spec_(spec),
      bits_(std::move(target_bits)),
      tail_bit_(tail_bit) {
  for (Symbol b : bits_)
    if (b != 0 && b != 1) fail(Errc::invalid_argument, "chain: target bits must be 0/1");
  if (tail_bit_ != 0 && tail_bit_ != 1)
    fail(Errc::invalid_argument, "chain: tail bit must be 0/1");
  if (spec_.max_horizon < 1) fail(Errc::invalid_argument, "chain: max_horizon must be >= 1");
  explicit_boundary_ = static_cast<long>(bits_.size()) + spec_.max_horizon + 2;
  far_symbol_ = emit(explicit_boundary_ + 1);
}

Symbol ChainMeasure::target_bit(long i) const {
  if (i >= 1 && i <= static_cast<long>(bits_.size())) return bits_[static_cast<size_t>(i - 1)];
  return tail_bit_;
}

Symbol ChainMeasure::emit(long state) const {
  if (spec_.variant == ChainSpec::Variant::stationary_plus) return target_bit(state);
  if (state == 0) return 0;
  return 1 + target_bit(state);
}

Seq ChainMeasure::nominal_sequence(int n) const {
  Seq out(static_cast<size_t>(n));
  long s0 = spec_.variant == ChainSpec::Variant::stationary_plus ? 1 : 1;
  for (int t = 0; t < n; ++t) out[static_cast<size_t>(t)] = emit(s0 + t);
  return out;
}

namespace {

class ChainState : public StepState {
 public:
  explicit ChainState(const ChainMeasure* m) : m_(m), t_(0), far_alive_(true) {
    long first = m_->spec().first_state();
    long boundary = m_->explicit_boundary();
    // capacity: explicit initial states plus room for climbs over the horizon
    alpha_.assign(static_cast<size_t>(boundary - first + 1 + m_->spec().max_horizon + 2), 0.0);
    for (long j = first; j <= boundary; ++j)
      alpha_[idx(j)] = m_->spec().stationary_prob(j);
  }

  std::vector<double> conditional() const override {
    std::vector<double> inflow;
    double far_mass = 0.0;
    next_masses(inflow, far_mass);
    std::vector<double> dist(static_cast<size_t>(m_->alphabet().size), 0.0);
    long first = m_->spec().first_state();
    double total = 0.0;
    for (size_t i = 0; i < inflow.size(); ++i) {
      if (inflow[i] == 0.0) continue;
      dist[static_cast<size_t>(m_->emit(first + static_cast<long>(i)))] += inflow[i];
      total += inflow[i];
    }
    if (far_mass > 0.0) {
      dist[static_cast<size_t>(m_->far_symbol())] += far_mass;
      total += far_mass;
    }
    if (total <= 0.0)
      fail(Errc::undefined_conditional,
           m_->label() + ": conditional on a zero-probability prefix is undefined");
    for (double& p : dist) p /= total;
    return dist;
  }

  void advance(Symbol a) override {
    if (t_ >= m_->spec().max_horizon)
      fail(Errc::resource_limit,
           m_->label() + ": horizon exceeds max_horizon=" +
               std::to_string(m_->spec().max_horizon) + "; rebuild with a larger horizon");
    std::vector<double> inflow;
    double far_mass = 0.0;
    next_masses(inflow, far_mass);
    long first = m_->spec().first_state();
    for (size_t i = 0; i < inflow.size(); ++i)
      if (m_->emit(first + static_cast<long>(i)) != a) inflow[i] = 0.0;
    alpha_.swap(inflow);
    far_alive_ = far_alive_ && far_mass > 0.0 && m_->far_symbol() == a;
    ++t_;
  }

  std::unique_ptr<StepState> clone() const override { return std::make_unique<ChainState>(*this); }

 private:
  size_t idx(long state) const { return static_cast<size_t>(state - m_->spec().first_state()); }

  // Masses arriving at each state for the next time step, before the
  // emission gate. At t_ == 0 this is just the initial distribution.
  void next_masses(std::vector<double>& inflow, double& far_mass) const {
    long first = m_->spec().first_state();
    long boundary = m_->explicit_boundary();
    if (t_ == 0) {
      inflow = alpha_;
      far_mass = far_alive_ ? m_->spec().tail_mass(boundary) : 0.0;
      return;
    }
    inflow.assign(alpha_.size(), 0.0);
    double reset_in = 0.0;
    for (size_t i = 0; i < alpha_.size(); ++i) {
      double m = alpha_[i];
      if (m == 0.0) continue;
      long j = first + static_cast<long>(i);
      double p = m_->spec().climb_prob(j);
      if (i + 1 < inflow.size()) inflow[i + 1] += m * p;
      reset_in += m * (1.0 - p);
    }
    long far_boundary = boundary + t_ - 1;  // far states at time t_ sit above this
    if (far_alive_) {
      reset_in += m_->spec().far_reset_mass(far_boundary);
      far_mass = m_->spec().tail_mass(far_boundary + 1);
    } else {
      far_mass = 0.0;
    }
    inflow[idx(first)] += reset_in;
  }

  const ChainMeasure* m_;
  int t_;
  bool far_alive_;
  std::vector<double> alpha_;
};

}  // namespace

std::vector<double> ChainMeasure::conditional(SeqView prefix) const {
  auto st = start();
  for (Symbol a : prefix) st->advance(a);
  return st->conditional();
}

std::unique_ptr<StepState> ChainMeasure::start() const {
  return std::make_unique<ChainState>(this);
}

MeasurePtr make_chain_measure(const ChainSpec& spec, Seq target_bits, Symbol tail_bit) {
  std::string name = spec.variant == ChainSpec::Variant::stationary_plus
                         ? "chain_stationary_plus("
                         : "chain_hidden_markov(";
  name += seq_to_string(target_bits) + "|" + std::to_string(tail_bit) + ")";
  return std::make_shared<ChainMeasure>(spec, std::move(target_bits), tail_bit, std::move(name));
}

}  // namespace predlab
