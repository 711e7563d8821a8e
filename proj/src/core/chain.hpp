#pragma once

#include <memory>
#include <string>
#include <vector>

#include "core/measure.hpp"

namespace predlab {

// Countable-state upward-walk chains with reset, emitting a deterministic
// symbol per state. Two variants:
//
//   stationary-plus: states 1,2,...; from j climb to j+1 with p_j = j^2/(j+1)^2,
//     reset to 1 otherwise; pi_j = pi_1/j^2 with pi_1 = 6/pi^2. State j emits
//     the j-th symbol of a target binary sequence.
//
//   hidden-markov: states 0,1,...; climb with constant 2/3, reset to 0;
//     pi_k = (1/3)(2/3)^k. State 0 emits 'a' (symbol 0), state k emits the
//     k-th target bit mapped to symbols {1,2}.
//
// The forward evaluation is exact: states above an explicit boundary are
// carried as one analytic ledger (their emissions are constant there and the
// tail sums telescope), so the reported probabilities have no truncation gap
// beyond float rounding.
struct ChainSpec {
  enum class Variant { stationary_plus, hidden_markov };

  Variant variant = Variant::stationary_plus;
  int max_horizon = 64;  // queries beyond this are rejected

  long first_state() const { return variant == Variant::stationary_plus ? 1 : 0; }
  double climb_prob(long j) const;
  double stationary_prob(long j) const;  // closed-form pi_j
  double pi1() const;
  // Total stationary mass on states above boundary (exclusive).
  double tail_mass(long boundary) const;
  // Mass flowing from above the boundary into the reset state in one step.
  double far_reset_mass(long boundary) const;

  // stationary-plus only: first-return mass to state 1 in exactly n steps.
  double first_return_mass(long n) const;
  // Oracle for pi_1 via 1/sum(n * f11(n)); partial sum to n_terms plus an
  // analytic tail correction (remaining error far below 1e-10).
  double pi1_via_return_series(long n_terms) const;
};

// sum_{j > boundary} 1/j^2 to machine precision.
double zeta2_tail(long boundary);

class ChainMeasure : public ProcessMeasure {
 public:
  // target_bits/tail_bit define the driving 0/1 sequence (pattern then
  // constant tail).
  ChainMeasure(ChainSpec spec, Seq target_bits, Symbol tail_bit, std::string label);

  std::vector<double> conditional(SeqView prefix) const override;
  std::unique_ptr<StepState> start() const override;

  const ChainSpec& spec() const { return spec_; }
  Symbol emit(long state) const;
  long explicit_boundary() const { return explicit_boundary_; }
  Symbol far_symbol() const { return far_symbol_; }

  // The observable sequence the chain was built around (what the straight
  // climb from the lowest emitting state produces).
  Seq nominal_sequence(int n) const;

 private:
  friend class ChainState;
  Symbol target_bit(long i) const;  // 1-based index into bits
  ChainSpec spec_;
  Seq bits_;
  Symbol tail_bit_;
  long explicit_boundary_;  // states <= boundary are explicit
  Symbol far_symbol_;
};

MeasurePtr make_chain_measure(const ChainSpec& spec, Seq target_bits, Symbol tail_bit = 0);

}  // namespace predlab
