#include <cmath>
#include <numbers>

#include "core/chain.hpp"
#include "doctest.h"
#include "oracle_helpers.hpp"

using namespace predlab;

TEST_CASE("chain spec closed forms") {
  ChainSpec sp;
  sp.variant = ChainSpec::Variant::stationary_plus;
  CHECK(sp.pi1() == doctest::Approx(6.0 / (std::numbers::pi * std::numbers::pi)).epsilon(1e-15));
  // first-return mass: (1 - n^2/(n+1)^2)/n^2
  CHECK(sp.first_return_mass(3) == doctest::Approx((1.0 - 9.0 / 16.0) / 9.0).epsilon(1e-15));
  // pi1 via the return-time series summed with the analytic tail
  CHECK(std::abs(sp.pi1_via_return_series(100000) - sp.pi1()) <= 1e-10);
  // stationarity: pi_{j+1} = pi_j p_j and total mass 1
  double total = 0.0;
  for (long j = 1; j <= 2000; ++j) total += sp.stationary_prob(j);
  total += sp.tail_mass(2000);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  for (long j : {1L, 5L, 17L})
    CHECK(sp.stationary_prob(j) * sp.climb_prob(j) ==
          doctest::Approx(sp.stationary_prob(j + 1)).epsilon(1e-14));

  ChainSpec hm;
  hm.variant = ChainSpec::Variant::hidden_markov;
  double total2 = 0.0;
  for (long j = 0; j <= 100; ++j) total2 += hm.stationary_prob(j);
  total2 += hm.tail_mass(100);
  CHECK(total2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zeta2 tail matches direct summation") {
  double direct = 0.0;
  for (long j = 11; j <= 4000000; ++j) direct += 1.0 / (static_cast<double>(j) * j);
  CHECK(zeta2_tail(10) == doctest::Approx(direct + 1.0 / 4000000.5).epsilon(1e-10));
}

TEST_CASE("stationary-plus forward evaluation against the path oracle") {
  ChainSpec sp;
  sp.variant = ChainSpec::Variant::stationary_plus;
  sp.max_horizon = 8;
  Seq bits = seq_from_string("011010");
  MeasurePtr mu = make_chain_measure(sp, bits, 0);

  oracle::ChainPathOracle path;
  path.pi = [&](long j) { return sp.stationary_prob(j); };
  path.climb = [&](long j) { return sp.climb_prob(j); };
  path.reset_state = 1;
  path.emit = [&](long j) {
    return j <= static_cast<long>(bits.size()) ? bits[static_cast<size_t>(j - 1)] : 0;
  };

  const long j_cap = 3000;
  double tail = sp.tail_mass(j_cap);
  for (uint64_t code = 0; code < 64; ++code) {
    Seq y = word_from_code(code, 6, 2);
    double exact = exp2_safe(mu->log2_prob(y));
    double brute = path.prob(y, j_cap);
    // the oracle truncates the initial state, so it is a lower bound with a
    // gap at most the dropped stationary mass
    CHECK(exact >= brute - 1e-12);
    CHECK(exact <= brute + tail + 1e-12);
  }
}

TEST_CASE("hidden-markov forward evaluation against the path oracle") {
  ChainSpec sp;
  sp.variant = ChainSpec::Variant::hidden_markov;
  sp.max_horizon = 8;
  Seq bits = seq_from_string("0110");
  MeasurePtr mu = make_chain_measure(sp, bits, 1);

  oracle::ChainPathOracle path;
  path.pi = [&](long j) { return sp.stationary_prob(j); };
  path.climb = [&](long) { return 2.0 / 3.0; };
  path.reset_state = 0;
  path.emit = [&](long j) {
    if (j == 0) return 0;
    int bit = j <= static_cast<long>(bits.size()) ? bits[static_cast<size_t>(j - 1)] : 1;
    return 1 + bit;
  };

  const long j_cap = 200;  // geometric tail ~ (2/3)^200
  for (uint64_t code = 0; code < 729; ++code) {
    Seq y = word_from_code(code, 6, 3);
    double exact = exp2_safe(mu->log2_prob(y));
    double brute = path.prob(y, j_cap);
    CHECK(exact == doctest::Approx(brute).epsilon(1e-10));
  }
}

TEST_CASE("chain measures are normalized over X^n") {
  ChainSpec sp;
  sp.variant = ChainSpec::Variant::stationary_plus;
  sp.max_horizon = 12;
  MeasurePtr mu = make_chain_measure(sp, seq_from_string("0110100110"), 0);
  double acc = 0.0;
  for (uint64_t code = 0; code < (1u << 10); ++code)
    acc += exp2_safe(mu->log2_prob(word_from_code(code, 10, 2)));
  CHECK(acc == doctest::Approx(1.0).epsilon(1e-9));

  ChainSpec hm;
  hm.variant = ChainSpec::Variant::hidden_markov;
  hm.max_horizon = 8;
  MeasurePtr mt = make_chain_measure(hm, seq_from_string("0101"), 0);
  double acc2 = 0.0;
  for (uint64_t code = 0; code < 2187; ++code)
    acc2 += exp2_safe(mt->log2_prob(word_from_code(code, 7, 3)));
  CHECK(acc2 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("stationary-plus tracking bound on its own sequence") {
  ChainSpec sp;
  sp.variant = ChainSpec::Variant::stationary_plus;
  sp.max_horizon = 32;
  RngStream rng(3);
  for (int rep = 0; rep < 3; ++rep) {
    Seq x(30);
    for (auto& b : x) b = rng.next_unit() < 0.5 ? 0 : 1;
    MeasurePtr mu = make_chain_measure(sp, x, 0);
    for (int n : {5, 10, 20, 30}) {
      double neg = -mu->log2_prob(SeqView(x.data(), static_cast<size_t>(n)));
      double bound = -std::log2(sp.pi1()) + 2.0 * std::log2(n + 1.0);
      CHECK(neg <= bound + 1e-9);
    }
  }
}

TEST_CASE("hidden-markov rate on its own output") {
  ChainSpec sp;
  sp.variant = ChainSpec::Variant::hidden_markov;
  sp.max_horizon = 32;
  RngStream rng(11);
  Seq bits(30);
  for (auto& b : bits) b = rng.next_unit() < 0.5 ? 0 : 1;
  auto mu = std::dynamic_pointer_cast<const ChainMeasure>(make_chain_measure(sp, bits, 0));
  Seq t = mu->nominal_sequence(30);
  double neg = -mu->log2_prob(t);
  CHECK(std::abs(neg - 30.0 * std::log2(1.5)) <= 3.0);
}

TEST_CASE("horizon guard names the limit") {
  ChainSpec sp;
  sp.variant = ChainSpec::Variant::stationary_plus;
  sp.max_horizon = 4;
  MeasurePtr mu = make_chain_measure(sp, seq_from_string("0101"), 0);
  Seq long_word(10, 0);
  CHECK_THROWS_AS((void)mu->log2_prob(long_word), Error);
}
