#include <cmath>

#include "core/measure.hpp"
#include "doctest.h"
#include "oracle_helpers.hpp"

using namespace predlab;

namespace {

// sum of 2^joint over all of X^n
double total_mass(const ProcessMeasure& m, int n) {
  uint64_t cells = cell_count(m.alphabet(), n, 1u << 24);
  double acc = 0.0;
  for (uint64_t code = 0; code < cells; ++code)
    acc += exp2_safe(m.log2_prob(word_from_code(code, n, m.alphabet().size)));
  return acc;
}

double window_prob(const ProcessMeasure& m, int offset, SeqView window) {
  // P(x_{1+offset..n+offset} = window) by summing over the free head
  uint64_t heads = cell_count(m.alphabet(), offset, 1u << 24);
  double acc = 0.0;
  for (uint64_t code = 0; code < heads; ++code) {
    Seq x = word_from_code(code, offset, m.alphabet().size);
    x.insert(x.end(), window.begin(), window.end());
    acc += exp2_safe(m.log2_prob(x));
  }
  return acc;
}

}  // namespace

TEST_CASE("laplace conditionals and joints") {
  MeasurePtr l = make_laplace();
  // prefix 011: two 1s among three -> P(1) = 3/5
  std::vector<double> c = l->conditional(seq_from_string("011"));
  CHECK(c[1] == doctest::Approx(3.0 / 5.0).epsilon(1e-12));
  CHECK(c[0] == doctest::Approx(2.0 / 5.0).epsilon(1e-12));
  // joint of "11" = (1/2)(2/3) = 1/3
  CHECK(l->log2_prob(seq_from_string("11")) == doctest::Approx(std::log2(1.0 / 3.0)));
  // closed form against the oracle on every word up to n = 8
  for (int n = 1; n <= 8; ++n) {
    for (uint64_t code = 0; code < (1u << n); ++code) {
      Seq x = word_from_code(code, n, 2);
      CHECK(exp2_safe(l->log2_prob(x)) == doctest::Approx(oracle::laplace_prob(x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("bernoulli convention and joints") {
  MeasurePtr b = make_bernoulli(0.3);
  std::vector<double> c = b->conditional(seq_from_string("0110"));
  CHECK(c[0] == doctest::Approx(0.3));
  // joint of "10" under p0 = 0.3: P(1) P(0) = 0.7 * 0.3
  CHECK(b->log2_prob(seq_from_string("10")) == doctest::Approx(std::log2(0.7 * 0.3)));
  // degenerate parameter emits only symbol 0
  RngStream rng(1);
  CHECK(sample(*make_bernoulli(1.0), 4, rng) == seq_from_string("0000"));
}

TEST_CASE("uniform iid joint is -n bits") {
  MeasurePtr u = make_uniform_iid(Alphabet{2});
  CHECK(u->log2_prob(seq_from_string("011")) == doctest::Approx(-3.0));
}

TEST_CASE("dirac measures") {
  Alphabet a{2};
  MeasurePtr d = make_dirac(a, seq_from_string("0"), 0);
  std::vector<double> c = d->conditional(seq_from_string("0"));
  CHECK(c[0] == 1.0);
  CHECK(c[1] == 0.0);
  CHECK_THROWS_AS((void)d->conditional(seq_from_string("1")), Error);
  RngStream rng(7);
  MeasurePtr star = make_dirac(a, seq_from_string("01101"), 0);
  CHECK(sample(*star, 5, rng) == seq_from_string("01101"));
}

TEST_CASE("sampling is reproducible and law-of-large-numbers sane") {
  MeasurePtr b = make_bernoulli(0.5);
  RngStream r1(42), r2(42);
  Seq x = sample(*b, 100000, r1);
  Seq y = sample(*b, 100000, r2);
  CHECK(x == y);
  double zeros = 0;
  for (Symbol s : x) zeros += s == 0 ? 1 : 0;
  double freq = zeros / 100000.0;
  CHECK(freq > 0.49);
  CHECK(freq < 0.51);
}

TEST_CASE("markov basics") {
  Alphabet a{2};
  // order 0 behaves like bernoulli on every prefix
  MeasurePtr m0 = make_markov(a, 0, {{0.3, 0.7}});
  MeasurePtr b = make_bernoulli(0.3);
  for (uint64_t code = 0; code < 32; ++code) {
    Seq x = word_from_code(code, 5, 2);
    CHECK(m0->log2_prob(x) == doctest::Approx(b->log2_prob(x)).epsilon(1e-12));
  }
  // absorbing context: start at 0, stay at 0
  MeasurePtr m1 = make_markov(a, 1, {{1.0, 0.0}, {1.0, 0.0}},
                              std::vector<double>{1.0, 0.0});
  CHECK(exp2_safe(m1->log2_prob(seq_from_string("0000"))) == doctest::Approx(1.0));
  // all-fair table gives -n bits
  MeasurePtr mf = make_markov(a, 1, {{0.5, 0.5}, {0.5, 0.5}});
  CHECK(mf->log2_prob(seq_from_string("0110")) == doctest::Approx(-4.0));

  CHECK_THROWS_AS(make_markov(a, 1, {{0.5, 0.6}, {0.5, 0.5}}), Error);
}

TEST_CASE("markov stationary start is shift-invariant") {
  Alphabet a{2};
  MeasurePtr m = make_markov(a, 1, {{0.9, 0.1}, {0.2, 0.8}});
  for (uint64_t code = 0; code < 16; ++code) {
    Seq w = word_from_code(code, 4, 2);
    double base = window_prob(*m, 0, w);
    for (int off : {1, 2, 3})
      CHECK(window_prob(*m, off, w) == doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("normalization over X^n for every family") {
  std::vector<MeasurePtr> measures = {
      make_bernoulli(0.3),
      make_laplace(),
      make_kt(),
      make_uniform_iid(Alphabet{3}),
      make_markov(Alphabet{2}, 1, {{0.9, 0.1}, {0.2, 0.8}}),
      make_markov(Alphabet{2}, 2, {{0.8, 0.2}, {0.3, 0.7}, {0.5, 0.5}, {0.1, 0.9}}),
      make_dirac(Alphabet{2}, seq_from_string("0101"), 1),
      make_periodic(Alphabet{2}, seq_from_string("0011")),
  };
  for (const auto& m : measures) {
    int n = m->alphabet().size == 2 ? 10 : 7;
    CHECK_MESSAGE(total_mass(*m, n) == doctest::Approx(1.0).epsilon(1e-9), m->label());
  }
}

TEST_CASE("chain rule holds exactly in log domain") {
  std::vector<MeasurePtr> measures = {make_bernoulli(0.25), make_laplace(),
                                      make_markov(Alphabet{2}, 1, {{0.9, 0.1}, {0.2, 0.8}})};
  RngStream rng(5);
  for (const auto& m : measures) {
    Seq x = sample(*m, 12, rng);
    double direct = m->log2_prob(x);
    double acc = 0.0;
    for (size_t t = 0; t < x.size(); ++t) {
      SeqView prefix(x.data(), t);
      acc += std::log2(m->conditional(prefix)[static_cast<size_t>(x[t])]);
    }
    CHECK(direct == acc);  // same operations, same rounding
  }
}

TEST_CASE("additive smoothing count law matches sequential evaluation") {
  for (MeasurePtr m : {make_laplace(), make_kt()}) {
    const ExchangeableLaw* law = m->exchangeable();
    REQUIRE(law != nullptr);
    for (uint64_t code = 0; code < 64; ++code) {
      Seq x = word_from_code(code, 6, 2);
      int counts[2] = {0, 0};
      for (Symbol s : x) ++counts[s];
      CHECK(law->log2_prob_counts(6, counts) == doctest::Approx(m->log2_prob(x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("markov count fast path matches the sequential joint") {
  Alphabet a{2};
  auto m = std::dynamic_pointer_cast<const MarkovMeasure>(
      make_markov(a, 2, {{0.8, 0.2}, {0.3, 0.7}, {0.5, 0.5}, {0.1, 0.9}}));
  RngStream rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    Seq x = sample(*m, 40, rng);
    CountMatrix counts = markov_transition_counts(x, a, 2);
    double fast = m->log2_prob_counts(SeqView(x.data(), 2), counts);
    CHECK(fast == doctest::Approx(m->log2_prob(x)).epsilon(1e-10));
  }
}

TEST_CASE("zero probability prefixes raise undefined-conditional") {
  Alphabet a{2};
  // Markov tables define a continuation for every context, so the undefined
  // case sits in the initial phase: an impossible first symbol of an order-2
  // process whose initial law is concentrated.
  std::vector<double> init = {1.0, 0.0, 0.0, 0.0};  // x_{1..2} = 00 surely
  auto m = std::make_shared<MarkovMeasure>(
      a, 2, std::vector<std::vector<double>>{{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}},
      init, "concentrated-start");
  CHECK_THROWS_AS((void)m->conditional(seq_from_string("1")), Error);
  try {
    (void)m->conditional(seq_from_string("1"));
  } catch (const Error& e) {
    CHECK(e.code() == Errc::undefined_conditional);
  }
  // diracs raise the same error off their support
  MeasurePtr d = make_dirac(a, seq_from_string("01"), 0);
  try {
    (void)d->conditional(seq_from_string("1"));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::undefined_conditional);
  }
}

TEST_CASE("stationary context distribution fixed point") {
  Alphabet a{2};
  std::vector<std::vector<double>> rows = {{0.9, 0.1}, {0.2, 0.8}};
  std::vector<double> pi = stationary_context_distribution(a, 1, rows);
  // hand fixed point: pi0 = 0.2/(0.1+0.2)
  CHECK(pi[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  // periodic deterministic table still converges (lazy sweep)
  std::vector<double> pi2 = stationary_context_distribution(a, 1, {{0.0, 1.0}, {1.0, 0.0}});
  CHECK(pi2[0] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("entropy rate closed forms") {
  Alphabet a{2};
  auto fair = std::dynamic_pointer_cast<const MarkovMeasure>(make_markov(a, 0, {{0.5, 0.5}}));
  for (int k = 0; k <= 3; ++k) CHECK(entropy_rate(*fair, k) == doctest::Approx(1.0));
  auto bp = std::dynamic_pointer_cast<const MarkovMeasure>(make_markov(a, 0, {{0.3, 0.7}}));
  CHECK(entropy_rate(*bp, 0) == doctest::Approx(oracle::binary_entropy(0.3)).epsilon(1e-12));
  auto chain = std::dynamic_pointer_cast<const MarkovMeasure>(
      make_markov(a, 1, {{0.9, 0.1}, {0.2, 0.8}}));
  // h1 = pi0 h(0.9) + pi1 h(0.2), pi0 = 2/3
  double expect = (2.0 / 3.0) * oracle::binary_entropy(0.9) +
                  (1.0 / 3.0) * oracle::binary_entropy(0.2);
  CHECK(entropy_rate(*chain, 1) == doctest::Approx(expect).epsilon(1e-10));
  CHECK(entropy_rate(*chain, 2) <= entropy_rate(*chain, 1) + 1e-12);

  auto skew = std::make_shared<MarkovMeasure>(
      a, 1, std::vector<std::vector<double>>{{0.9, 0.1}, {0.2, 0.8}},
      std::vector<double>{0.1, 0.9}, "skew-start");
  CHECK_THROWS_AS(entropy_rate(*skew, 1), Error);
}
