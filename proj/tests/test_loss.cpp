#include <cmath>

#include "core/adversarial.hpp"
#include "core/loss.hpp"
#include "doctest.h"
#include "oracle_helpers.hpp"

using namespace predlab;

TEST_CASE("kl_step examples") {
  MeasurePtr b = make_bernoulli(0.3);
  CHECK(kl_step(*b, *b, {}) == doctest::Approx(0.0));
  // Bernoulli(1/2) vs Bernoulli(1/4): 0.5 log2(2) + 0.5 log2(2/3)
  double expect = 0.5 * std::log2(0.5 / 0.25) + 0.5 * std::log2(0.5 / 0.75);
  CHECK(kl_step(*make_bernoulli(0.5), *make_bernoulli(0.25), {}) ==
        doctest::Approx(expect).epsilon(1e-12));
  // Dirac(1...) against the n/(n+1) follower: delta_n = log2((n+1)/n)
  MeasurePtr mu = make_dirac(Alphabet{2}, Seq{}, 1);
  MeasurePtr rho = make_nosum_ad_rho();
  Seq prefix;
  for (int n = 1; n <= 6; ++n) {
    CHECK(kl_step(*mu, *rho, prefix) ==
          doctest::Approx(std::log2((n + 1.0) / n)).epsilon(1e-12));
    prefix.push_back(1);
  }
  // one-sided support gives +inf
  CHECK(kl_step(*mu, *make_bernoulli(1.0), {}) == kPosInf);
}

TEST_CASE("expected cumulative KL: methods agree") {
  MeasurePtr mu = make_bernoulli(0.3);
  MeasurePtr rho = make_laplace();
  for (int n : {1, 4, 8}) {
    double a = expected_cumulative_kl(*mu, *rho, n, Method::enumerate).bits;
    double b = expected_cumulative_kl(*mu, *rho, n, Method::binomial).bits;
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
    double c = oracle::brute_kl(
        [&](SeqView x) { return oracle::iid_prob(0.3, x); },
        [&](SeqView x) { return oracle::laplace_prob(x); }, n);
    CHECK(a == doctest::Approx(c).epsilon(1e-9));
  }
  KlValue mc = expected_cumulative_kl(*mu, *rho, 64, Method::monte_carlo, {400, 5, 2});
  double exact = expected_cumulative_kl(*mu, *rho, 64, Method::binomial).bits;
  CHECK(std::abs(mc.bits - exact) <= 5.0 * std::max(mc.std_error, 1e-6));
  // thread count shifts wall time only, never the value
  KlValue mc1 = expected_cumulative_kl(*mu, *rho, 64, Method::monte_carlo, {400, 5, 1});
  KlValue mc3 = expected_cumulative_kl(*mu, *rho, 64, Method::monte_carlo, {400, 5, 3});
  CHECK(mc1.bits == mc3.bits);
  CHECK(mc1.std_error == mc3.std_error);
}

TEST_CASE("expected cumulative KL closed forms") {
  // identical measures
  MeasurePtr mu = make_bernoulli(0.4);
  CHECK(expected_cumulative_kl(*mu, *mu, 8, Method::enumerate).bits ==
        doctest::Approx(0.0).epsilon(1e-12));
  // Bernoulli(p) vs Bernoulli(q): n h(p, q) exactly
  MeasurePtr q = make_bernoulli(0.7);
  for (int n : {1, 5, 9}) {
    CHECK(expected_cumulative_kl(*mu, *q, n, Method::enumerate).bits ==
          doctest::Approx(n * oracle::bernoulli_divergence(0.4, 0.7)).epsilon(1e-10));
  }
  // any Dirac against the fair coin loses exactly n bits
  MeasurePtr d = make_dirac(Alphabet{2}, seq_from_string("0110"), 1);
  CHECK(expected_cumulative_kl(*d, *make_bernoulli(0.5), 10, Method::enumerate).bits ==
        doctest::Approx(10.0));
  // nonnegativity with equality only for agreeing measures (spot exhaustive)
  CHECK(expected_cumulative_kl(*mu, *make_bernoulli(0.41), 6, Method::enumerate).bits > 0.0);
}

TEST_CASE("binomial method eligibility is declared, not inferred") {
  MeasurePtr markov = make_markov(Alphabet{2}, 1, {{0.9, 0.1}, {0.2, 0.8}});
  CHECK_THROWS_AS(expected_cumulative_kl(*markov, *make_laplace(), 4, Method::binomial), Error);
}

TEST_CASE("mixtures of count-law families keep the count law") {
  auto mix = MixturePredictor::over(build_bernoulli_grid(4).measures, WeightScheme::quadratic(),
                                    "grid4");
  REQUIRE(mix->exchangeable() != nullptr);
  double a = expected_cumulative_kl(*make_bernoulli(0.3), *mix, 8, Method::binomial).bits;
  double b = expected_cumulative_kl(*make_bernoulli(0.3), *mix, 8, Method::enumerate).bits;
  CHECK(a == doctest::Approx(b).epsilon(1e-9));
}

TEST_CASE("worst case loss over a class") {
  ModelClass c;
  c.label = "test";
  c.measures = {make_bernoulli(0.5), make_bernoulli(0.9)};
  MeasurePtr rho = make_bernoulli(0.5);
  WorstCaseLoss w = worst_case_loss(c, *rho, 6, Method::enumerate);
  CHECK(w.argmax == 1);
  CHECK(w.bits_per_step == doctest::Approx(oracle::bernoulli_divergence(0.9, 0.5)).epsilon(1e-10));

  // all Diracs against the fair coin: exactly one bit per step
  ModelClass diracs;
  diracs.label = "diracs";
  for (uint64_t code = 0; code < 16; ++code)
    diracs.measures.push_back(make_dirac(Alphabet{2}, word_from_code(code, 4, 2), 0));
  WorstCaseLoss wd = worst_case_loss(diracs, *rho, 4, Method::enumerate);
  CHECK(wd.bits_per_step == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("typical-frequency dirac class against its source rate") {
  // Diracs on 20 sequences sampled from Bernoulli(p0 = 2/3) (ones rate 1/3):
  // per-step pathwise loss against that source concentrates near h(1/3)
  int n = 5000;
  MeasurePtr src = make_bernoulli(2.0 / 3.0);
  ModelClass c;
  c.label = "typical";
  RngStream rng(21);
  for (int i = 0; i < 20; ++i) c.measures.push_back(make_dirac(Alphabet{2}, sample(*src, n, rng), 0));
  double worst = 0.0;
  for (const auto& mu : c.measures) {
    const auto* d = dynamic_cast<const DiracMeasure*>(mu.get());
    double loss = -src->log2_prob(d->target_prefix(n)) / n;
    worst = std::max(worst, loss);
  }
  CHECK(std::abs(worst - oracle::binary_entropy(1.0 / 3.0)) <= 0.03);
}

TEST_CASE("regret rate") {
  MeasurePtr nu = make_bernoulli(0.4);
  MeasurePtr mu = make_bernoulli(0.3);
  CHECK(regret_rate(*nu, *mu, *mu, 6, Method::enumerate).bits == doctest::Approx(0.0));
  auto mix = MixturePredictor::over(build_bernoulli_grid(5).measures,
                                    WeightScheme::telescoping(), "grid5");
  // mixture regret against any contained expert is at most -log2(w_k)/n
  for (size_t k = 0; k < mix->size(); ++k) {
    double r = regret_rate(*nu, *mix->component(k), *mix, 8, Method::enumerate).bits;
    CHECK(r <= -mix->log2_prior(k) / 8.0 + 1e-9);
  }
}

TEST_CASE("conditional total variation") {
  MeasurePtr b5 = make_bernoulli(0.5);
  CHECK(tv_conditional(*b5, *b5, {}, 6).value == doctest::Approx(0.0));
  // hand value at m = 1: |0.5 - 0.1| = 0.4
  CHECK(tv_conditional(*b5, *make_bernoulli(0.1), {}, 1).value == doctest::Approx(0.4));
  // monotone in the horizon for the singular pair
  double prev = 0.0;
  for (int m : {1, 3, 5, 8, 11}) {
    double v = tv_conditional(*b5, *make_bernoulli(0.1), {}, m).value;
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
  // zero-probability conditioning prefix pins the distance at 1
  MeasurePtr d = make_dirac(Alphabet{2}, seq_from_string("0000"), 0);
  TVReport r = tv_conditional(*d, *b5, seq_from_string("1"), 3);
  CHECK(r.value == 1.0);
  CHECK(r.prefix_degenerate);
}

TEST_CASE("d_inf reports") {
  MeasurePtr m1 = make_bernoulli(0.3);
  CHECK(d_inf(*m1, *m1, 6).value == doctest::Approx(0.0));
  DinfReport r = d_inf(*m1, *make_bernoulli(0.6), 6);
  // extreme word is constant; (1/n)|log ratio| = |log2(p/q)| or the 1-side
  double expect = std::max(std::abs(std::log2(0.3 / 0.6)), std::abs(std::log2(0.7 / 0.4)));
  CHECK(r.value == doctest::Approx(expect).epsilon(1e-12));
  CHECK(!r.infinite);
  // symmetry on random pairs plus the triangle inequality
  DinfReport ab = d_inf(*m1, *make_bernoulli(0.5), 8);
  DinfReport ba = d_inf(*make_bernoulli(0.5), *m1, 8);
  CHECK(ab.value == doctest::Approx(ba.value).epsilon(1e-12));
  DinfReport ac = d_inf(*m1, *make_bernoulli(0.8), 8);
  DinfReport cb = d_inf(*make_bernoulli(0.8), *make_bernoulli(0.5), 8);
  CHECK(ac.value <= ab.value + cb.value + 1e-12);
  // diverging Diracs are flagged infinite at the first split
  DinfReport inf = d_inf(*make_dirac(Alphabet{2}, seq_from_string("0000"), 1),
                         *make_dirac(Alphabet{2}, Seq{}, 0), 9);
  CHECK(inf.infinite);
  CHECK(inf.value == kPosInf);
}

TEST_CASE("trace and pinsker") {
  MeasurePtr mu = make_bernoulli(1.0);
  MeasurePtr rho = make_bernoulli(0.5);
  Seq x(8, 0);
  LossReport rep = trace_path(*mu, *rho, x);
  CHECK(rep.delta[0] == doctest::Approx(1.0));
  CHECK(rep.a[0] == doctest::Approx(1.0));
  // a = 1, delta = 1 bit: 1 <= 2 ln2
  PinskerVerdict v = pinsker_check(rep);
  CHECK(v.pass);
  CHECK(rep.dbar.back() == doctest::Approx(1.0));
  // dbar is the running mean of delta
  double acc = 0.0;
  for (size_t t = 0; t < rep.delta.size(); ++t) {
    acc += rep.delta[t];
    CHECK(rep.dbar[t] == doctest::Approx(acc / (t + 1)).epsilon(1e-12));
  }
  // zero divergence forces zero distance
  LossReport same = trace_path(*rho, *rho, x);
  for (double d : same.delta) CHECK(d == doctest::Approx(0.0));
  for (double a : same.a) CHECK(a == doctest::Approx(0.0));
}

TEST_CASE("chain-rule identity for the expected KL") {
  // expectation-of-conditional form equals the likelihood-ratio form
  MeasurePtr mu = make_markov(Alphabet{2}, 1, {{0.9, 0.1}, {0.2, 0.8}});
  MeasurePtr rho = make_kt();
  int n = 8;
  double lr_form = expected_cumulative_kl(*mu, *rho, n, Method::enumerate).bits;
  double cond_form = 0.0;
  for (int t = 0; t < n; ++t) {
    uint64_t cells = cell_count(Alphabet{2}, t, 1u << 24);
    for (uint64_t code = 0; code < cells; ++code) {
      Seq prefix = word_from_code(code, t, 2);
      double lp = mu->log2_prob(prefix);
      if (lp == kNegInf) continue;
      cond_form += exp2_safe(lp) * kl_step(*mu, *rho, prefix);
    }
  }
  CHECK(lr_form == doctest::Approx(cond_form).epsilon(1e-9));
}

TEST_CASE("contamination keeps expected average KL within one bit") {
  MeasurePtr mu = make_bernoulli(0.3);
  MeasurePtr rho = make_laplace();
  MeasurePtr chi = make_bernoulli(0.95);
  auto mixed = std::make_shared<MixturePredictor>(std::vector<MeasurePtr>{rho, chi},
                                                  std::vector<double>{-1.0, -1.0}, "mix");
  for (int n : {2, 5, 8}) {
    double before = expected_cumulative_kl(*mu, *rho, n, Method::enumerate).bits;
    double after = expected_cumulative_kl(*mu, *mixed, n, Method::enumerate).bits;
    CHECK(after <= before + 1.0 + 1e-9);
  }
}

TEST_CASE("infinities poison rather than saturate") {
  MeasurePtr mu = make_dirac(Alphabet{2}, Seq{}, 1);
  MeasurePtr rho = make_bernoulli(1.0);  // no mass on ones
  CHECK(expected_cumulative_kl(*mu, *rho, 4, Method::enumerate).bits == kPosInf);
}
