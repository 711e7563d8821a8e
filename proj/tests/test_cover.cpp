#include <cmath>

#include "core/cover.hpp"
#include "core/loss.hpp"
#include "doctest.h"
#include "oracle_helpers.hpp"

using namespace predlab;

namespace {

ModelClass scenario_class(int r) {
  ModelClass c = build_bernoulli_grid(r);
  c.label = "grid+diracs";
  Alphabet a{2};
  c.measures.push_back(make_dirac(a, Seq{}, 0));
  c.measures.push_back(make_dirac(a, Seq{}, 1));
  c.measures.push_back(make_dirac_repeat(a, seq_from_string("01")));
  c.measures.push_back(make_dirac_repeat(a, seq_from_string("0011")));
  return c;
}

}  // namespace

TEST_CASE("band schedule") {
  CHECK(cover_bands(1) == 1);
  CHECK(cover_bands(2) == 2);
  CHECK(cover_bands(3) == 3);
  CHECK(cover_bands(8) == 6);   // ceil(8 / log2 log2 8)
  CHECK(cover_bands(12) == 7);  // ceil(12 / log2 log2 12)
}

TEST_CASE("band membership partitions the heavy set") {
  ModelClass c = scenario_class(4);
  MeasurePtr rho = make_bernoulli(0.5);
  int n = 8;
  CoverResult cover = build_cover(c, rho, {n});
  int k = cover.bands_per_horizon[0];
  double M = 1.0;
  for (const auto& mu : c.measures) {
    for (uint64_t code = 0; code < (1u << n); ++code) {
      Seq x = word_from_code(code, n, 2);
      double lmu = mu->log2_prob(x);
      double lrho = cover.rho_bounded->log2_prob(x);
      if (lmu == kNegInf) continue;
      double r = (lmu - lrho) / n;
      if (r < -std::log2(static_cast<double>(n)) / n - 1e-12) continue;  // outside T
      // the assigned band is the unique interval containing r
      int band = std::clamp(static_cast<int>(std::ceil(r * k / M)), 1, k);
      double lo = band == 1 ? -std::log2(static_cast<double>(n)) / n : (band - 1) * M / k;
      double hi = band == k ? M + 1.0 / n : band * M / k;
      CHECK(r >= lo - 1e-9);
      CHECK(r <= hi + 1e-9);
    }
  }
}

TEST_CASE("markov step: mass outside the heavy set is at most 1/n") {
  ModelClass c = scenario_class(4);
  CoverResult cover = build_cover(c, make_bernoulli(0.5), {8});
  int n = 8;
  for (const auto& mu : c.measures) {
    double outside = 0.0;
    for (uint64_t code = 0; code < (1u << n); ++code) {
      Seq x = word_from_code(code, n, 2);
      double lmu = mu->log2_prob(x);
      if (lmu == kNegInf) continue;
      double lrho = cover.rho_bounded->log2_prob(x);
      if (lmu - lrho < -std::log2(static_cast<double>(n))) outside += exp2_safe(lmu);
    }
    CHECK(outside <= 1.0 / n + 1e-12);
  }
}

TEST_CASE("greedy masses are nonincreasing within a band") {
  ModelClass c = scenario_class(8);
  CoverResult cover = build_cover(c, make_bernoulli(0.5), {8, 12});
  double prev = kPosInf;
  int prev_band = -1, prev_n = -1;
  for (const auto& s : cover.selections) {
    if (s.band != prev_band || s.n != prev_n) prev = kPosInf;
    CHECK(s.rho_mass <= prev + 1e-15);
    prev = s.rho_mass;
    prev_band = s.band;
    prev_n = s.n;
  }
}

TEST_CASE("selected coverage keeps the residual below 1/l") {
  ModelClass c = scenario_class(6);
  int n = 8;
  CoverResult cover = build_cover(c, make_bernoulli(0.5), {n});
  int k = cover.bands_per_horizon[0];
  // per (band, mu): after the greedy run the uncovered band mass is zero,
  // and after l rounds it is at most 1/l (checked via the recorded masses)
  for (int band = 1; band <= k; ++band) {
    double cum = 0.0;
    int l = 0;
    for (const auto& s : cover.selections) {
      if (s.n != n || s.band != band) continue;
      ++l;
      cum += s.rho_mass;
      CHECK(s.rho_mass <= 1.0 / l + 1e-12);
    }
    CHECK(cum <= 1.0 + 1e-12);
  }
}

TEST_CASE("single-member cover certifies trivially") {
  ModelClass c;
  c.label = "solo";
  c.measures.push_back(make_bernoulli(0.3));
  CoverResult cover = build_cover(c, make_bernoulli(0.5), {8});
  CoverCertification cert = certify_bound(cover, 0, 8);
  CHECK(cert.pass);
  // nu is a sub-mixture concentrated on the only member: loss within the
  // weight penalty
  double penalty = -std::log2(cover.member_weights[0]);
  CHECK(cert.loss_nu <=
        expected_cumulative_kl(*c.measures[0], *c.measures[0], 8, Method::enumerate).bits +
            penalty + 1e-9);
}

TEST_CASE("two disjoint diracs: mixture beats uniform and passes") {
  ModelClass c;
  c.label = "two-diracs";
  c.measures = {make_dirac(Alphabet{2}, Seq{}, 0), make_dirac(Alphabet{2}, Seq{}, 1)};
  int n = 4;
  CoverResult cover = build_cover(c, make_uniform_iid(Alphabet{2}), {n});
  for (size_t i = 0; i < 2; ++i) {
    CoverCertification cert = certify_bound(cover, i, n);
    CHECK(cert.pass);
    CHECK(cert.slack < 0.0);  // the cover concentrates on the diracs
  }
  // each dirac is selected first in the top band it owns
  bool top_first_seen = false;
  for (const auto& s : cover.selections)
    if (s.band == s.k && s.order == 1) top_first_seen = true;
  CHECK(top_first_seen);
}

TEST_CASE("acceptance scenario passes at both horizons") {
  ModelClass c = scenario_class(8);
  CoverResult cover = build_cover(c, make_bernoulli(0.5), {8, 12});
  CHECK(cover.total_weight <= 1.0 + 1e-12);
  for (size_t i = 0; i < c.size(); ++i) {
    for (int n : {8, 12}) {
      CoverCertification cert = certify_bound(cover, i, n);
      CHECK_MESSAGE(cert.pass, c.measures[i]->label(), " n=", n, " slack=", cert.slack,
                    " bound=", cert.bound);
    }
  }
}

TEST_CASE("pathwise floor from the selected component") {
  // -log2 nu(x) <= -log2(weight_i mu_i(x)) for the member owning x's cell
  ModelClass c = scenario_class(4);
  int n = 8;
  CoverResult cover = build_cover(c, make_bernoulli(0.5), {n});
  for (uint64_t code = 0; code < (1u << n); ++code) {
    Seq x = word_from_code(code, n, 2);
    double lnu = cover.nu->log2_prob(x);
    for (size_t i = 0; i < c.size(); ++i) {
      if (cover.member_weights[i] == 0.0) continue;
      double lmu = c.measures[i]->log2_prob(x);
      if (lmu == kNegInf) continue;
      CHECK(lnu >= std::log2(cover.member_weights[i]) + lmu - 1e-9);
    }
  }
}

TEST_CASE("uncertified horizons are rejected") {
  ModelClass c = scenario_class(4);
  CoverResult cover = build_cover(c, make_bernoulli(0.5), {8});
  CHECK_THROWS_AS(certify_bound(cover, 0, 9), Error);
  CHECK_THROWS_AS(certify_bound(cover, 99, 8), Error);
}
