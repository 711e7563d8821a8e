#include <cmath>

#include "core/capacity.hpp"
#include "core/loss.hpp"
#include "doctest.h"
#include "oracle_helpers.hpp"

using namespace predlab;

namespace {

// Independent 2-row oracle: at the optimum both divergences to the
// barycentre are equal; bisect on the mixing weight.
double binary_channel_capacity(const std::vector<double>& q1, const std::vector<double>& q2) {
  auto kl = [](const std::vector<double>& p, const std::vector<double>& r) {
    double d = 0.0;
    for (size_t y = 0; y < p.size(); ++y)
      if (p[y] > 0.0) d += p[y] * std::log2(p[y] / r[y]);
    return d;
  };
  auto diff = [&](double a) {
    std::vector<double> mix(q1.size());
    for (size_t y = 0; y < q1.size(); ++y) mix[y] = a * q1[y] + (1.0 - a) * q2[y];
    return kl(q1, mix) - kl(q2, mix);
  };
  double lo = 1e-12, hi = 1.0 - 1e-12;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (diff(mid) > 0.0 ? lo : hi) = mid;
  }
  double a = 0.5 * (lo + hi);
  std::vector<double> mix(q1.size());
  for (size_t y = 0; y < q1.size(); ++y) mix[y] = a * q1[y] + (1.0 - a) * q2[y];
  return a * kl(q1, mix) + (1.0 - a) * kl(q2, mix);
}

}  // namespace

TEST_CASE("solver matches the closed-form binary channel") {
  RngStream rng(13);
  for (int rep = 0; rep < 12; ++rep) {
    double a = 0.05 + 0.9 * rng.next_unit();
    double b = 0.05 + 0.9 * rng.next_unit();
    std::vector<std::vector<double>> rows = {{a, 1.0 - a}, {b, 1.0 - b}};
    CapacityResult r = channel_capacity_rows(rows, 1e-11, 200000);
    double oracle_value = binary_channel_capacity(rows[0], rows[1]);
    CHECK(std::abs(r.capacity_bits - oracle_value) <= 1e-9);
    CHECK(r.gap <= 1e-11);
  }
}

TEST_CASE("degenerate classes") {
  ModelClass single;
  single.label = "one";
  single.measures.push_back(make_bernoulli(0.4));
  CapacityResult r = channel_capacity(single, 4);
  CHECK(r.capacity_bits == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.prior[0] == doctest::Approx(1.0));

  ModelClass twins;
  twins.label = "twins";
  twins.measures = {make_bernoulli(0.3), make_bernoulli(0.3), make_bernoulli(0.3)};
  CHECK(channel_capacity(twins, 5).capacity_bits == doctest::Approx(0.0).epsilon(1e-10));

  ModelClass disjoint;
  disjoint.label = "disjoint";
  disjoint.measures = {make_bernoulli(0.0), make_bernoulli(1.0)};
  CapacityResult d = channel_capacity(disjoint, 1);
  CHECK(d.capacity_bits == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(d.prior[0] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("capacity grows with class inclusion") {
  RngStream rng(17);
  for (int rep = 0; rep < 5; ++rep) {
    ModelClass small, big;
    small.label = "small";
    big.label = "big";
    for (int i = 0; i < 3; ++i) {
      MeasurePtr m = make_bernoulli(0.1 + 0.8 * rng.next_unit());
      small.measures.push_back(m);
      big.measures.push_back(m);
    }
    big.measures.push_back(make_bernoulli(0.1 + 0.8 * rng.next_unit()));
    CHECK(channel_capacity(small, 4, 1e-10).capacity_bits <=
          channel_capacity(big, 4, 1e-10).capacity_bits + 1e-8);
  }
}

TEST_CASE("certificate: returned prior equalizes within the gap") {
  ModelClass c;
  c.label = "four";
  for (double p : {0.2, 0.4, 0.6, 0.8}) c.measures.push_back(make_bernoulli(p));
  CapacityResult r = channel_capacity(c, 4, 1e-10);
  REQUIRE(r.converged);
  // recompute max_i and average divergence at the returned prior
  double mx = -kPosInf, avg = 0.0;
  for (size_t i = 0; i < c.size(); ++i) {
    double d = 0.0;
    for (size_t j = 0; j < r.cells.size(); ++j) {
      Seq x = word_from_code(r.cells[j], 4, 2);
      double q = exp2_safe(c.measures[i]->log2_prob(x));
      if (q > 0.0) d += q * std::log2(q / r.barycentre[j]);
    }
    mx = std::max(mx, d);
    avg += r.prior[i] * d;
  }
  CHECK(mx - avg <= r.gap + 1e-10);
  CHECK(r.capacity_bits <= std::log2(4.0) + 1e-12);
}

TEST_CASE("rho_capacity meets the per-horizon bound") {
  ModelClass c;
  c.label = "trio";
  c.measures = {make_bernoulli(0.2), make_bernoulli(0.5),
                make_markov(Alphabet{2}, 1, {{0.9, 0.1}, {0.3, 0.7}})};
  int n_max = 7;
  MeasurePtr rho = build_rho_capacity(c, n_max, 1e-10);
  // valid process measure
  double mass = 0.0;
  for (uint64_t code = 0; code < (1u << 5); ++code)
    mass += exp2_safe(rho->log2_prob(word_from_code(code, 5, 2)));
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  for (int n = 2; n <= n_max; ++n) {
    double cap = channel_capacity(c, n, 1e-10).capacity_bits;
    double bound = capacity_bound_bits(cap, n);
    for (const auto& mu : c.measures) {
      double loss = expected_cumulative_kl(*mu, *rho, n, Method::enumerate).bits;
      CHECK(loss <= bound + 1e-9);
    }
  }
}

TEST_CASE("all-zero rows are rejected") {
  std::vector<std::vector<double>> rows = {{0.5, 0.5}, {0.0, 0.0}};
  CHECK_THROWS_AS(channel_capacity_rows(rows, 1e-9, 1000), Error);
}
