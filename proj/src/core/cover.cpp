#include "core/cover.hpp"

#include <algorithm>
#include <cmath>

#include "core/loss.hpp"

namespace predlab {

int cover_bands(int n) {
  if (n < 1) fail(Errc::invalid_argument, "cover: horizon must be >= 1");
  if (n <= 3) return n;
  double ll = std::log2(std::log2(static_cast<double>(n)));
  return static_cast<int>(std::ceil(static_cast<double>(n) / ll));
}

double cover_bound_bits(int n, int k, double alphabet_bits) {
  if (n < 2 || k < 2) return kPosInf;
  double w = WeightScheme::main_theorem_normalizer();
  double M = alphabet_bits;
  double ln = std::log2(static_cast<double>(n));
  double lk = std::log2(static_cast<double>(k));
  double log2_bn = 3.0 * std::log2(w) - std::log2(4.0) - 2.0 * std::log2(M + 1.0) -
                   5.0 * ln - 3.0 * lk - 2.0 * std::log2(ln) - 2.0 * std::log2(lk);
  double log2_wn = WeightScheme::main_theorem().log2_weight(n);
  return M * n / k - log2_bn + 4.0 * M - (2.0 / n) * (log2_wn - 1.0) + 0.5;
}

CoverResult build_cover(const ModelClass& c, MeasurePtr rho, std::vector<int> horizons,
                        uint64_t cell_cap) {
  if (c.measures.empty()) fail(Errc::invalid_argument, "cover: empty class");
  if (horizons.empty()) fail(Errc::invalid_argument, "cover: no horizons");
  Alphabet a = c.alphabet();
  if (!(rho->alphabet() == a)) fail(Errc::invalid_argument, "cover: rho alphabet mismatch");
  std::sort(horizons.begin(), horizons.end());
  horizons.erase(std::unique(horizons.begin(), horizons.end()), horizons.end());

  CoverResult out;
  out.model = c;
  out.rho_original = rho;
  out.rho_bounded = std::make_shared<MixturePredictor>(
      std::vector<MeasurePtr>{rho, make_uniform_iid(a)}, std::vector<double>{-1.0, -1.0},
      "bounded(" + rho->label() + ")");
  out.horizons = horizons;
  out.scheme_w = WeightScheme::main_theorem_normalizer();
  out.member_weights.assign(c.size(), 0.0);
  WeightScheme ladder = WeightScheme::main_theorem();

  const double M = a.bits();
  for (int n : horizons) {
    uint64_t cells = cell_count(a, n, cell_cap);
    int k = cover_bands(n);
    out.bands_per_horizon.push_back(k);

    // per-cell log2 masses
    std::vector<double> lrho(static_cast<size_t>(cells));
    for (uint64_t code = 0; code < cells; ++code)
      lrho[static_cast<size_t>(code)] =
          out.rho_bounded->log2_prob(word_from_code(code, n, a.size));
    std::vector<std::vector<double>> lmu(c.size(), std::vector<double>(static_cast<size_t>(cells)));
    for (size_t i = 0; i < c.size(); ++i)
      for (uint64_t code = 0; code < cells; ++code)
        lmu[i][static_cast<size_t>(code)] = c.measures[i]->log2_prob(word_from_code(code, n, a.size));

    // band of each (member, cell); 0 = outside T_mu
    const double left_edge = -std::log2(static_cast<double>(n)) / n;
    std::vector<std::vector<int>> band(c.size(), std::vector<int>(static_cast<size_t>(cells), 0));
    for (size_t i = 0; i < c.size(); ++i) {
      for (uint64_t code = 0; code < cells; ++code) {
        double lm = lmu[i][static_cast<size_t>(code)];
        if (lm == kNegInf) continue;
        double r = (lm - lrho[static_cast<size_t>(code)]) / n;
        if (r < left_edge) continue;  // mu(x)/rho(x) < 1/n
        int b = static_cast<int>(std::ceil(r * k / M));
        band[i][static_cast<size_t>(code)] = std::clamp(b, 1, k);
      }
    }

    double wn = ladder.weight(n);
    double wk = ladder.weight(k);
    for (int bi = 1; bi <= k; ++bi) {
      std::vector<char> covered(static_cast<size_t>(cells), 0);
      for (int l = 1;; ++l) {
        double best_mass = 0.0;
        size_t best_i = 0;
        for (size_t i = 0; i < c.size(); ++i) {
          double mass = 0.0;
          for (uint64_t code = 0; code < cells; ++code)
            if (band[i][static_cast<size_t>(code)] == bi && !covered[static_cast<size_t>(code)])
              mass += exp2_safe(lrho[static_cast<size_t>(code)]);
          if (mass > best_mass) {
            best_mass = mass;
            best_i = i;
          }
        }
        if (best_mass <= 0.0) break;
        for (uint64_t code = 0; code < cells; ++code)
          if (band[best_i][static_cast<size_t>(code)] == bi) covered[static_cast<size_t>(code)] = 1;
        out.selections.push_back({n, k, bi, l, best_i, best_mass});
        out.member_weights[best_i] += 0.5 * wn * wk * (1.0 / k) * ladder.weight(l);
        if (l > static_cast<int>(cells) + 2) fail(Errc::internal, "cover: greedy did not terminate");
      }
    }

    // regularizer: per cell, the member attaining the supremum
    std::vector<size_t> arg_sup(static_cast<size_t>(cells), 0);
    std::vector<char> has_mass(static_cast<size_t>(cells), 0);
    uint64_t support = 0;
    for (uint64_t code = 0; code < cells; ++code) {
      double best = kNegInf;
      for (size_t i = 0; i < c.size(); ++i) {
        if (lmu[i][static_cast<size_t>(code)] > best) {
          best = lmu[i][static_cast<size_t>(code)];
          arg_sup[static_cast<size_t>(code)] = i;
        }
      }
      if (best != kNegInf) {
        has_mass[static_cast<size_t>(code)] = 1;
        ++support;
      }
    }
    if (support == 0) fail(Errc::invalid_argument, "cover: class gives every cell mass 0");
    for (uint64_t code = 0; code < cells; ++code)
      if (has_mass[static_cast<size_t>(code)])
        out.member_weights[arg_sup[static_cast<size_t>(code)]] +=
            0.5 * wn / static_cast<double>(support);
  }

  // assemble nu over members with positive accumulated weight
  std::vector<MeasurePtr> comps;
  std::vector<double> lws;
  for (size_t i = 0; i < c.size(); ++i) {
    out.total_weight += out.member_weights[i];
    if (out.member_weights[i] > 0.0) {
      comps.push_back(c.measures[i]);
      lws.push_back(std::log2(out.member_weights[i]));
    }
  }
  out.nu = std::make_shared<MixturePredictor>(std::move(comps), std::move(lws),
                                              "cover_nu(" + c.label + ")",
                                              1.0 - out.total_weight);
  return out;
}

CoverCertification certify_bound(const CoverResult& result, size_t mu_index, int n) {
  if (mu_index >= result.model.size())
    fail(Errc::invalid_argument, "certify_bound: measure index out of range");
  auto it = std::find(result.horizons.begin(), result.horizons.end(), n);
  if (it == result.horizons.end())
    fail(Errc::invalid_argument, "certify_bound: horizon was not materialized");
  int k = result.bands_per_horizon[static_cast<size_t>(it - result.horizons.begin())];

  CoverCertification cert;
  cert.mu_index = mu_index;
  cert.n = n;
  const ProcessMeasure& mu = *result.model.measures[mu_index];
  cert.loss_nu = expected_cumulative_kl(mu, *result.nu, n, Method::enumerate).bits;
  cert.loss_rho_bounded =
      expected_cumulative_kl(mu, *result.rho_bounded, n, Method::enumerate).bits;
  cert.slack = cert.loss_nu - cert.loss_rho_bounded;
  cert.bound = cover_bound_bits(n, k, result.model.alphabet().bits());
  cert.pass = cert.slack <= cert.bound + 1e-9;
  return cert;
}

}  // namespace predlab
