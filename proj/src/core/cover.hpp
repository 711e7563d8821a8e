#pragma once

#include "core/mixture.hpp"

namespace predlab {

// Greedy covering construction: given a finite class and a reference
// predictor rho, build a mixture nu over the class whose loss tracks rho's up
// to an explicit additive bound, certified horizon by horizon.
//
// Per horizon n the per-symbol log-ratio axis [-(log2 n)/n, M + 1/n] is split
// into k bands; for each band the class member whose band cell carries the
// largest uncovered rho-mass is selected repeatedly with ladder weights; a
// regularizer mixes, per cell, the member attaining the per-cell supremum.

struct CoverSelection {
  int n = 0, k = 0, band = 0, order = 0;  // order = l, 1-based within (n,k,band)
  size_t measure_index = 0;
  double rho_mass = 0.0;  // m_l, residual mass captured at selection
};

struct CoverCertification {
  size_t mu_index = 0;
  int n = 0;
  double loss_nu = 0.0;           // L_n(mu, nu), exact enumeration
  double loss_rho_bounded = 0.0;  // L_n(mu, rho'), rho' = (rho + uniform)/2
  double slack = 0.0;             // loss_nu - loss_rho_bounded
  double bound = 0.0;             // analytic right-hand side at this horizon
  bool pass = false;
};

struct CoverResult {
  ModelClass model;
  MeasurePtr rho_original;
  MeasurePtr rho_bounded;  // (rho + uniform)/2; adds at most 1 bit of slack
  std::shared_ptr<MixturePredictor> nu;
  std::vector<int> horizons;
  std::vector<int> bands_per_horizon;  // k(n)
  std::vector<CoverSelection> selections;
  std::vector<double> member_weights;  // linear prior mass per class member
  double total_weight = 0.0;
  double scheme_w = 0.0;  // normalizer of the ladder w_k = w/(k log2^2 k)
};

// k(n) = ceil(n / log2 log2 n), with k = n on the degenerate horizons n <= 3.
int cover_bands(int n);

// Analytic certification bound in bits (relative to the bounded rho):
// M n/k - log2 B_n + 4M - (2/n)(log2 w_n - 1) + 1/2,
// B_n = w^3 / (4 (M+1)^2 n^5 k^3 log2^2 n log2^2 k).
// +inf on degenerate horizons where the expression is not meaningful.
double cover_bound_bits(int n, int k, double alphabet_bits);

CoverResult build_cover(const ModelClass& c, MeasurePtr rho, std::vector<int> horizons,
                        uint64_t cell_cap = 1u << 20);

CoverCertification certify_bound(const CoverResult& result, size_t mu_index, int n);

}  // namespace predlab
