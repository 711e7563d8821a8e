#pragma once

#include "core/mixture.hpp"

namespace predlab {

struct CapacityResult {
  int n = 0;
  size_t class_size = 0;
  double capacity_bits = 0.0;  // I(P) at the returned prior (achievable value)
  double gap = 0.0;            // max_i D_i - I(P); optimality certificate
  int iterations = 0;
  bool converged = false;
  std::vector<double> prior;       // over class indices
  std::vector<double> barycentre;  // over the surviving cells
  std::vector<uint64_t> cells;     // word codes of the surviving cells
};

// Alternating-maximization capacity iteration over explicit rows
// (distributions over a common finite cell set). Certified by the standard
// per-iteration sandwich: I(P) <= C <= max_i KL(Q_i || barycentre).
CapacityResult channel_capacity_rows(const std::vector<std::vector<double>>& rows, double tol,
                                     int max_iters);

// Class restricted to X^n. Cells with zero mass under every member are
// dropped; members with no mass at all are rejected.
CapacityResult channel_capacity(const ModelClass& c, int n, double tol = 1e-9,
                                int max_iters = 200000, uint64_t cap = 1u << 20);

// Predictor assembled from horizon-wise optimal barycentres with all-zeros
// continuations and quadratic weights.
MeasurePtr build_rho_capacity(const ModelClass& c, int max_horizon, double tol = 1e-9,
                              int max_iters = 200000);

// Per-sequence-total guarantee for that predictor:
// C(C^n) + 1 + 2 log2 n + log2(pi^2/6).
double capacity_bound_bits(double capacity_bits, int n);

}  // namespace predlab
