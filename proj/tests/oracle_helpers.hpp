#pragma once

// Test-side oracles, kept independent of the library evaluation paths: direct
// products, exhaustive path sums, and closed forms recomputed from scratch.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "core/measure.hpp"

namespace oracle {

using predlab::Alphabet;
using predlab::Seq;
using predlab::SeqView;

inline double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

inline double bernoulli_divergence(double p, double q) {
  double d = 0.0;
  if (p > 0.0) d += p * std::log2(p / q);
  if (p < 1.0) d += (1.0 - p) * std::log2((1.0 - p) / (1.0 - q));
  return d;
}

// direct product probability of a binary word under P(0) = p0
inline double iid_prob(double p0, SeqView x) {
  double v = 1.0;
  for (auto s : x) v *= s == 0 ? p0 : 1.0 - p0;
  return v;
}

// Laplace closed form over the binary alphabet: k!(n-k)!/(n+1)!
inline double laplace_prob(SeqView x) {
  long k = 0;
  for (auto s : x) k += s == 1 ? 1 : 0;
  long n = static_cast<long>(x.size());
  double v = 1.0;
  // k!(n-k)!/(n+1)! computed stably as a product of ratios
  long a = 0, b = 0;
  for (long t = 1; t <= n + 1; ++t) {
    double num = 1.0;
    if (a < k) num = static_cast<double>(++a);
    else if (b < n - k) num = static_cast<double>(++b);
    v *= num / static_cast<double>(t);
  }
  return v;
}

// exhaustive L_n by visiting every word with caller-supplied joints
inline double brute_kl(const std::function<double(SeqView)>& mu,
                       const std::function<double(SeqView)>& rho, int n, int base = 2) {
  uint64_t cells = 1;
  for (int i = 0; i < n; ++i) cells *= static_cast<uint64_t>(base);
  double acc = 0.0;
  for (uint64_t code = 0; code < cells; ++code) {
    Seq x = predlab::word_from_code(code, n, base);
    double pm = mu(x);
    if (pm <= 0.0) continue;
    double pr = rho(x);
    if (pr <= 0.0) return std::numeric_limits<double>::infinity();
    acc += pm * std::log2(pm / pr);
  }
  return acc;
}

// full enumeration of the state paths of the upward-walk chains, restricted
// to initial states <= j_cap (a strict lower bound on the exact value)
struct ChainPathOracle {
  std::function<double(long)> pi;          // initial state mass
  std::function<double(long)> climb;       // climb probability from state j
  long reset_state = 1;
  std::function<int(long)> emit;

  double prob(SeqView y, long j_cap) const {
    double total = 0.0;
    std::function<void(long, size_t, double)> go = [&](long state, size_t t, double mass) {
      if (emit(state) != y[t]) return;
      if (t + 1 == y.size()) {
        total += mass;
        return;
      }
      double p = climb(state);
      go(state + 1, t + 1, mass * p);
      go(reset_state, t + 1, mass * (1.0 - p));
    };
    for (long j = reset_state; j <= j_cap; ++j) go(j, 0, pi(j));
    return total;
  }
};

}  // namespace oracle
