#include "core/capacity.hpp"

#include <cmath>
#include <numbers>

namespace predlab {

CapacityResult channel_capacity_rows(const std::vector<std::vector<double>>& rows, double tol,
                                     int max_iters) {
  size_t m = rows.size();
  if (m == 0) fail(Errc::invalid_argument, "capacity: empty class");
  size_t cells = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != cells) fail(Errc::invalid_argument, "capacity: ragged rows");
    double sum = 0.0;
    for (double p : r) {
      if (std::isnan(p) || p < 0.0) fail(Errc::invalid_argument, "capacity: bad cell mass");
      sum += p;
    }
    if (sum <= 0.0) fail(Errc::invalid_argument, "capacity: all-zero row rejected");
    if (!(std::abs(sum - 1.0) <= 1e-6))
      fail(Errc::invalid_argument, "capacity: row does not sum to 1");
  }

  CapacityResult out;
  out.class_size = m;
  out.prior.assign(m, 1.0 / static_cast<double>(m));
  std::vector<double> bary(cells), d(m);
  for (int iter = 1; iter <= max_iters; ++iter) {
    std::fill(bary.begin(), bary.end(), 0.0);
    for (size_t i = 0; i < m; ++i)
      for (size_t y = 0; y < cells; ++y) bary[y] += out.prior[i] * rows[i][y];
    double lower = 0.0, upper = -kPosInf;
    for (size_t i = 0; i < m; ++i) {
      double di = 0.0;
      for (size_t y = 0; y < cells; ++y) {
        double q = rows[i][y];
        if (q == 0.0) continue;
        di += q * std::log2(q / bary[y]);  // bary[y] > 0 wherever any prior row has mass
      }
      d[i] = di;
      lower += out.prior[i] * di;
      upper = std::max(upper, di);
    }
    out.capacity_bits = std::max(lower, 0.0);
    out.gap = upper - lower;
    out.iterations = iter;
    out.barycentre = bary;
    if (out.gap <= tol) {
      out.converged = true;
      break;
    }
    double dmax = upper;  // extract the max before exponentiating
    double norm = 0.0;
    for (size_t i = 0; i < m; ++i) {
      out.prior[i] *= std::exp2(d[i] - dmax);
      norm += out.prior[i];
    }
    for (double& p : out.prior) p /= norm;
  }
  return out;
}

CapacityResult channel_capacity(const ModelClass& c, int n, double tol, int max_iters,
                                uint64_t cap) {
  Alphabet a = c.alphabet();
  uint64_t cells = cell_count(a, n, cap);
  std::vector<std::vector<double>> rows(c.size(), std::vector<double>(static_cast<size_t>(cells)));
  for (size_t i = 0; i < c.size(); ++i)
    for (uint64_t code = 0; code < cells; ++code)
      rows[i][static_cast<size_t>(code)] =
          exp2_safe(c.measures[i]->log2_prob(word_from_code(code, n, a.size)));
  // drop cells carried by no member
  std::vector<uint64_t> keep;
  for (uint64_t code = 0; code < cells; ++code) {
    bool any = false;
    for (size_t i = 0; i < c.size() && !any; ++i) any = rows[i][static_cast<size_t>(code)] > 0.0;
    if (any) keep.push_back(code);
  }
  std::vector<std::vector<double>> packed(c.size(), std::vector<double>(keep.size()));
  for (size_t i = 0; i < c.size(); ++i)
    for (size_t j = 0; j < keep.size(); ++j)
      packed[i][j] = rows[i][static_cast<size_t>(keep[j])];
  CapacityResult out = channel_capacity_rows(packed, tol, max_iters);
  out.n = n;
  out.cells = std::move(keep);
  return out;
}

namespace {

class RhoCapacityMeasure : public ProcessMeasure {
 public:
  RhoCapacityMeasure(const ModelClass& c, std::vector<std::vector<double>> priors,
                     std::string label)
      : ProcessMeasure(c.alphabet(), std::move(label)), class_(c), priors_(std::move(priors)) {}

  double log2_joint(SeqView x) const;

  std::vector<double> conditional(SeqView prefix) const override {
    double lp = log2_joint(prefix);
    if (lp == kNegInf)
      fail(Errc::undefined_conditional,
           label() + ": conditional on a zero-probability prefix is undefined");
    Seq next(prefix.begin(), prefix.end());
    next.push_back(0);
    std::vector<double> c(static_cast<size_t>(alphabet().size), 0.0);
    double sum = 0.0;
    for (int s = 0; s < alphabet().size; ++s) {
      next.back() = s;
      c[static_cast<size_t>(s)] = exp2_safe(log2_joint(next) - lp);
      sum += c[static_cast<size_t>(s)];
    }
    for (double& p : c) p /= sum;
    return c;
  }

 private:
  ModelClass class_;
  std::vector<std::vector<double>> priors_;  // priors_[m-1] over class members
};

double RhoCapacityMeasure::log2_joint(SeqView x) const {
  int t = static_cast<int>(x.size());
  if (t == 0) return 0.0;
  int n_max = static_cast<int>(priors_.size());
  std::vector<double> lmember(class_.size());
  std::vector<double> terms;
  for (int m = 1; m <= n_max; ++m) {
    int head = std::min(m, t);
    if (m < t) {
      bool zero_tail = true;
      for (int i = m; i < t && zero_tail; ++i) zero_tail = x[static_cast<size_t>(i)] == 0;
      if (!zero_tail) continue;
    }
    // barycentre mass of the length-head prefix under the horizon-m prior
    double acc = kNegInf;
    for (size_t i = 0; i < class_.size(); ++i) {
      double p = priors_[static_cast<size_t>(m - 1)][i];
      if (p <= 0.0) continue;
      double lm = class_.measures[i]->log2_prob(x.subspan(0, static_cast<size_t>(head)));
      if (lm == kNegInf) continue;
      acc = log2_add(acc, std::log2(p) + lm);
    }
    (void)lmember;
    if (acc == kNegInf) continue;
    double lw = std::log2(6.0 / (std::numbers::pi * std::numbers::pi)) -
                2.0 * std::log2(static_cast<double>(m));
    terms.push_back(lw + acc);
  }
  return log2_sum(terms);
}

}  // namespace

MeasurePtr build_rho_capacity(const ModelClass& c, int max_horizon, double tol, int max_iters) {
  if (max_horizon < 1) fail(Errc::invalid_argument, "rho_capacity: max_horizon must be >= 1");
  std::vector<std::vector<double>> priors;
  priors.reserve(static_cast<size_t>(max_horizon));
  for (int m = 1; m <= max_horizon; ++m)
    priors.push_back(channel_capacity(c, m, tol, max_iters).prior);
  return std::make_shared<RhoCapacityMeasure>(
      c, std::move(priors), "rho_capacity(" + c.label + ",N=" + std::to_string(max_horizon) + ")");
}

double capacity_bound_bits(double capacity_bits, int n) {
  return capacity_bits + 1.0 + 2.0 * std::log2(static_cast<double>(n)) +
         std::log2(std::numbers::pi * std::numbers::pi / 6.0);
}

}  // namespace predlab
