#include "tsf/nn/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tsf::nn {

namespace {

std::vector<std::size_t> order_by_time(std::span<const double> durations) {
  std::vector<std::size_t> order(durations.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return durations[a] < durations[b]; });
  return order;
}

void check_aligned(std::size_t n, std::span<const double> durations, std::span<const int> events) {
  if (durations.size() != n || events.size() != n) throw std::invalid_argument("loss: inputs not aligned");
}

}  // namespace

LossValue cox_nll(std::span<const double> scores, std::span<const double> durations,
                  std::span<const int> events) {
  const std::size_t n = scores.size();
  check_aligned(n, durations, events);
  if (std::find(events.begin(), events.end(), 1) == events.end()) throw std::invalid_argument("no events");

  const double shift = *std::max_element(scores.begin(), scores.end());
  const auto order = order_by_time(durations);

  // risk_sum[k] = sum over subjects with T >= T_{order[k]}, shared across ties
  std::vector<double> risk_sum(n);
  double running = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    running += std::exp(scores[order[k]] - shift);
    risk_sum[k] = running;
  }
  for (std::size_t k = 1; k < n; ++k) {
    if (durations[order[k]] == durations[order[k - 1]]) risk_sum[k] = risk_sum[k - 1];
  }

  LossValue out;
  out.grad.assign(n, 0.0);
  double hazard_sum = 0.0;  // sum over events with T_i <= t of 1 / risk_sum
  std::size_t k = 0;
  while (k < n) {
    std::size_t end = k;
    const double t = durations[order[k]];
    while (end < n && durations[order[end]] == t) ++end;
    for (std::size_t q = k; q < end; ++q) {
      const std::size_t i = order[q];
      if (events[i] == 1) {
        out.value += std::log(risk_sum[k]) + shift - scores[i];
        hazard_sum += 1.0 / risk_sum[k];
        out.grad[i] -= 1.0;
      }
    }
    for (std::size_t q = k; q < end; ++q) {
      const std::size_t i = order[q];
      out.grad[i] += std::exp(scores[i] - shift) * hazard_sum;
    }
    k = end;
  }
  return out;
}

LossValue coxcc_nll(std::span<const double> scores, std::span<const double> durations,
                    std::span<const int> events, std::size_t control_size, Rng& rng, bool exhaustive) {
  const std::size_t n = scores.size();
  check_aligned(n, durations, events);
  if (control_size < 1) throw std::invalid_argument("coxcc: control_size must be >= 1");
  const auto order = order_by_time(durations);
  std::vector<std::size_t> first_at(n);  // start of the risk set (in `order`) for each rank
  for (std::size_t k = 0; k < n; ++k) {
    first_at[k] = (k > 0 && durations[order[k]] == durations[order[k - 1]]) ? first_at[k - 1] : k;
  }

  LossValue out;
  out.grad.assign(n, 0.0);
  std::vector<std::size_t> controls;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    if (events[i] != 1) continue;
    const std::size_t begin = first_at[k];
    const std::size_t others = n - begin - 1;  // |R_i \ {i}|
    controls.clear();
    double weight = 1.0;
    if (others > 0) {
      if (exhaustive) {
        for (std::size_t q = begin; q < n; ++q) {
          if (q != k) controls.push_back(order[q]);
        }
      } else {
        for (std::size_t c = 0; c < control_size; ++c) {
          std::size_t q = begin + uniform_index(rng, others);
          if (q >= k) ++q;
          controls.push_back(order[q]);
        }
        weight = static_cast<double>(others) / static_cast<double>(control_size);
      }
    }
    double shift = scores[i];
    for (std::size_t c : controls) shift = std::max(shift, scores[c]);
    double denom = std::exp(scores[i] - shift);
    for (std::size_t c : controls) denom += weight * std::exp(scores[c] - shift);
    out.value += std::log(denom) + shift - scores[i];
    out.grad[i] += std::exp(scores[i] - shift) / denom - 1.0;
    for (std::size_t c : controls) out.grad[c] += weight * std::exp(scores[c] - shift) / denom;
  }
  return out;
}

DiscreteTimeGrid::DiscreteTimeGrid(std::vector<double> cuts) : cuts_(std::move(cuts)) {
  if (cuts_.size() < 2 || cuts_.front() != 0.0) {
    throw std::invalid_argument("time grid: need cut points 0 = tau_0 < tau_1 < ...");
  }
  for (std::size_t k = 1; k < cuts_.size(); ++k) {
    if (!(cuts_[k - 1] < cuts_[k])) throw std::invalid_argument("time grid: cut points must increase strictly");
  }
}

DiscreteTimeGrid DiscreteTimeGrid::from_quantiles(std::span<const double> durations, std::size_t m) {
  if (durations.empty() || m == 0) throw std::invalid_argument("time grid: need durations and m >= 1");
  std::vector<double> sorted(durations.begin(), durations.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  std::vector<double> cuts{0.0};
  for (std::size_t k = 1; k <= m; ++k) {
    const double q = static_cast<double>(k) / static_cast<double>(m);
    auto idx = static_cast<std::size_t>(std::ceil(q * n));
    idx = std::clamp<std::size_t>(idx, 1, sorted.size()) - 1;
    const double v = sorted[idx];
    if (v > cuts.back()) cuts.push_back(v);
  }
  if (cuts.size() == 1) cuts.push_back(1.0);
  return DiscreteTimeGrid(std::move(cuts));
}

std::size_t DiscreteTimeGrid::bin_of(double t) const {
  auto it = std::lower_bound(cuts_.begin() + 1, cuts_.end(), t);
  if (it == cuts_.end()) return n_bins();
  return static_cast<std::size_t>(it - cuts_.begin());
}

LossValue deephit_likelihood(std::span<const double> y, const DiscreteTimeGrid& grid,
                             std::span<const double> durations, std::span<const int> events) {
  const std::size_t m = grid.n_bins();
  const std::size_t n = durations.size();
  if (y.size() != n * m) throw std::invalid_argument("deephit: outputs must be n x m");
  check_aligned(n, durations, events);
  LossValue out;
  out.grad.assign(n * m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t e = grid.bin_of(durations[i]);
    const double* yi = y.data() + i * m;
    double* gi = out.grad.data() + i * m;
    if (events[i] == 1) {
      const double p = yi[e - 1];
      out.value -= std::log(std::max(p, kProbabilityFloor));
      if (p > kProbabilityFloor) gi[e - 1] -= 1.0 / p;
    } else {
      double s = 1.0;
      for (std::size_t k = 0; k < e; ++k) s -= yi[k];
      out.value -= std::log(std::max(s, kProbabilityFloor));
      if (s > kProbabilityFloor) {
        for (std::size_t k = 0; k < e; ++k) gi[k] += 1.0 / s;
      }
    }
  }
  return out;
}

LossValue deephit_rank(std::span<const double> y, const DiscreteTimeGrid& grid,
                       std::span<const double> durations, std::span<const int> events, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("deephit: sigma must be > 0");
  const std::size_t m = grid.n_bins();
  const std::size_t n = durations.size();
  if (y.size() != n * m) throw std::invalid_argument("deephit: outputs must be n x m");
  check_aligned(n, durations, events);

  // cdf[i * m + k] = sum_{kappa <= k+1} y_{i,kappa}
  std::vector<double> cdf(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    double c = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      c += y[i * m + k];
      cdf[i * m + k] = c;
    }
  }
  std::vector<std::size_t> bin(n);
  for (std::size_t i = 0; i < n; ++i) bin[i] = grid.bin_of(durations[i]);

  LossValue out;
  out.grad.assign(n * m, 0.0);
  // pull[j * m + e] accumulates term / sigma for pairs evaluated at bin e+1
  std::vector<double> pull(n * m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (events[i] != 1) continue;
    const std::size_t e = bin[i] - 1;
    const double si = 1.0 - cdf[i * m + e];
    double push = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!(durations[i] < durations[j])) continue;
      const double sj = 1.0 - cdf[j * m + e];
      const double term = std::exp((si - sj) / sigma);
      out.value += term;
      push += term / sigma;
      pull[j * m + e] += term / sigma;
    }
    for (std::size_t k = 0; k <= e; ++k) out.grad[i * m + k] -= push;
  }
  for (std::size_t j = 0; j < n; ++j) {
    double suffix = 0.0;
    for (std::size_t k = m; k-- > 0;) {
      suffix += pull[j * m + k];
      out.grad[j * m + k] += suffix;
    }
  }
  return out;
}

double combine_deephit(double alpha, double likelihood, double rank) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("deephit: alpha must lie in (0, 1)");
  return alpha * likelihood + (1.0 - alpha) * rank;
}

LossValue deephit_loss(std::span<const double> y, const DiscreteTimeGrid& grid,
                       std::span<const double> durations, std::span<const int> events, double alpha,
                       double sigma) {
  const LossValue lik = deephit_likelihood(y, grid, durations, events);
  const LossValue rank = deephit_rank(y, grid, durations, events, sigma);
  LossValue out;
  out.value = combine_deephit(alpha, lik.value, rank.value);
  out.grad.resize(lik.grad.size());
  for (std::size_t k = 0; k < out.grad.size(); ++k) out.grad[k] = alpha * lik.grad[k] + (1.0 - alpha) * rank.grad[k];
  return out;
}

}  // namespace tsf::nn
