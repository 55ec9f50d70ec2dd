#pragma once

// Brute-force reference implementations for the tests. They share no code
// with the library: risk sets are recounted from scratch at every time.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <span>
#include <vector>

namespace oracle {

inline std::vector<double> event_times(std::span<const double> t, std::span<const int> e) {
  std::set<double> s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (e[i]) s.insert(t[i]);
  }
  return {s.begin(), s.end()};
}

inline double at_risk(std::span<const double> t, double u) {
  return static_cast<double>(std::count_if(t.begin(), t.end(), [u](double x) { return x >= u; }));
}

inline double deaths(std::span<const double> t, std::span<const int> e, double u) {
  double d = 0;
  for (std::size_t i = 0; i < t.size(); ++i) d += (t[i] == u && e[i]) ? 1 : 0;
  return d;
}

inline double kaplan_meier(std::span<const double> t, std::span<const int> e, double at) {
  double s = 1.0;
  for (double u : event_times(t, e)) {
    if (u <= at) s *= 1.0 - deaths(t, e, u) / at_risk(t, u);
  }
  return s;
}

inline double nelson_aalen(std::span<const double> t, std::span<const int> e, double at) {
  double h = 0.0;
  for (double u : event_times(t, e)) {
    if (u <= at) h += deaths(t, e, u) / at_risk(t, u);
  }
  return h;
}

// |O_a - E_a| / sqrt(V_a), hypergeometric variance, zero-variance times skipped.
inline double log_rank(std::span<const double> ta, std::span<const int> ea, std::span<const double> tb,
                       std::span<const int> eb) {
  std::vector<double> t(ta.begin(), ta.end());
  t.insert(t.end(), tb.begin(), tb.end());
  std::vector<int> e(ea.begin(), ea.end());
  e.insert(e.end(), eb.begin(), eb.end());
  double o = 0, ex = 0, v = 0;
  for (double u : event_times(t, e)) {
    const double y = at_risk(t, u);
    const double ya = at_risk(ta, u);
    const double d = deaths(t, e, u);
    const double da = deaths(ta, ea, u);
    if (y < 2) continue;
    const double var = d * (ya / y) * (1 - ya / y) * (y - d) / (y - 1);
    if (var <= 0) continue;
    o += da;
    ex += d * ya / y;
    v += var;
  }
  return v > 0 ? std::abs(o - ex) / std::sqrt(v) : 0.0;
}

// Antolini C^td by enumerating ordered pairs. surv(i, t) is subject i's
// predicted survival at t.
inline double concordance(std::span<const double> t, std::span<const int> e,
                          const std::function<double(std::size_t, double)>& surv) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!e[i]) continue;
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (i == j) continue;
      const bool comparable = t[i] < t[j] || (t[i] == t[j] && !e[j]);
      if (!comparable) continue;
      den += 1;
      const double si = surv(i, t[i]);
      const double sj = surv(j, t[i]);
      num += si < sj ? 1.0 : (si == sj ? 0.5 : 0.0);
    }
  }
  return num / den;
}

// Breslow partial likelihood maximized by Newton-Raphson on p <= 4 covariates
// (x row-major). Returns beta.
inline std::vector<double> cox_newton(std::span<const double> x, std::size_t p, std::span<const double> t,
                                      std::span<const int> e, int iterations = 50) {
  const std::size_t n = t.size();
  std::vector<double> beta(p, 0.0);
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> grad(p, 0.0), hess(p * p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!e[i]) continue;
      double s0 = 0;
      std::vector<double> s1(p, 0.0), s2(p * p, 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        if (t[j] < t[i]) continue;
        double eta = 0;
        for (std::size_t a = 0; a < p; ++a) eta += beta[a] * x[j * p + a];
        const double w = std::exp(eta);
        s0 += w;
        for (std::size_t a = 0; a < p; ++a) {
          s1[a] += w * x[j * p + a];
          for (std::size_t b = 0; b < p; ++b) s2[a * p + b] += w * x[j * p + a] * x[j * p + b];
        }
      }
      for (std::size_t a = 0; a < p; ++a) {
        grad[a] += x[i * p + a] - s1[a] / s0;
        for (std::size_t b = 0; b < p; ++b) hess[a * p + b] += s2[a * p + b] / s0 - s1[a] * s1[b] / (s0 * s0);
      }
    }
    // Solve hess * step = grad by Gaussian elimination.
    std::vector<double> m = hess, step = grad;
    for (std::size_t c = 0; c < p; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < p; ++r) {
        if (std::abs(m[r * p + c]) > std::abs(m[piv * p + c])) piv = r;
      }
      for (std::size_t k = 0; k < p; ++k) std::swap(m[c * p + k], m[piv * p + k]);
      std::swap(step[c], step[piv]);
      for (std::size_t r = c + 1; r < p; ++r) {
        const double f = m[r * p + c] / m[c * p + c];
        for (std::size_t k = c; k < p; ++k) m[r * p + k] -= f * m[c * p + k];
        step[r] -= f * step[c];
      }
    }
    for (std::size_t c = p; c-- > 0;) {
      for (std::size_t k = c + 1; k < p; ++k) step[c] -= m[c * p + k] * step[k];
      step[c] /= m[c * p + c];
    }
    double change = 0;
    for (std::size_t a = 0; a < p; ++a) {
      beta[a] += step[a];
      change = std::max(change, std::abs(step[a]));
    }
    if (change < 1e-12) break;
  }
  return beta;
}

// Small cohort with integer durations so that ties are common.
struct SmallCohort {
  std::vector<double> durations;
  std::vector<int> events;
};

inline SmallCohort random_small_cohort(std::mt19937_64& rng, std::size_t n, int max_time = 8) {
  std::uniform_int_distribution<int> time(1, max_time);
  std::bernoulli_distribution event(0.6);
  SmallCohort c;
  for (std::size_t i = 0; i < n; ++i) {
    c.durations.push_back(time(rng));
    c.events.push_back(event(rng) ? 1 : 0);
  }
  return c;
}

}  // namespace oracle
