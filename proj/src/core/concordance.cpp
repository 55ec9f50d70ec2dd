#include "tsf/core/concordance.hpp"

#include <cstdint>
#include <stdexcept>

namespace tsf {

double concordance_td(std::span<const double> durations, std::span<const int> events,
                      std::span<const StepFunction> curves) {
  const std::size_t n = durations.size();
  if (events.size() != n || curves.size() != n) {
    throw std::invalid_argument("concordance: one survival curve per subject required");
  }
  std::int64_t comparable = 0;
  std::int64_t concordant2 = 0;  // twice the concordance count, ties add 1
  for (std::size_t i = 0; i < n; ++i) {
    if (events[i] != 1) continue;
    const double ti = durations[i];
    const double si = curves[i](ti);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double tj = durations[j];
      const bool ok = ti < tj || (ti == tj && events[j] == 0);
      if (!ok) continue;
      ++comparable;
      const double sj = curves[j](ti);
      if (si < sj) {
        concordant2 += 2;
      } else if (si == sj) {
        concordant2 += 1;
      }
    }
  }
  if (comparable == 0) throw std::domain_error("no comparable pairs");
  return static_cast<double>(concordant2) / (2.0 * static_cast<double>(comparable));
}

double concordance_td(const Cohort& cohort, std::span<const StepFunction> curves) {
  return concordance_td(cohort.durations(), cohort.events(), curves);
}

}  // namespace tsf
