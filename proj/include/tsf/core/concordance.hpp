#pragma once

#include <span>

#include "tsf/core/cohort.hpp"
#include "tsf/core/step_function.hpp"

namespace tsf {

// Time-dependent concordance (Antolini). A pair (i, j) is comparable when i
// has an event and T_i < T_j, or T_i == T_j with j censored. It is concordant
// when S_i(T_i) < S_j(T_i); equal predictions count one half.
// Throws std::domain_error("no comparable pairs").
double concordance_td(std::span<const double> durations, std::span<const int> events,
                      std::span<const StepFunction> predicted_survival);

double concordance_td(const Cohort& cohort, std::span<const StepFunction> predicted_survival);

}  // namespace tsf
