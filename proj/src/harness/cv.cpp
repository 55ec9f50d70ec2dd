#include "tsf/harness/cv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tsf/core/concordance.hpp"
#include "tsf/core/random.hpp"
#include "tsf/util/parallel.hpp"

namespace tsf::harness {

void CvPlan::validate() const {
  if (n_folds < 2) throw std::invalid_argument("cv: need at least two folds");
}

std::vector<std::size_t> assign_folds(const Cohort& cohort, std::size_t n_folds, std::uint64_t seed) {
  if (n_folds < 2 || n_folds > cohort.n_subjects()) throw std::invalid_argument("cv: infeasible fold count");
  std::vector<std::size_t> events, censored;
  for (std::size_t i = 0; i < cohort.n_subjects(); ++i) (cohort.events()[i] ? events : censored).push_back(i);
  Rng rng = make_rng(derive_seed(seed, "folds"));
  std::shuffle(events.begin(), events.end(), rng);
  std::shuffle(censored.begin(), censored.end(), rng);
  std::vector<std::size_t> folds(cohort.n_subjects());
  std::size_t k = 0;
  // Censored subjects continue the deal where the events stopped so fold
  // sizes also differ by at most one.
  for (std::size_t i : events) folds[i] = k++ % n_folds;
  for (std::size_t i : censored) folds[i] = k++ % n_folds;
  return folds;
}

std::vector<std::size_t> fold_members(std::span<const std::size_t> folds, std::size_t fold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < folds.size(); ++i) {
    if (folds[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> fold_complement(std::span<const std::size_t> folds, std::size_t fold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < folds.size(); ++i) {
    if (folds[i] != fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> stratified_subsample(const Cohort& cohort, std::span<const std::size_t> pool,
                                              std::size_t n, std::uint64_t seed) {
  if (n == kFullPool || n == pool.size()) return {pool.begin(), pool.end()};
  if (n > pool.size()) {
    throw std::invalid_argument("cv: training size " + std::to_string(n) + " exceeds pool of " +
                                std::to_string(pool.size()));
  }
  std::vector<std::size_t> events, censored;
  for (std::size_t i : pool) (cohort.events()[i] ? events : censored).push_back(i);
  const double share = static_cast<double>(events.size()) / static_cast<double>(pool.size());
  auto n_events = static_cast<std::size_t>(std::llround(share * static_cast<double>(n)));
  if (n_events == 0 && !events.empty() && n >= 2) n_events = 1;
  n_events = std::min(n_events, events.size());
  if (n - n_events > censored.size()) n_events = n - censored.size();

  Rng rng = make_rng(seed);
  std::shuffle(events.begin(), events.end(), rng);
  std::shuffle(censored.begin(), censored.end(), rng);
  std::vector<std::size_t> out(events.begin(), events.begin() + static_cast<std::ptrdiff_t>(n_events));
  out.insert(out.end(), censored.begin(), censored.begin() + static_cast<std::ptrdiff_t>(n - n_events));
  std::sort(out.begin(), out.end());
  return out;
}

double CvResult::mean() const {
  double sum = 0.0;
  for (const auto& s : fold_scores) {
    if (s) sum += *s;
  }
  return n_valid() == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n_valid());
}

double CvResult::sd() const {
  if (n_valid() < 2) return n_valid() == 1 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  const double m = mean();
  double ss = 0.0;
  for (const auto& s : fold_scores) {
    if (s) ss += (*s - m) * (*s - m);
  }
  return std::sqrt(ss / static_cast<double>(n_valid() - 1));
}

std::optional<double> evaluate_predictor(const SurvivalPredictor& model, const Cohort& test) {
  if (test.n_events() == 0) return std::nullopt;
  std::vector<StepFunction> curves;
  curves.reserve(test.n_subjects());
  for (std::size_t i = 0; i < test.n_subjects(); ++i) curves.push_back(model.predict(test.row(i)));
  try {
    return concordance_td(test, curves);
  } catch (const std::domain_error&) {
    return std::nullopt;
  }
}

std::vector<std::size_t> training_subjects(const Cohort& target, std::span<const std::size_t> folds,
                                           std::size_t fold, std::size_t size, std::uint64_t seed) {
  const auto pool = fold_complement(folds, fold);
  return stratified_subsample(target, pool, size, derive_seed(seed, "subsample", {size, fold}));
}

std::uint64_t model_seed(std::uint64_t seed, std::size_t size, std::size_t fold) {
  return derive_seed(seed, "model", {size, fold});
}

CvResult run_cv(const Cohort& target, const CvPlan& plan, const ModelFactory& factory, std::size_t size,
                std::size_t n_threads) {
  plan.validate();
  const auto folds = assign_folds(target, plan.n_folds, plan.rng_seed);
  CvResult result;
  result.fold_scores.resize(plan.n_folds);
  parallel_for(plan.n_folds, n_threads, [&](std::size_t k) {
    const Cohort test = target.subset(fold_members(folds, k));
    if (test.n_events() == 0) return;
    const Cohort train = target.subset(training_subjects(target, folds, k, size, plan.rng_seed));
    const auto model = factory(train, model_seed(plan.rng_seed, size, k));
    result.fold_scores[k] = evaluate_predictor(*model, test);
  });
  for (const auto& s : result.fold_scores) result.n_absent += !s.has_value();
  return result;
}

}  // namespace tsf::harness
