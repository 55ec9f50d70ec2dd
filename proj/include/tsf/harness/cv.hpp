#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "tsf/core/cohort.hpp"
#include "tsf/core/step_function.hpp"

namespace tsf::harness {

// Training subsample sizes; kFullPool trains on every non-test subject.
inline constexpr std::size_t kFullPool = 0;

struct CvPlan {
  std::size_t n_folds = 10;
  std::vector<std::size_t> sizes{kFullPool, 500, 200, 100, 80, 50, 40, 20};
  std::uint64_t rng_seed = 0;

  void validate() const;
};

// Fold id per subject, stratified by event indicator: events and censored
// subjects are shuffled separately and dealt round-robin, so every fold's
// event count is within one of the scaled global count. Depends only on the
// cohort and the seed.
std::vector<std::size_t> assign_folds(const Cohort& cohort, std::size_t n_folds, std::uint64_t seed);

// Subjects of fold `fold` (test) or of every other fold (training pool),
// ascending.
std::vector<std::size_t> fold_members(std::span<const std::size_t> folds, std::size_t fold);
std::vector<std::size_t> fold_complement(std::span<const std::size_t> folds, std::size_t fold);

// n subjects from `pool` without replacement, stratified by event indicator
// (at least one event when the pool has one and n >= 2). n == kFullPool or
// n == pool size returns the pool. Throws std::invalid_argument when n
// exceeds the pool.
std::vector<std::size_t> stratified_subsample(const Cohort& cohort, std::span<const std::size_t> pool,
                                              std::size_t n, std::uint64_t seed);

class SurvivalPredictor {
 public:
  virtual ~SurvivalPredictor() = default;
  virtual StepFunction predict(std::span<const double> x) const = 0;
};

using ModelFactory =
    std::function<std::unique_ptr<SurvivalPredictor>(const Cohort& train, std::uint64_t seed)>;

struct CvResult {
  std::vector<std::optional<double>> fold_scores;  // absent: no test events / no comparable pairs
  std::size_t n_absent = 0;

  std::size_t n_valid() const { return fold_scores.size() - n_absent; }
  double mean() const;  // NaN when every fold is absent
  double sd() const;    // sample sd; 0 with one valid fold
};

// Held-out C^td of the fitted model on one cohort.
std::optional<double> evaluate_predictor(const SurvivalPredictor& model, const Cohort& test);

// Training subjects for (size, fold): the deterministic stratified draw shared
// by every method so comparisons use the same data.
std::vector<std::size_t> training_subjects(const Cohort& target, std::span<const std::size_t> folds,
                                           std::size_t fold, std::size_t size, std::uint64_t seed);

// Seed handed to the model factory for (size, fold).
std::uint64_t model_seed(std::uint64_t seed, std::size_t size, std::size_t fold);

CvResult run_cv(const Cohort& target, const CvPlan& plan, const ModelFactory& factory, std::size_t size,
                std::size_t n_threads = 1);

}  // namespace tsf::harness
