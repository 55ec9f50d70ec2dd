#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tsf/forest/forest.hpp"
#include "tsf/harness/cv.hpp"
#include "tsf/harness/results.hpp"
#include "tsf/nn/model.hpp"
#include "tsf/transfer/structure.hpp"
#include "tsf/transfer_nn/protocol.hpp"

namespace tsf::harness {

enum class ForestMethod { Target, Source, Tsf1, Tsf2, TsfUnlimited, Dp };
enum class NetworkMethod { Target, Source, FineTune, Retrain };

std::string method_name(ForestMethod m);
std::string method_name(NetworkMethod m);
std::string family_name(nn::LossKind kind);
inline const std::string kForestFamily = "RSF";

struct GridConfig {
  CvPlan plan;

  std::vector<ForestMethod> forest_methods{ForestMethod::Target, ForestMethod::Source, ForestMethod::Tsf1,
                                           ForestMethod::Tsf2,   ForestMethod::TsfUnlimited, ForestMethod::Dp};
  std::size_t source_trees = 500;
  std::size_t target_trees = 500;
  GrowthConfig source_growth;
  GrowthConfig target_growth;  // target-only forests and growth below transferred levels
  int dp_levels = 2;

  std::vector<nn::LossKind> networks{nn::LossKind::DeepSurv, nn::LossKind::CoxCC, nn::LossKind::DeepHit};
  std::vector<NetworkMethod> network_methods{NetworkMethod::Target, NetworkMethod::Source, NetworkMethod::FineTune,
                                             NetworkMethod::Retrain};
  nn::PretrainConfig pretrain;
  nn::TrainConfig target_only_train;
  nn::TrainConfig finetune_train;
  nn::TrainConfig retrain_train;
  bool refit_baseline = true;

  std::size_t n_threads = 0;  // 0: hardware concurrency

  std::vector<Column> columns() const;
};

// Everything fitted on the source domain, once per grid.
struct SourceModels {
  std::shared_ptr<const Forest> forest;
  std::map<int, StructureDistribution> structures;  // by transferred levels
  std::optional<DepthwiseDistribution> depthwise;
  std::map<nn::LossKind, std::shared_ptr<const nn::NetworkModel>> networks;
};

SourceModels fit_source_models(const Cohort& source, const GridConfig& config);

ModelFactory forest_factory(ForestMethod method, const SourceModels& source, const GridConfig& config);
ModelFactory network_factory(nn::LossKind kind, NetworkMethod method, const SourceModels& source,
                             const GridConfig& config);

// Rows follow config.plan.sizes, columns follow config.columns(). Each
// (size, fold, method) is an independent job; the Source columns are
// evaluated once per fold and repeated on every row.
ResultsTable run_experiment_grid(const Cohort& target, const SourceModels& source, const GridConfig& config);
ResultsTable run_experiment_grid(const Cohort& source, const Cohort& target, const GridConfig& config);

}  // namespace tsf::harness
