#include "tsf/harness/grid.hpp"

#include <stdexcept>

#include "tsf/core/random.hpp"
#include "tsf/harness/predictors.hpp"
#include "tsf/transfer/transfer_forest.hpp"
#include "tsf/util/parallel.hpp"

namespace tsf::harness {

namespace {

bool needs_source(ForestMethod m) { return m != ForestMethod::Target; }
bool needs_source(NetworkMethod m) { return m != NetworkMethod::Target; }

int levels_of(ForestMethod m) { return m == ForestMethod::Tsf1 ? 1 : 2; }

TransferConfig transfer_config(const GridConfig& config, std::optional<int> levels, std::uint64_t seed) {
  TransferConfig t;
  t.n_target_trees = config.target_trees;
  t.levels = levels;
  t.growth = config.target_growth;
  t.rng_seed = seed;
  return t;
}

struct Job {
  std::size_t row;
  std::size_t column;
  std::size_t fold;
};

}  // namespace

std::string method_name(ForestMethod m) {
  switch (m) {
    case ForestMethod::Target: return "Target";
    case ForestMethod::Source: return "Source";
    case ForestMethod::Tsf1: return "TSF-T1";
    case ForestMethod::Tsf2: return "TSF-T2";
    case ForestMethod::TsfUnlimited: return "TSF-Tinf";
    case ForestMethod::Dp: return "DP";
  }
  throw std::invalid_argument("unknown forest method");
}

std::string method_name(NetworkMethod m) {
  switch (m) {
    case NetworkMethod::Target: return "Target";
    case NetworkMethod::Source: return "Source";
    case NetworkMethod::FineTune: return "FT";
    case NetworkMethod::Retrain: return "RT";
  }
  throw std::invalid_argument("unknown network method");
}

std::string family_name(nn::LossKind kind) {
  switch (kind) {
    case nn::LossKind::DeepSurv: return "DeepSurv";
    case nn::LossKind::CoxCC: return "Cox-CC";
    case nn::LossKind::DeepHit: return "DeepHit";
  }
  throw std::invalid_argument("unknown loss kind");
}

std::vector<Column> GridConfig::columns() const {
  std::vector<Column> out;
  for (auto m : forest_methods) out.push_back({kForestFamily, method_name(m)});
  for (auto kind : networks) {
    for (auto m : network_methods) out.push_back({family_name(kind), method_name(m)});
  }
  return out;
}

SourceModels fit_source_models(const Cohort& source, const GridConfig& config) {
  SourceModels out;
  const std::uint64_t seed = config.plan.rng_seed;
  bool forest = false, dp = false;
  for (auto m : config.forest_methods) {
    forest = forest || needs_source(m);
    dp = dp || m == ForestMethod::Dp;
  }
  if (forest) {
    GrowthConfig growth = config.source_growth;
    growth.rng_seed = derive_seed(seed, "source-forest");
    out.forest = std::make_shared<const Forest>(fit_forest(source, config.source_trees, growth, config.n_threads));
    for (auto m : config.forest_methods) {
      if (m == ForestMethod::Tsf1 || m == ForestMethod::Tsf2) {
        out.structures.emplace(levels_of(m), build_structure_distribution(*out.forest, levels_of(m)));
      }
    }
    if (dp) out.depthwise = build_depthwise_distribution(*out.forest, config.dp_levels);
  }

  bool networks = false;
  for (auto m : config.network_methods) networks = networks || needs_source(m);
  if (networks) {
    std::vector<nn::NetworkModel> fitted(config.networks.size());
    parallel_for(config.networks.size(), config.n_threads, [&](std::size_t k) {
      nn::PretrainConfig pc = config.pretrain;
      pc.train.rng_seed = derive_seed(seed, "pretrain", {static_cast<std::uint64_t>(config.networks[k])});
      fitted[k] = nn::pretrain(source, config.networks[k], pc);
    });
    for (std::size_t k = 0; k < fitted.size(); ++k) {
      out.networks[config.networks[k]] = std::make_shared<const nn::NetworkModel>(std::move(fitted[k]));
    }
  }
  return out;
}

ModelFactory forest_factory(ForestMethod method, const SourceModels& source, const GridConfig& config) {
  if (needs_source(method) && !source.forest) throw std::invalid_argument("grid: source forest not fitted");
  switch (method) {
    case ForestMethod::Target:
      return [&config](const Cohort& train, std::uint64_t seed) -> std::unique_ptr<SurvivalPredictor> {
        GrowthConfig growth = config.target_growth;
        growth.rng_seed = seed;
        return std::make_unique<ForestPredictor>(fit_forest(train, config.target_trees, growth, 1));
      };
    case ForestMethod::Source: {
      auto forest = source.forest;
      return [forest](const Cohort&, std::uint64_t) -> std::unique_ptr<SurvivalPredictor> {
        return std::make_unique<ForestPredictor>(forest);
      };
    }
    case ForestMethod::Tsf1:
    case ForestMethod::Tsf2: {
      const auto it = source.structures.find(levels_of(method));
      if (it == source.structures.end()) throw std::invalid_argument("grid: structure distribution missing");
      const StructureDistribution* dist = &it->second;
      const int k = levels_of(method);
      return [&config, dist, k](const Cohort& train, std::uint64_t seed) -> std::unique_ptr<SurvivalPredictor> {
        return std::make_unique<ForestPredictor>(
            fit_transfer_forest(*dist, train, transfer_config(config, k, seed), 1).forest);
      };
    }
    case ForestMethod::TsfUnlimited: {
      auto forest = source.forest;
      return [&config, forest](const Cohort& train, std::uint64_t seed) -> std::unique_ptr<SurvivalPredictor> {
        return std::make_unique<ForestPredictor>(
            fit_transfer_forest_unlimited(*forest, train, transfer_config(config, std::nullopt, seed), 1).forest);
      };
    }
    case ForestMethod::Dp: {
      if (!source.depthwise) throw std::invalid_argument("grid: depthwise distribution missing");
      const DepthwiseDistribution* dp = &*source.depthwise;
      return [&config, dp](const Cohort& train, std::uint64_t seed) -> std::unique_ptr<SurvivalPredictor> {
        return std::make_unique<ForestPredictor>(
            fit_dp_forest(*dp, train, transfer_config(config, config.dp_levels, seed), 1).forest);
      };
    }
  }
  throw std::invalid_argument("unknown forest method");
}

ModelFactory network_factory(nn::LossKind kind, NetworkMethod method, const SourceModels& source,
                             const GridConfig& config) {
  std::shared_ptr<const nn::NetworkModel> pretrained;
  if (const auto it = source.networks.find(kind); it != source.networks.end()) pretrained = it->second;
  if (needs_source(method) && !pretrained) throw std::invalid_argument("grid: pretrained network missing");
  if (method == NetworkMethod::Source) {
    return [pretrained](const Cohort&, std::uint64_t) -> std::unique_ptr<SurvivalPredictor> {
      return std::make_unique<NetworkPredictor>(pretrained);
    };
  }
  nn::TransferProtocol protocol;
  protocol.refit_baseline = config.refit_baseline;
  protocol.architecture = config.pretrain.architecture;
  protocol.deephit_bins = config.pretrain.deephit_bins;
  switch (method) {
    case NetworkMethod::Target:
      protocol.mode = nn::TransferMode::TargetOnly;
      protocol.target_train = config.target_only_train;
      break;
    case NetworkMethod::FineTune:
      protocol.mode = nn::TransferMode::FineTune;
      protocol.target_train = config.finetune_train;
      break;
    default:
      protocol.mode = nn::TransferMode::Retrain;
      protocol.target_train = config.retrain_train;
      break;
  }
  return [kind, pretrained, protocol](const Cohort& train, std::uint64_t seed) -> std::unique_ptr<SurvivalPredictor> {
    nn::TransferProtocol p = protocol;
    p.target_train.rng_seed = seed;
    if (pretrained) return std::make_unique<NetworkPredictor>(nn::adapt(*pretrained, train, p));
    // Target-only without a pretrained model: only the loss kind and width matter.
    nn::NetworkModel shell;
    shell.kind = kind;
    shell.net = nn::SurvivalNetwork({train.n_features(), 1}, nn::Activation::Relu, nn::OutputHead::Linear, 0);
    return std::make_unique<NetworkPredictor>(nn::adapt(shell, train, p));
  };
}

ResultsTable run_experiment_grid(const Cohort& target, const SourceModels& source, const GridConfig& config) {
  config.plan.validate();
  const auto& plan = config.plan;
  ResultsTable table;
  table.sizes = plan.sizes;
  table.columns = config.columns();

  std::vector<ModelFactory> factories;
  std::vector<bool> is_source;
  for (auto m : config.forest_methods) {
    factories.push_back(forest_factory(m, source, config));
    is_source.push_back(m == ForestMethod::Source);
  }
  for (auto kind : config.networks) {
    for (auto m : config.network_methods) {
      factories.push_back(network_factory(kind, m, source, config));
      is_source.push_back(m == NetworkMethod::Source);
    }
  }

  const auto folds = assign_folds(target, plan.n_folds, plan.rng_seed);
  std::vector<Cohort> tests;
  for (std::size_t k = 0; k < plan.n_folds; ++k) tests.push_back(target.subset(fold_members(folds, k)));
  std::vector<std::vector<Cohort>> trains(plan.sizes.size());
  for (std::size_t r = 0; r < plan.sizes.size(); ++r) {
    for (std::size_t k = 0; k < plan.n_folds; ++k) {
      trains[r].push_back(target.subset(training_subjects(target, folds, k, plan.sizes[r], plan.rng_seed)));
    }
  }

  std::vector<Job> jobs;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    const std::size_t rows = is_source[c] ? std::min<std::size_t>(1, plan.sizes.size()) : plan.sizes.size();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t k = 0; k < plan.n_folds; ++k) jobs.push_back({r, c, k});
    }
  }

  std::vector<std::optional<double>> scores(jobs.size());
  parallel_for(jobs.size(), config.n_threads, [&](std::size_t j) {
    const Job& job = jobs[j];
    if (tests[job.fold].n_events() == 0) return;
    const Column& col = table.columns[job.column];
    const std::uint64_t seed =
        derive_seed(model_seed(plan.rng_seed, plan.sizes[job.row], job.fold), col.family + "/" + col.method);
    const auto model = factories[job.column](trains[job.row][job.fold], seed);
    scores[j] = evaluate_predictor(*model, tests[job.fold]);
  });

  table.cells.assign(plan.sizes.size(), std::vector<Cell>(table.columns.size()));
  for (auto& row : table.cells) {
    for (auto& cell : row) cell.folds.resize(plan.n_folds);
  }
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const Job& job = jobs[j];
    if (is_source[job.column]) {
      for (auto& row : table.cells) row[job.column].folds[job.fold] = scores[j];
    } else {
      table.cells[job.row][job.column].folds[job.fold] = scores[j];
    }
  }
  for (auto& row : table.cells) {
    for (auto& cell : row) {
      CvResult cv{cell.folds, 0};
      for (const auto& s : cell.folds) cv.n_absent += !s.has_value();
      cell.mean = cv.mean();
      cell.sd = cv.sd();
      cell.n_valid = cv.n_valid();
      cell.n_absent = cv.n_absent;
    }
  }
  table.mark();
  return table;
}

ResultsTable run_experiment_grid(const Cohort& source, const Cohort& target, const GridConfig& config) {
  return run_experiment_grid(target, fit_source_models(source, config), config);
}

}  // namespace tsf::harness
