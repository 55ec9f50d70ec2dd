// Command-line front end: synthetic cohorts, source fitting, transfer,
// evaluation and the full experiment grid.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "tsf/core/concordance.hpp"
#include "tsf/harness/csv.hpp"
#include "tsf/harness/grid.hpp"
#include "tsf/harness/predictors.hpp"
#include "tsf/harness/synthetic.hpp"
#include "tsf/io/serialize.hpp"
#include "tsf/transfer/transfer_forest.hpp"

namespace fs = std::filesystem;
using namespace tsf;

namespace {

Cohort read_cohort(const std::string& path, const std::string& schema_path) {
  const auto schema = schema_path.empty() ? harness::CohortSchema{} : harness::load_schema(schema_path);
  return harness::load_cohort_csv(path, schema);
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "full") {
      out.push_back(harness::kFullPool);
      continue;
    }
    const auto v = harness::parse_double(item);
    if (!v || *v < 1 || *v != static_cast<double>(static_cast<std::size_t>(*v))) {
      throw CLI::ValidationError("--sizes", "bad size '" + item + "'");
    }
    out.push_back(static_cast<std::size_t>(*v));
  }
  return out;
}

// "inf" selects TSF-T_inf.
std::optional<int> parse_levels(const std::string& text) {
  if (text == "inf") return std::nullopt;
  const auto v = harness::parse_double(text);
  if (!v || *v < 1 || *v > StructureSignature::kMaxLevels || *v != static_cast<int>(*v)) {
    throw CLI::ValidationError("--k", "expected a level count or 'inf'");
  }
  return static_cast<int>(*v);
}

double evaluate(const io::Artifact& artifact, const Cohort& cohort) {
  std::vector<StepFunction> curves;
  for (std::size_t i = 0; i < cohort.n_subjects(); ++i) {
    if (const auto* f = std::get_if<Forest>(&artifact)) {
      curves.push_back(predict_survival(*f, cohort.row(i)));
    } else if (const auto* m = std::get_if<nn::NetworkModel>(&artifact)) {
      curves.push_back(nn::predict_survival(*m, cohort.row(i)));
    } else {
      throw std::runtime_error("evaluate: artifact is not a predictive model");
    }
  }
  return concordance_td(cohort, curves);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transfer survival forests and transfer-trained survival networks"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out;
  std::string schema_path;
  std::size_t n_trees = 500;
  std::size_t threads = 0;

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a shifted source/target cohort pair");
  std::size_t n_source = 5000, n_target = 728;
  synth->add_option("--seed", seed, "Master seed");
  synth->add_option("--n-source", n_source, "Source subjects");
  synth->add_option("--n-target", n_target, "Target subjects");
  synth->add_option("--out", out, "Output directory")->required();

  // fit-source
  auto* fit = app.add_subcommand("fit-source", "Fit a source forest or network and serialize it");
  std::string data_path, model = "forest", loss = "deepsurv";
  std::size_t epochs = 50;
  fit->add_option("--data", data_path, "Cohort CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--schema", schema_path, "Sidecar schema JSON")->check(CLI::ExistingFile);
  fit->add_option("--model", model, "forest | network")->check(CLI::IsMember({"forest", "network"}));
  fit->add_option("--loss", loss, "deepsurv | coxcc | deephit")->check(CLI::IsMember({"deepsurv", "coxcc", "deephit"}));
  fit->add_option("--n-trees", n_trees, "Trees in the forest");
  fit->add_option("--epochs", epochs, "Training epochs (network)");
  fit->add_option("--seed", seed, "Seed");
  fit->add_option("--threads", threads, "Worker threads (0 = all cores)");
  fit->add_option("--out", out, "Artifact path")->required();

  // extract
  auto* extract = app.add_subcommand("extract", "Extract a structure or depthwise distribution from a forest");
  std::string forest_path, k_text = "2";
  bool depthwise = false;
  extract->add_option("--forest", forest_path, "Source forest artifact")->required()->check(CLI::ExistingFile);
  extract->add_option("--k", k_text, "Levels");
  extract->add_flag("--depthwise", depthwise, "Per-depth feature frequencies (DP) instead of signatures");
  extract->add_option("--out", out, "Artifact path")->required();

  // transfer
  auto* transfer = app.add_subcommand("transfer", "Adapt a source artifact to target data");
  std::string source_path, mode = "finetune";
  std::size_t t_epochs = 50;
  transfer->add_option("--source", source_path, "Source artifact")->required()->check(CLI::ExistingFile);
  transfer->add_option("--target", data_path, "Target cohort CSV")->required()->check(CLI::ExistingFile);
  transfer->add_option("--schema", schema_path, "Sidecar schema JSON")->check(CLI::ExistingFile);
  transfer->add_option("--k", k_text, "Transferred levels for forests (integer or 'inf')");
  transfer->add_option("--n-trees", n_trees, "Target trees");
  transfer->add_option("--mode", mode, "Network protocol: source | finetune | retrain | target");
  transfer->add_option("--epochs", t_epochs, "Adaptation epochs (network)");
  transfer->add_option("--seed", seed, "Seed");
  transfer->add_option("--threads", threads, "Worker threads (0 = all cores)");
  transfer->add_option("--out", out, "Artifact path")->required();

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Time-dependent concordance of a model on a cohort");
  std::string model_path;
  eval->add_option("--model", model_path, "Model artifact")->required()->check(CLI::ExistingFile);
  eval->add_option("--data", data_path, "Cohort CSV")->required()->check(CLI::ExistingFile);
  eval->add_option("--schema", schema_path, "Sidecar schema JSON")->check(CLI::ExistingFile);

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run the cross-validated transfer grid");
  std::string source_csv, target_csv, sizes_text = "full,500,200,100,80,50,40,20";
  bool no_forests = false, no_networks = false;
  exp->add_option("--source", source_csv, "Source cohort CSV (default: synthetic pair)")->check(CLI::ExistingFile);
  exp->add_option("--target", target_csv, "Target cohort CSV (default: synthetic pair)")->check(CLI::ExistingFile);
  exp->add_option("--schema", schema_path, "Sidecar schema JSON")->check(CLI::ExistingFile);
  exp->add_option("--sizes", sizes_text, "Comma-separated training sizes; 'full' uses the whole pool");
  exp->add_option("--k", k_text, "Levels for the DP comparator");
  exp->add_option("--n-trees", n_trees, "Trees per forest");
  exp->add_option("--loss", loss, "Restrict networks to one loss (deepsurv | coxcc | deephit | all)");
  exp->add_flag("--no-forests", no_forests, "Skip forest methods");
  exp->add_flag("--no-networks", no_networks, "Skip network methods");
  exp->add_option("--seed", seed, "Master seed");
  exp->add_option("--threads", threads, "Worker threads (0 = all cores)");
  exp->add_option("--out", out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      auto spec = harness::SyntheticSpec::colorectal();
      spec.n_source = n_source;
      spec.n_target = n_target;
      spec.rng_seed = seed;
      const auto pair = harness::generate_synthetic_pair(spec);
      fs::create_directories(out);
      harness::write_cohort_csv(fs::path(out) / "source.csv", pair.source);
      harness::write_cohort_csv(fs::path(out) / "target.csv", pair.target);
      std::printf("source: %zu subjects, %zu events\ntarget: %zu subjects, %zu events\n", pair.source.n_subjects(),
                  pair.source.n_events(), pair.target.n_subjects(), pair.target.n_events());
    } else if (*fit) {
      const Cohort cohort = read_cohort(data_path, schema_path);
      if (model == "forest") {
        GrowthConfig growth;
        growth.rng_seed = seed;
        io::save_artifact(out, fit_forest(cohort, n_trees, growth, threads));
      } else {
        nn::PretrainConfig pc;
        pc.train.rng_seed = seed;
        pc.train.epochs = epochs;
        io::save_artifact(out, nn::pretrain(cohort, nn::loss_kind_from_string(loss), pc));
      }
    } else if (*extract) {
      const auto artifact = io::load_artifact(forest_path);
      const auto* forest = std::get_if<Forest>(&artifact);
      if (!forest) throw std::runtime_error("extract: --forest must be a forest artifact");
      const auto levels = parse_levels(k_text);
      if (!levels) throw std::runtime_error("extract: --k inf has no finite distribution");
      if (depthwise) {
        io::save_artifact(out, build_depthwise_distribution(*forest, *levels));
      } else {
        io::save_artifact(out, build_structure_distribution(*forest, *levels));
      }
    } else if (*transfer) {
      const auto artifact = io::load_artifact(source_path);
      const Cohort target = read_cohort(data_path, schema_path);
      TransferConfig tc;
      tc.n_target_trees = n_trees;
      tc.rng_seed = seed;
      if (const auto* forest = std::get_if<Forest>(&artifact)) {
        tc.levels = parse_levels(k_text);
        io::save_artifact(out, transfer_from_source(*forest, target, tc, threads).forest);
      } else if (const auto* dist = std::get_if<StructureDistribution>(&artifact)) {
        tc.levels = dist->levels;
        io::save_artifact(out, fit_transfer_forest(*dist, target, tc, threads).forest);
      } else if (const auto* dp = std::get_if<DepthwiseDistribution>(&artifact)) {
        tc.levels = static_cast<int>(dp->max_level());
        io::save_artifact(out, fit_dp_forest(*dp, target, tc, threads).forest);
      } else {
        const auto& pretrained = std::get<nn::NetworkModel>(artifact);
        nn::TransferProtocol protocol;
        protocol.mode = nn::transfer_mode_from_string(mode);
        protocol.target_train.epochs = t_epochs;
        protocol.target_train.rng_seed = seed;
        protocol.architecture.hidden.clear();
        const auto sizes = pretrained.net.layer_sizes();
        protocol.architecture.hidden.assign(sizes.begin() + 1, sizes.end() - 1);
        protocol.architecture.activation = pretrained.net.activation();
        if (pretrained.grid) protocol.deephit_bins = pretrained.grid->n_bins();
        io::save_artifact(out, nn::adapt(pretrained, target, protocol));
      }
    } else if (*eval) {
      const auto artifact = io::load_artifact(model_path);
      const Cohort cohort = read_cohort(data_path, schema_path);
      std::printf("c_td %.6f\n", evaluate(artifact, cohort));
    } else if (*exp) {
      Cohort source, target;
      if (source_csv.empty() != target_csv.empty()) throw std::runtime_error("experiment: give both --source and --target");
      if (source_csv.empty()) {
        auto spec = harness::SyntheticSpec::colorectal();
        spec.rng_seed = seed;
        auto pair = harness::generate_synthetic_pair(spec);
        source = std::move(pair.source);
        target = std::move(pair.target);
      } else {
        source = read_cohort(source_csv, schema_path);
        target = read_cohort(target_csv, schema_path);
      }
      harness::GridConfig config;
      config.plan.sizes = parse_sizes(sizes_text);
      config.plan.rng_seed = seed;
      config.source_trees = config.target_trees = n_trees;
      const auto levels = parse_levels(k_text);
      if (!levels) throw std::runtime_error("experiment: --k must be finite");
      config.dp_levels = *levels;
      config.n_threads = threads;
      if (no_forests) config.forest_methods.clear();
      if (no_networks) config.networks.clear();
      if (!no_networks && loss != "all" && exp->count("--loss")) {
        config.networks = {nn::loss_kind_from_string(loss)};
      }
      const auto table = harness::run_experiment_grid(source, target, config);
      fs::create_directories(out);
      harness::emit_results(table, harness::ResultFormat::Csv, fs::path(out) / "results.csv");
      harness::emit_results(table, harness::ResultFormat::Text, fs::path(out) / "results.txt");
      harness::emit_results(table, harness::ResultFormat::Trend, fs::path(out) / "trend.tsv");
      harness::write_results_text(std::cout, table);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
