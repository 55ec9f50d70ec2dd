// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--only NAME]... [--known-failures NAME[:TAG],...]
//
// Exit status is 0 when the failing checks equal the known-failure list
// (empty by default), so ctest notices both regressions and checks that
// start passing. NAME alone stands for untagged checks of that criterion.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "tsf/core/concordance.hpp"
#include "tsf/core/estimators.hpp"
#include "tsf/core/log_rank.hpp"
#include "tsf/forest/forest.hpp"
#include "tsf/harness/grid.hpp"
#include "tsf/harness/synthetic.hpp"
#include "tsf/io/serialize.hpp"
#include "tsf/nn/losses.hpp"
#include "tsf/nn/model.hpp"
#include "tsf/nn/train.hpp"
#include "tsf/transfer/structure.hpp"
#include "tsf/transfer/transfer_forest.hpp"
#include "tsf/transfer_nn/protocol.hpp"

using namespace tsf;
using namespace tsf::harness;

namespace {

// `tag` names a sub-check so that a known failure can be pinned to it.
struct Outcome {
  bool pass = true;
  std::set<std::string> failed_tags;
  std::ostringstream detail;
  void require(bool ok, const std::string& what, const std::string& tag = "") {
    if (!ok) {
      pass = false;
      failed_tags.insert(tag);
      detail << " [failed: " << what << "]";
    }
  }
};

struct Criterion {
  std::string name;
  double budget_seconds;
  std::function<void(Outcome&)> run;
};

double held_out_ctd(const Forest& f, const Cohort& test) {
  std::vector<StepFunction> curves;
  for (std::size_t i = 0; i < test.n_subjects(); ++i) curves.push_back(predict_survival(f, test.row(i)));
  return concordance_td(test, curves);
}

void estimator_oracles(Outcome& out) {
  std::mt19937_64 rng(20240601);
  double worst = 0.0;
  std::size_t n_ctd = 0;
  for (int rep = 0; rep < 200; ++rep) {
    auto c = oracle::random_small_cohort(rng, 1 + rep % 30);
    auto table = build_event_table(c.durations, c.events);
    auto na = nelson_aalen(table);
    auto km = kaplan_meier(table);
    for (double t = 0.0; t <= 9.0; t += 0.25) {
      worst = std::max(worst, std::abs(na(t) - oracle::nelson_aalen(c.durations, c.events, t)));
      worst = std::max(worst, std::abs(km(t) - oracle::kaplan_meier(c.durations, c.events, t)));
    }

    auto b = oracle::random_small_cohort(rng, 1 + (rep * 7) % 30);
    const double lr = log_rank_statistic({c.durations, c.events}, {b.durations, b.events});
    worst = std::max(worst, std::abs(lr - oracle::log_rank(c.durations, c.events, b.durations, b.events)));

    // Coarse curves so that prediction ties occur.
    std::uniform_int_distribution<int> drop(0, 3);
    std::vector<StepFunction> curves;
    for (std::size_t i = 0; i < c.durations.size(); ++i) {
      std::vector<double> knots, values;
      double s = 1.0;
      for (int t = 1; t <= 8; ++t) {
        s = std::max(0.0, s - 0.1 * drop(rng));
        knots.push_back(t);
        values.push_back(s);
      }
      curves.emplace_back(knots, values, 1.0);
    }
    const double expected =
        oracle::concordance(c.durations, c.events, [&](std::size_t i, double u) { return curves[i](u); });
    if (std::isfinite(expected)) {
      worst = std::max(worst, std::abs(concordance_td(c.durations, c.events, curves) - expected));
      ++n_ctd;
    } else {
      bool threw = false;
      try {
        concordance_td(c.durations, c.events, curves);
      } catch (const std::domain_error&) {
        threw = true;
      }
      out.require(threw, "C^td without comparable pairs must throw");
    }
  }
  out.detail << "200 cohorts, " << n_ctd << " with comparable pairs, max abs diff " << worst;
  out.require(worst <= 1e-10, "max abs diff <= 1e-10");
}

template <class F>
std::vector<double> numeric_gradient(F&& f, std::vector<double> x, double h = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

std::vector<double> flatten_grads(const std::vector<nn::DenseLayer>& grads) {
  std::vector<double> out;
  for (const auto& g : grads) {
    out.insert(out.end(), g.weights.begin(), g.weights.end());
    out.insert(out.end(), g.bias.begin(), g.bias.end());
  }
  return out;
}

void gradient_gate(Outcome& out) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> z(0, 1);
  std::uniform_int_distribution<std::size_t> width(2, 6), subjects(2, 10);
  double worst = 0.0;
  std::size_t n_instances = 0;
  for (nn::LossKind kind : {nn::LossKind::DeepSurv, nn::LossKind::CoxCC, nn::LossKind::DeepHit}) {
    for (int rep = 0; rep < 50; ++rep) {
      const std::size_t n = subjects(rng), p = width(rng);
      auto c = oracle::random_small_cohort(rng, n, 6);
      c.events[0] = 1;
      std::vector<double> x(n * p);
      for (auto& v : x) v = z(rng);
      const bool hit = kind == nn::LossKind::DeepHit;
      nn::DiscreteTimeGrid grid({0, 2, 4, 6});
      const auto act = rep % 2 ? nn::Activation::Relu : nn::Activation::Tanh;
      nn::SurvivalNetwork net({p, width(rng), width(rng), hit ? 3u : 1u}, act,
                              hit ? nn::OutputHead::Softmax : nn::OutputHead::Linear, 1000 + rep);
      // Random biases too: with zero biases a layer fed only by dead ReLUs sits
      // exactly on the kink, where central differences halve the derivative.
      auto params = net.flatten();
      for (auto& v : params) v = 0.5 * z(rng);
      net.assign(params);
      nn::TrainConfig cfg;
      cfg.control_size = 2;
      const nn::DiscreteTimeGrid* gp = hit ? &grid : nullptr;
      Rng r0(rep);
      auto obj = nn::evaluate_objective(net, x, c.durations, c.events, kind, cfg, gp, r0);
      auto num = numeric_gradient(
          [&](const std::vector<double>& flat) {
            nn::SurvivalNetwork copy = net;
            copy.assign(flat);
            Rng r(rep);
            return nn::evaluate_objective(copy, x, c.durations, c.events, kind, cfg, gp, r).value;
          },
          net.flatten());
      const auto analytic = flatten_grads(obj.grads);
      for (std::size_t i = 0; i < num.size(); ++i) {
        const double scale = std::max({std::abs(analytic[i]), std::abs(num[i]), 1e-4});
        worst = std::max(worst, std::abs(analytic[i] - num[i]) / scale);
      }
      ++n_instances;
    }
  }
  out.detail << n_instances << " instances (3 losses x 50), max relative error " << worst;
  out.require(worst < 1e-5, "relative error < 1e-5");
}

void cox_recovery(Outcome& out) {
  SyntheticSpec spec;
  spec.covariates = {{"a", false, 0.0, 1.0, -1e9}, {"b", false, 0.0, 1.0, -1e9}};
  spec.beta = {1.0, -1.0};
  spec.censoring_rate = 0.3;
  spec.weibull_scale = 10.0;
  spec.weibull_shape = 1.0;
  spec.time_resolution = 1000;
  auto c = generate_synthetic_cohort(spec, 5000, false, 123);
  auto beta = oracle::cox_newton(c.covariates(), 2, c.durations(), c.events());
  nn::SurvivalNetwork net({2, 1}, nn::Activation::Relu, nn::OutputHead::Linear, 1);
  nn::TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.epochs = 40;
  cfg.batch_size = 256;
  cfg.rng_seed = 2;
  const auto fitted = nn::train(net, c, nn::LossKind::DeepSurv, cfg);
  const auto& w = fitted.net.output_layer().weights;
  out.detail << "network (" << w[0] << ", " << w[1] << "), Newton-Raphson (" << beta[0] << ", " << beta[1] << ")";
  out.require(std::abs(w[0] - beta[0]) <= 0.15 && std::abs(w[1] - beta[1]) <= 0.15, "within 0.15 of oracle");
}

void structure_fidelity(Outcome& out) {
  auto source = fixture::signal_cohort(2000, 1);
  auto target = fixture::signal_cohort(300, 2);
  GrowthConfig g;
  g.rng_seed = 3;
  auto dist = build_structure_distribution(fit_forest(source, 100, g, 0), 2);
  TransferConfig cfg;
  cfg.n_target_trees = 100;
  cfg.levels = 2;
  cfg.rng_seed = 4;
  auto res = fit_transfer_forest(dist, target, cfg, 0);
  std::size_t n_mismatch = 0, unexplained = 0, off_support = 0;
  for (std::size_t t = 0; t < res.forest.n_trees(); ++t) {
    const auto& proto = res.trace.prototypes[t];
    if (dist.probability_of(proto) <= 0.0) ++off_support;
    auto mm = signature_mismatches(proto, extract_signature(res.forest.trees[t], 2));
    n_mismatch += mm.size();
    if (!mismatches_explained(mm, res.trace.truncated[t])) ++unexplained;
  }
  out.detail << res.forest.n_trees() << " trees, " << n_mismatch << " mismatched positions, "
             << res.trace.total_truncated() << " truncations, " << unexplained << " unexplained";
  out.require(res.forest.n_trees() == 100, "100 trees");
  out.require(off_support == 0, "prototypes drawn from the support");
  out.require(unexplained == 0, "every mismatch explained by a truncation");
}

void self_transfer(Outcome& out) {
  double tsf = 0.0, rsf = 0.0;
  const int seeds = 10;
  for (int seed = 1; seed <= seeds; ++seed) {
    auto source = fixture::signal_cohort(5000, derive_seed(seed, "source"));
    auto target = fixture::signal_cohort(500, derive_seed(seed, "target"));
    auto test = fixture::signal_cohort(1000, derive_seed(seed, "test"));
    GrowthConfig g;
    g.rng_seed = derive_seed(seed, "source-rsf");
    auto src = fit_forest(source, 100, g, 0);
    g.rng_seed = derive_seed(seed, "target-rsf");
    auto baseline = fit_forest(target, 100, g, 0);
    TransferConfig cfg;
    cfg.n_target_trees = 100;
    cfg.levels = 2;
    cfg.rng_seed = derive_seed(seed, "tsf");
    auto transferred = transfer_from_source(src, target, cfg, 0);
    tsf += held_out_ctd(transferred.forest, test) / seeds;
    rsf += held_out_ctd(baseline, test) / seeds;
  }
  out.detail << "TSF-T2 " << tsf << ", RSF " << rsf << ", diff " << tsf - rsf;
  out.require(std::abs(tsf - rsf) <= 0.02, "|TSF-T2 - RSF| <= 0.02");
}

GridConfig trend_grid(std::uint64_t seed) {
  GridConfig g;
  g.plan.sizes = {500, 200, 80, 40, 20};
  g.plan.rng_seed = seed;
  g.source_trees = 100;
  g.target_trees = 100;
  g.pretrain.train.rng_seed = seed;
  return g;
}

void trend(Outcome& out) {
  const int seeds = 10;
  std::map<std::pair<std::string, std::string>, std::vector<double>> mean;  // (family, method) -> per size
  std::vector<std::size_t> sizes;
  for (int seed = 1; seed <= seeds; ++seed) {
    auto spec = SyntheticSpec::colorectal();
    spec.rng_seed = seed;
    auto pair = generate_synthetic_pair(spec);
    const auto g = trend_grid(seed);
    auto table = run_experiment_grid(pair.source, pair.target, g);
    sizes = table.sizes;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      auto& m = mean[{table.columns[c].family, table.columns[c].method}];
      m.resize(sizes.size(), 0.0);
      for (std::size_t r = 0; r < sizes.size(); ++r) m[r] += table.cells[r][c].mean / seeds;
    }
  }
  auto at = [&](const std::string& family, const std::string& method, std::size_t r) {
    return mean.at({family, method})[r];
  };
  // TSF: best transferred-structure variant at each size.
  auto tsf = [&](std::size_t r) {
    return std::max({at(kForestFamily, "TSF-T1", r), at(kForestFamily, "TSF-T2", r), at(kForestFamily, "TSF-Tinf", r)});
  };
  const std::size_t last = sizes.size() - 1;
  bool a = true;
  for (std::size_t r : {std::size_t{0}, std::size_t{1}}) {
    out.detail << "\n    (a) n=" << sizes[r] << " TSF " << tsf(r) << " vs Target " << at(kForestFamily, "Target", r);
    a = a && tsf(r) > at(kForestFamily, "Target", r);
  }
  const bool b = tsf(last) < at(kForestFamily, "Source", last);
  out.detail << "\n    (b) n=" << sizes[last] << " TSF " << tsf(last) << " vs Source "
             << at(kForestFamily, "Source", last);
  int small_ok = 0, large_ok = 0;
  for (auto kind : {nn::LossKind::DeepSurv, nn::LossKind::CoxCC, nn::LossKind::DeepHit}) {
    const auto f = family_name(kind);
    const double ft_small = at(f, "FT", last), rt_small = at(f, "RT", last);
    const double ft_large = at(f, "FT", 0), rt_large = at(f, "RT", 0);
    small_ok += ft_small >= rt_small;
    large_ok += rt_large >= ft_large;
    out.detail << "\n    (c) " << f << ": n=" << sizes[last] << " FT " << ft_small << " RT " << rt_small << "; n="
               << sizes[0] << " FT " << ft_large << " RT " << rt_large;
  }
  out.detail << "\n    (c) FT >= RT at n=" << sizes[last] << " for " << small_ok << "/3, RT >= FT at n=" << sizes[0]
             << " for " << large_ok << "/3";
  out.require(a, "(a) TSF above Target at the two largest sizes", "a");
  out.require(b, "(b) TSF below Source at the smallest size", "b");
  out.require(small_ok >= 2 && large_ok >= 2, "(c) network mode ordering for 2 of 3 models", "c");
}

std::string grid_csv(const ResultsTable& t) {
  std::ostringstream s;
  write_results_csv(s, t);
  return s.str();
}

bool same_predictions(const std::function<StepFunction(std::span<const double>)>& a,
                      const std::function<StepFunction(std::span<const double>)>& b, const Cohort& c) {
  for (std::size_t i = 0; i < c.n_subjects(); ++i) {
    if (!(a(c.row(i)) == b(c.row(i)))) return false;
  }
  return true;
}

void determinism(Outcome& out) {
  auto spec = SyntheticSpec::colorectal();
  spec.n_source = 1500;
  spec.rng_seed = 5;
  auto pair = generate_synthetic_pair(spec);
  GridConfig g;
  g.plan.sizes = {kFullPool, 80, 20};
  g.plan.rng_seed = 5;
  g.source_trees = 30;
  g.target_trees = 30;
  g.pretrain.train.epochs = 10;
  g.target_only_train.epochs = 10;
  g.finetune_train.epochs = 10;
  g.retrain_train.epochs = 10;
  g.n_threads = 1;
  const auto first = grid_csv(run_experiment_grid(pair.source, pair.target, g));
  const auto second = grid_csv(run_experiment_grid(pair.source, pair.target, g));
  g.n_threads = 4;
  const auto threaded = grid_csv(run_experiment_grid(pair.source, pair.target, g));
  out.detail << "grid of " << std::count(first.begin(), first.end(), '\n') - 1 << " cells";
  out.require(first == second, "two runs byte-identical");
  out.require(first == threaded, "1 vs 4 threads byte-identical");

  // Artifacts through files.
  const auto dir = std::filesystem::temp_directory_path() / "tsf_acceptance";
  std::filesystem::create_directories(dir);
  GrowthConfig growth;
  growth.rng_seed = 9;
  const auto forest = fit_forest(pair.source, 30, growth, 0);
  io::save_artifact(dir / "forest.json", forest);
  const auto forest_back = std::get<Forest>(io::load_artifact(dir / "forest.json"));
  out.require(same_predictions([&](auto x) { return predict_survival(forest, x); },
                               [&](auto x) { return predict_survival(forest_back, x); }, pair.target),
              "forest predictions bit-exact");
  std::size_t n_artifacts = 1;
  for (int k : {1, 2, 3}) {
    const auto dist = build_structure_distribution(forest, k);
    io::save_artifact(dir / "structure.json", dist);
    out.require(std::get<StructureDistribution>(io::load_artifact(dir / "structure.json")) == dist,
                "structure distribution round trip");
    ++n_artifacts;
  }
  const auto dp = build_depthwise_distribution(forest, 2);
  io::save_artifact(dir / "depthwise.json", dp);
  out.require(std::get<DepthwiseDistribution>(io::load_artifact(dir / "depthwise.json")) == dp,
              "depthwise distribution round trip");
  ++n_artifacts;
  for (auto kind : {nn::LossKind::DeepSurv, nn::LossKind::CoxCC, nn::LossKind::DeepHit}) {
    nn::PretrainConfig pc;
    pc.train.epochs = 5;
    const auto model = nn::pretrain(pair.source, kind, pc);
    io::save_artifact(dir / "network.json", model);
    const auto back = std::get<nn::NetworkModel>(io::load_artifact(dir / "network.json"));
    out.require(same_predictions([&](auto x) { return nn::predict_survival(model, x); },
                                 [&](auto x) { return nn::predict_survival(back, x); }, pair.target),
                "network predictions bit-exact");
    ++n_artifacts;
  }
  std::filesystem::remove_all(dir);
  out.detail << ", " << n_artifacts << " artifacts round-tripped";
}

void distribution_sanity(Outcome& out) {
  auto source = fixture::signal_cohort(1500, 21);
  GrowthConfig g;
  g.rng_seed = 22;
  auto forest = fit_forest(source, 200, g, 0);
  double worst_sum = 0.0, worst_z = 0.0;
  std::size_t n_signatures = 0;
  for (int k : {1, 2, 3}) {
    auto dist = build_structure_distribution(forest, k);
    double total = 0.0;
    for (double p : dist.probabilities) total += p;
    worst_sum = std::max(worst_sum, std::abs(total - 1.0));
    const int draws = 10000;
    std::map<StructureSignature, int> seen;
    Rng rng(derive_seed(k, "draws"));
    for (int d = 0; d < draws; ++d) ++seen[sample_prototype(dist, rng)];
    for (std::size_t s = 0; s < dist.support_size(); ++s) {
      const double p = dist.probabilities[s];
      const double sd = std::sqrt(draws * p * (1 - p));
      const double dev = std::abs(seen[dist.signatures[s]] - draws * p);
      worst_z = std::max(worst_z, sd > 0 ? dev / sd : (dev > 0 ? INFINITY : 0.0));
    }
    out.require(seen.size() <= dist.support_size(), "draws stay on the support");
    n_signatures += dist.support_size();
  }
  auto dp = build_depthwise_distribution(forest, 2);
  for (const auto& level : dp.levels) {
    double total = 0.0;
    for (const auto& [f, p] : level) total += p;
    if (!level.empty()) worst_sum = std::max(worst_sum, std::abs(total - 1.0));
  }
  out.detail << n_signatures << " signatures over k = 1..3, max |sum - 1| " << worst_sum << ", max deviation "
             << worst_z << " sd";
  out.require(worst_sum <= 1e-12, "sums within 1e-12");
  out.require(worst_z <= 4.0, "frequencies within 4 sd");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<std::string> only, known;
  app.add_option("--only", only, "run only these criteria");
  app.add_option("--known-failures", known, "criteria expected to fail")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {"estimator_oracles", 10, estimator_oracles},
      {"gradient_gate", 30, gradient_gate},
      {"cox_recovery", 60, cox_recovery},
      {"structure_fidelity", 30, structure_fidelity},
      {"self_transfer", 300, self_transfer},
      {"trend", 900, trend},
      {"determinism_serialization", 300, determinism},
      {"distribution_sanity", 60, distribution_sanity},
  };
  auto criterion_of = [](const std::string& entry) { return entry.substr(0, entry.find(':')); };
  for (const auto& entry : known) {
    if (std::none_of(criteria.begin(), criteria.end(), [&](const auto& c) { return c.name == criterion_of(entry); })) {
      std::fprintf(stderr, "unknown criterion '%s'\n", entry.c_str());
      return 2;
    }
  }

  std::set<std::string> failed;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_seconds) out.require(false, "runtime budget " + std::to_string(c.budget_seconds) + " s", "time");
    for (const auto& tag : out.failed_tags) failed.insert(tag.empty() ? c.name : c.name + ":" + tag);
    std::printf("%s %s (%.1f s): %s\n", out.pass ? "PASS" : "FAIL", c.name.c_str(), secs, out.detail.str().c_str());
    std::fflush(stdout);
  }

  std::set<std::string> expected;
  for (const auto& entry : known) {
    if (only.empty() || std::find(only.begin(), only.end(), criterion_of(entry)) != only.end()) expected.insert(entry);
  }
  if (failed != expected) {
    std::printf("failing checks differ from the known-failure list:");
    for (const auto& f : failed) std::printf(" %s", f.c_str());
    std::printf("\n");
    return 1;
  }
  for (const auto& f : failed) std::printf("known failure %s, see README\n", f.c_str());
  return 0;
}
