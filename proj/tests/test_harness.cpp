#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "support/fixtures.hpp"
#include "tsf/core/concordance.hpp"
#include "tsf/core/log_rank.hpp"
#include "tsf/forest/forest.hpp"
#include "tsf/harness/csv.hpp"
#include "tsf/harness/cv.hpp"
#include "tsf/harness/grid.hpp"
#include "tsf/harness/predictors.hpp"
#include "tsf/harness/results.hpp"
#include "tsf/harness/synthetic.hpp"

using namespace tsf;
using namespace tsf::harness;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "tsf_test_harness";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv_of(const ResultsTable& t) {
  std::ostringstream out;
  write_results_csv(out, t);
  return out.str();
}

// Small shifted pair and a forest-only grid that runs in about a second.
SyntheticSpec mini_spec() {
  auto s = fixture::signal_spec();
  s.n_source = 400;
  s.n_target = 120;
  s.rng_seed = 7;
  s.shift.baseline_scale_multiplier = 1.3;
  s.shift.mean_shift = {0.3, 0.0, -0.2, 0.0};
  s.shift.censoring_delta = 0.2;
  return s;
}

GridConfig mini_grid() {
  GridConfig g;
  g.plan.n_folds = 3;
  g.plan.sizes = {kFullPool, 40};
  g.plan.rng_seed = 11;
  g.source_trees = 10;
  g.target_trees = 10;
  g.networks.clear();
  g.n_threads = 1;
  return g;
}

}  // namespace

TEST_CASE("csv fixture, errors and round trip") {
  std::istringstream three("duration,event,age,male\n12.5,1,63,1\n3,0,71.25,0\n40.1,1,55,1\n");
  auto c = parse_cohort_csv(three);
  REQUIRE(c.n_subjects() == 3);
  CHECK(c.feature_names() == std::vector<std::string>{"age", "male"});
  CHECK(c.durations() == std::vector<double>{12.5, 3, 40.1});
  CHECK(c.events() == std::vector<int>{1, 0, 1});
  CHECK(c.value(1, 0) == 71.25);

  std::string bad = "duration,event,x\n";
  for (int r = 1; r <= 9; ++r) bad += "1," + std::string(r == 7 ? "2" : "1") + ",0\n";
  std::istringstream in(bad);
  try {
    parse_cohort_csv(in);
    FAIL("expected an error");
  } catch (const CsvError& e) {
    CHECK(e.row() == 7);
    CHECK(e.column() == "event");
    CHECK(std::string(e.what()).find("row 7") != std::string::npos);
  }

  std::istringstream missing("duration,x\n1,2\n");
  CHECK_THROWS_AS(parse_cohort_csv(missing), CsvError);
  std::istringstream junk("duration,event,x\n1,1,abc\n");
  CHECK_THROWS_AS(parse_cohort_csv(junk), CsvError);
  std::istringstream negative("duration,event,x\n-1,1,0\n");
  CHECK_THROWS_AS(parse_cohort_csv(negative), CsvError);
  std::istringstream short_row("duration,event,x\n1,1\n");
  CHECK_THROWS_AS(parse_cohort_csv(short_row), CsvError);

  auto synthetic = fixture::signal_cohort(50, 3);
  const auto path = scratch("cohort.csv");
  write_cohort_csv(path, synthetic);
  CHECK(load_cohort_csv(path) == synthetic);
}

TEST_CASE("categorical schema") {
  auto schema = CohortSchema::from_json(R"({
    "features": [
      {"name": "cea", "type": "categorical", "codes": {"negative": 0, "positive": 1}, "unknown_code": 0.5},
      {"name": "grade", "type": "categorical", "codes": {"low": 0, "high": 1}},
      {"name": "age", "type": "numeric"}
    ]})");
  std::istringstream ok("age,duration,event,grade,cea\n60,5,1,high,positive\n70,6,0,low,unknown\n");
  auto c = parse_cohort_csv(ok, schema);
  CHECK(c.feature_names() == std::vector<std::string>{"cea", "grade", "age"});
  CHECK(c.value(0, 0) == 1.0);
  CHECK(c.value(1, 0) == 0.5);
  CHECK(c.value(0, 1) == 1.0);
  CHECK(c.value(1, 2) == 70.0);

  std::istringstream bad("age,duration,event,grade,cea\n60,5,1,medium,positive\n");
  try {
    parse_cohort_csv(bad, schema);
    FAIL("expected an error");
  } catch (const CsvError& e) {
    CHECK(e.row() == 1);
    CHECK(e.column() == "grade");
  }
  CHECK(CohortSchema::from_json(schema.to_json()).to_json() == schema.to_json());
}

TEST_CASE("number formatting round trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5}) CHECK(parse_double(format_double(x)) == x);
  CHECK_FALSE(parse_double("1.5x").has_value());
  CHECK_FALSE(parse_double("").has_value());
  CHECK(parse_double("+2") == 2.0);
}

TEST_CASE("zero shift gives exchangeable domains") {
  // Null distribution of the statistic from label permutations of pooled draws.
  auto spec = SyntheticSpec::colorectal();
  spec.shift = DomainShift{};
  spec.n_source = 1000;
  spec.n_target = 300;
  std::vector<double> observed, null_draws;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    spec.rng_seed = seed;
    auto pair = generate_synthetic_pair(spec);
    std::vector<double> t = pair.source.durations();
    std::vector<int> e = pair.source.events();
    t.insert(t.end(), pair.target.durations().begin(), pair.target.durations().end());
    e.insert(e.end(), pair.target.events().begin(), pair.target.events().end());
    auto stat = [&](const std::vector<std::size_t>& order) {
      std::vector<double> ta, tb;
      std::vector<int> ea, eb;
      for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t i = order[k];
        (k < spec.n_source ? ta : tb).push_back(t[i]);
        (k < spec.n_source ? ea : eb).push_back(e[i]);
      }
      return log_rank_statistic({ta, ea}, {tb, eb});
    };
    std::vector<std::size_t> order(t.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    observed.push_back(stat(order));
    Rng rng(derive_seed(seed, "permutation"));
    for (int p = 0; p < 100; ++p) {
      std::shuffle(order.begin(), order.end(), rng);
      null_draws.push_back(stat(order));
    }
  }
  std::sort(null_draws.begin(), null_draws.end());
  const double threshold = null_draws[static_cast<std::size_t>(0.999 * static_cast<double>(null_draws.size()))];
  MESSAGE("null 99.9% threshold " << threshold << ", largest observed "
                                  << *std::max_element(observed.begin(), observed.end()));
  for (double s : observed) CHECK(s < threshold);
}

TEST_CASE("censoring calibration") {
  auto spec = SyntheticSpec::colorectal();
  spec.censoring_rate = 0.254;
  auto c = generate_synthetic_cohort(spec, 5000, false, 5);
  const double event_rate = static_cast<double>(c.n_events()) / 5000.0;
  CHECK(std::abs(event_rate - 0.746) <= 0.03);

  auto pair = generate_synthetic_pair(SyntheticSpec::colorectal());
  const auto preset = SyntheticSpec::colorectal();
  CHECK(std::abs(1.0 - static_cast<double>(pair.source.n_events()) / static_cast<double>(pair.source.n_subjects()) -
                 preset.censoring_rate) <= kCensoringTolerance);
  CHECK(std::abs(1.0 - static_cast<double>(pair.target.n_events()) / static_cast<double>(pair.target.n_subjects()) -
                 preset.censoring_rate - preset.shift.censoring_delta) <= kCensoringTolerance);

  // Identical subjects: the censored fraction jumps from 0 to 1.
  const std::vector<double> times(10, 5.0), exps(10, 1.0);
  CHECK_THROWS_AS(calibrate_censoring(times, exps, 0.5), std::runtime_error);
  CHECK(calibrate_censoring(times, exps, 0.0) == 0.0);

  spec.censoring_rate = 1.5;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("no signal means chance concordance") {
  auto spec = SyntheticSpec::colorectal();
  spec.beta.assign(spec.beta.size(), 0.0);
  spec.interactions.clear();
  spec.censoring_rate = 0.3;
  auto train = generate_synthetic_cohort(spec, 1000, false, 1);
  auto test = generate_synthetic_cohort(spec, 1000, false, 2);
  GrowthConfig g;
  g.rng_seed = 3;
  auto f = fit_forest(train, 50, g, 0);
  std::vector<StepFunction> curves;
  for (std::size_t i = 0; i < test.n_subjects(); ++i) curves.push_back(predict_survival(f, test.row(i)));
  const double c = concordance_td(test, curves);
  MESSAGE("no-signal C^td " << c);
  CHECK(std::abs(c - 0.5) <= 0.03);
}

TEST_CASE("synthetic generation is deterministic") {
  auto spec = SyntheticSpec::colorectal();
  spec.rng_seed = 4;
  auto a = generate_synthetic_pair(spec);
  auto b = generate_synthetic_pair(spec);
  CHECK(a.source == b.source);
  CHECK(a.target == b.target);
  CHECK(a.source.n_subjects() == spec.n_source);
  CHECK(a.target.n_subjects() == spec.n_target);
}

TEST_CASE("folds are disjoint, stratified and seed-determined") {
  auto c = fixture::signal_cohort(733, 5);
  const std::size_t k = 10;
  auto folds = assign_folds(c, k, 9);
  CHECK(folds == assign_folds(c, k, 9));
  CHECK_FALSE(folds == assign_folds(c, k, 10));
  std::size_t total = 0;
  const double rate = static_cast<double>(c.n_events()) / static_cast<double>(c.n_subjects());
  for (std::size_t f = 0; f < k; ++f) {
    auto members = fold_members(folds, f);
    auto rest = fold_complement(folds, f);
    CHECK(members.size() + rest.size() == c.n_subjects());
    std::vector<std::size_t> both;
    std::set_intersection(members.begin(), members.end(), rest.begin(), rest.end(), std::back_inserter(both));
    CHECK(both.empty());
    total += members.size();
    std::size_t events = 0;
    for (auto i : members) events += static_cast<std::size_t>(c.events()[i]);
    CHECK(std::abs(static_cast<double>(events) - rate * static_cast<double>(members.size())) <= 1.0);
  }
  CHECK(total == c.n_subjects());
}

TEST_CASE("stratified subsampling") {
  auto c = fixture::signal_cohort(400, 6);
  std::vector<std::size_t> pool(300);
  std::iota(pool.begin(), pool.end(), std::size_t{50});
  std::size_t pool_events = 0;
  for (auto i : pool) pool_events += static_cast<std::size_t>(c.events()[i]);
  for (std::size_t n : {2u, 20u, 40u, 100u}) {
    auto s = stratified_subsample(c, pool, n, 3);
    CHECK(s.size() == n);
    CHECK(std::is_sorted(s.begin(), s.end()));
    CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
    std::size_t events = 0;
    for (auto i : s) {
      CHECK(i >= 50);
      CHECK(i < 350);
      events += static_cast<std::size_t>(c.events()[i]);
    }
    CHECK(std::abs(static_cast<double>(events) - static_cast<double>(pool_events) / 300.0 * static_cast<double>(n)) <= 1.0);
    CHECK(events >= 1);
  }
  CHECK(stratified_subsample(c, pool, kFullPool, 3) == pool);
  CHECK_THROWS_AS(stratified_subsample(c, pool, 301, 3), std::invalid_argument);
}

TEST_CASE("cross-validation with a constant predictor") {
  auto c = fixture::signal_cohort(300, 7);
  CvPlan plan;
  plan.sizes = {kFullPool, 50};
  plan.rng_seed = 2;
  ModelFactory constant = [](const Cohort&, std::uint64_t) {
    return std::make_unique<ConstantPredictor>(StepFunction({1.0}, {0.5}, 1.0));
  };
  for (std::size_t size : plan.sizes) {
    auto r = run_cv(c, plan, constant, size);
    CHECK(r.n_valid() == 10);
    CHECK(r.mean() == 0.5);
    CHECK(r.sd() == 0.0);
  }
}

TEST_CASE("folds without test events are absent") {
  // Three events among 40 subjects: with 5 folds at least two folds have none.
  std::vector<double> cov(40), t(40);
  std::vector<int> e(40, 0);
  for (int i = 0; i < 40; ++i) {
    cov[i] = i;
    t[i] = 1.0 + i;
  }
  e[3] = e[17] = e[30] = 1;
  Cohort c(cov, t, e, {"x"});
  CvPlan plan;
  plan.n_folds = 5;
  ModelFactory constant = [](const Cohort&, std::uint64_t) {
    return std::make_unique<ConstantPredictor>(StepFunction::constant(1.0));
  };
  auto r = run_cv(c, plan, constant, kFullPool);
  CHECK(r.n_absent == 2);
  CHECK(r.n_valid() == 3);
  CHECK(r.mean() == 0.5);
}

TEST_CASE("training subjects are shared by all methods and sizes nest in the same folds") {
  auto c = fixture::signal_cohort(300, 8);
  auto folds = assign_folds(c, 10, 4);
  for (std::size_t f = 0; f < 10; ++f) {
    auto test = fold_members(folds, f);
    for (std::size_t size : {kFullPool, std::size_t{100}, std::size_t{20}}) {
      auto train = training_subjects(c, folds, f, size, 4);
      CHECK(train == training_subjects(c, folds, f, size, 4));
      std::vector<std::size_t> overlap;
      std::set_intersection(train.begin(), train.end(), test.begin(), test.end(), std::back_inserter(overlap));
      CHECK(overlap.empty());
    }
  }
}

TEST_CASE("experiment grid: source column, reproducibility and thread independence") {
  auto pair = generate_synthetic_pair(mini_spec());
  auto cfg = mini_grid();
  auto a = run_experiment_grid(pair.source, pair.target, cfg);
  REQUIRE(a.sizes == cfg.plan.sizes);
  REQUIRE(a.columns == cfg.columns());
  const auto src = *a.column_index(kForestFamily, "Source");
  for (std::size_t r = 1; r < a.sizes.size(); ++r) {
    CHECK(a.cells[r][src].folds == a.cells[0][src].folds);
    CHECK(std::memcmp(&a.cells[r][src].mean, &a.cells[0][src].mean, sizeof(double)) == 0);
  }
  auto b = run_experiment_grid(pair.source, pair.target, cfg);
  CHECK(csv_of(a) == csv_of(b));
  cfg.n_threads = 4;
  auto d = run_experiment_grid(pair.source, pair.target, cfg);
  CHECK(csv_of(a) == csv_of(d));
  for (std::size_t r = 0; r < a.sizes.size(); ++r)
    for (std::size_t col = 0; col < a.columns.size(); ++col) CHECK(a.cells[r][col].folds == d.cells[r][col].folds);
}

TEST_CASE("network grid over two sizes and two protocols is reproducible") {
  auto pair = generate_synthetic_pair(mini_spec());
  auto cfg = mini_grid();
  cfg.forest_methods.clear();
  cfg.networks = {nn::LossKind::DeepSurv};
  cfg.network_methods = {NetworkMethod::FineTune, NetworkMethod::Retrain};
  cfg.pretrain.train.epochs = 5;
  cfg.finetune_train.epochs = 5;
  cfg.retrain_train.epochs = 5;
  auto a = run_experiment_grid(pair.source, pair.target, cfg);
  CHECK(a.columns.size() == 2);
  CHECK(a.sizes.size() == 2);
  cfg.n_threads = 3;
  CHECK(csv_of(a) == csv_of(run_experiment_grid(pair.source, pair.target, cfg)));
}

TEST_CASE("results marking") {
  ResultsTable t;
  t.sizes = {100};
  t.columns = {{"RSF", "Target"}, {"RSF", "Source"}, {"RSF", "TSF-T1"}, {"DeepSurv", "Target"}, {"DeepSurv", "FT"}};
  t.cells = {std::vector<Cell>(5)};
  const double means[] = {0.70, 0.65, 0.72, 0.60, 0.61};
  for (int c = 0; c < 5; ++c) t.cells[0][c].mean = means[c];
  t.mark();
  CHECK(t.cells[0][2].row_best);
  CHECK_FALSE(t.cells[0][0].row_best);
  CHECK(t.cells[0][1].below_target);
  CHECK_FALSE(t.cells[0][2].below_target);
  CHECK_FALSE(t.cells[0][0].below_target);
  CHECK(t.cells[0][4].row_best);
  std::ostringstream text;
  write_results_text(text, t);
  CHECK(text.str().find("0.7200 +/- 0.0000^") != std::string::npos);
  CHECK(text.str().find("0.6500 +/- 0.0000*") != std::string::npos);
}

TEST_CASE("results files: empty table, round trip and unwritable path") {
  ResultsTable empty;
  std::ostringstream out;
  write_results_csv(out, empty);
  CHECK(out.str() == "family,method,size,mean,sd,n_valid,n_absent,row_best,below_target\n");
  const auto path = scratch("empty.csv");
  emit_results(empty, ResultFormat::Csv, path);
  CHECK(slurp(path) == out.str());

  auto table = run_experiment_grid(generate_synthetic_pair(mini_spec()).source,
                                   generate_synthetic_pair(mini_spec()).target, mini_grid());
  std::istringstream in(csv_of(table));
  auto back = parse_results_csv(in);
  CHECK(back.sizes == table.sizes);
  CHECK(back.columns == table.columns);
  for (std::size_t r = 0; r < table.sizes.size(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const auto& x = table.cells[r][c];
      const auto& y = back.cells[r][c];
      CHECK(((std::isnan(x.mean) && std::isnan(y.mean)) || x.mean == y.mean));
      CHECK(((std::isnan(x.sd) && std::isnan(y.sd)) || x.sd == y.sd));
      CHECK(x.n_valid == y.n_valid);
      CHECK(x.n_absent == y.n_absent);
      CHECK(x.row_best == y.row_best);
      CHECK(x.below_target == y.below_target);
    }
  }
  CHECK_THROWS_AS(emit_results(table, ResultFormat::Csv, "/nonexistent-dir/x/results.csv"), std::runtime_error);
}

TEST_CASE("golden miniature grid") {
  auto pair = generate_synthetic_pair(mini_spec());
  auto table = run_experiment_grid(pair.source, pair.target, mini_grid());
  const std::filesystem::path dir = TSF_GOLDEN_DIR;
  std::ostringstream csv, text, trend;
  write_results_csv(csv, table);
  write_results_text(text, table);
  write_results_trend(trend, table);
  const std::pair<const char*, std::string> files[] = {
      {"mini_grid.csv", csv.str()}, {"mini_grid.txt", text.str()}, {"mini_grid.tsv", trend.str()}};
  if (std::getenv("TSF_UPDATE_GOLDEN")) {
    for (const auto& [name, content] : files) std::ofstream(dir / name, std::ios::binary) << content;
  }
  for (const auto& [name, content] : files) {
    CAPTURE(name);
    CHECK(slurp(dir / name) == content);
  }
}
