#include <doctest.h>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "tsf/core/concordance.hpp"
#include "tsf/core/estimators.hpp"
#include "tsf/transfer_nn/protocol.hpp"

using namespace tsf;
using namespace tsf::nn;

namespace {

PretrainConfig quick_pretrain(std::uint64_t seed) {
  PretrainConfig p;
  p.train.epochs = 10;
  p.train.rng_seed = seed;
  return p;
}

double held_out_ctd(const NetworkModel& m, const Cohort& test) {
  std::vector<StepFunction> curves;
  for (std::size_t i = 0; i < test.n_subjects(); ++i) curves.push_back(predict_survival(m, test.row(i)));
  return concordance_td(test, curves);
}

std::vector<DenseLayer> hidden_layers(const NetworkModel& m) {
  const auto& l = m.net.layers();
  return {l.begin(), l.end() - 1};
}

}  // namespace

TEST_CASE("source-only adaptation returns the pretrained model") {
  auto source = fixture::signal_cohort(600, 1);
  auto target = fixture::signal_cohort(150, 2);
  for (LossKind kind : {LossKind::DeepSurv, LossKind::CoxCC, LossKind::DeepHit}) {
    auto pre = pretrain(source, kind, quick_pretrain(3));
    TransferProtocol p;
    p.mode = TransferMode::SourceOnly;
    auto adapted = adapt(pre, target, p);
    CHECK(adapted == pre);
    for (std::size_t i = 0; i < 20; ++i) CHECK(predict_survival(adapted, target.row(i)) == predict_survival(pre, target.row(i)));
  }
}

TEST_CASE("pretraining is deterministic") {
  auto source = fixture::signal_cohort(500, 4);
  for (LossKind kind : {LossKind::DeepSurv, LossKind::CoxCC, LossKind::DeepHit}) {
    CHECK(pretrain(source, kind, quick_pretrain(5)) == pretrain(source, kind, quick_pretrain(5)));
  }
}

TEST_CASE("pretrained networks separate risk on held-out source data") {
  auto source = fixture::signal_cohort(5000, 6);
  auto test = fixture::signal_cohort(1000, 7);
  auto beta = oracle::cox_newton(source.covariates(), 4, source.durations(), source.events());
  std::vector<double> lp(test.n_subjects(), 0.0);
  for (std::size_t i = 0; i < lp.size(); ++i)
    for (std::size_t a = 0; a < 4; ++a) lp[i] += beta[a] * test.value(i, a);
  const double cox = oracle::concordance(test.durations(), test.events(), [&](std::size_t i, double) { return -lp[i]; });
  REQUIRE(cox > 0.70);
  for (LossKind kind : {LossKind::DeepSurv, LossKind::CoxCC, LossKind::DeepHit}) {
    PretrainConfig p;
    p.train.rng_seed = 8;
    auto m = pretrain(source, kind, p);
    const double ctd = held_out_ctd(m, test);
    MESSAGE(to_string(kind) << " held-out C^td " << ctd << " (oracle Cox " << cox << ")");
    CHECK(ctd > 0.70);
  }
}

TEST_CASE("fine-tuning freezes the hidden layers") {
  auto source = fixture::signal_cohort(600, 9);
  auto target = fixture::signal_cohort(200, 10);
  for (LossKind kind : {LossKind::DeepSurv, LossKind::CoxCC, LossKind::DeepHit}) {
    CAPTURE(to_string(kind));
    auto pre = pretrain(source, kind, quick_pretrain(11));
    TransferProtocol p;
    p.mode = TransferMode::FineTune;
    p.target_train.epochs = 15;
    p.target_train.rng_seed = 12;
    auto ft = adapt(pre, target, p);
    CHECK(hidden_layers(ft) == hidden_layers(pre));
    CHECK_FALSE(ft.net.output_layer() == pre.net.output_layer());
    CHECK(ft.scaler == pre.scaler);
    CHECK(ft.grid == pre.grid);

    // Zero epochs: parameters untouched; with the refit off the model is the source model.
    p.target_train.epochs = 0;
    auto zero = adapt(pre, target, p);
    CHECK(zero.net == pre.net);
    p.refit_baseline = false;
    CHECK(adapt(pre, target, p) == pre);
  }
}

TEST_CASE("retraining with zero learning rate keeps the pretrained parameters") {
  auto source = fixture::signal_cohort(600, 13);
  auto target = fixture::signal_cohort(200, 14);
  for (LossKind kind : {LossKind::DeepSurv, LossKind::CoxCC, LossKind::DeepHit}) {
    auto pre = pretrain(source, kind, quick_pretrain(15));
    TransferProtocol p;
    p.mode = TransferMode::Retrain;
    p.target_train.learning_rate = 0.0;
    p.target_train.epochs = 5;
    CHECK(adapt(pre, target, p).net == pre.net);
    p.target_train.learning_rate = 0.01;
    auto rt = adapt(pre, target, p);
    CHECK_FALSE(hidden_layers(rt) == hidden_layers(pre));
  }
}

TEST_CASE("target-only training and the baseline refit") {
  auto source = fixture::signal_cohort(600, 16);
  auto target = fixture::signal_cohort(200, 17);
  auto pre = pretrain(source, LossKind::DeepSurv, quick_pretrain(18));
  TransferProtocol p;
  p.mode = TransferMode::TargetOnly;
  p.target_train.epochs = 5;
  auto t = adapt(pre, target, p);
  CHECK(t.scaler == Standardizer::fit(target));
  REQUIRE(t.baseline.has_value());
  CHECK(t.baseline->knots() == distinct_event_times(target));

  p.mode = TransferMode::FineTune;
  auto ft = adapt(pre, target, p);
  CHECK(ft.baseline->knots() == distinct_event_times(target));
  p.refit_baseline = false;
  CHECK(adapt(pre, target, p).baseline == pre.baseline);

  auto hit = pretrain(source, LossKind::DeepHit, quick_pretrain(19));
  p.mode = TransferMode::TargetOnly;
  auto th = adapt(hit, target, p);
  CHECK(th.grid->cuts() == DiscreteTimeGrid::from_quantiles(target.durations(), p.deephit_bins).cuts());
}

TEST_CASE("adaptation rejects a different feature width") {
  auto source = fixture::signal_cohort(300, 20);
  auto pre = pretrain(source, LossKind::DeepSurv, quick_pretrain(21));
  Cohort narrow({1, 2}, {1, 2}, {1, 1}, {"a"});
  TransferProtocol p;
  CHECK_THROWS_AS(adapt(pre, narrow, p), std::invalid_argument);
}

TEST_CASE("mode names round-trip") {
  for (TransferMode m : {TransferMode::SourceOnly, TransferMode::FineTune, TransferMode::Retrain, TransferMode::TargetOnly}) {
    CHECK(transfer_mode_from_string(to_string(m)) == m);
  }
  CHECK_THROWS_AS(transfer_mode_from_string("sideways"), std::invalid_argument);
}
