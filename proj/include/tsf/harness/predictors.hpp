#pragma once

#include <memory>

#include "tsf/forest/forest.hpp"
#include "tsf/harness/cv.hpp"
#include "tsf/nn/model.hpp"

namespace tsf::harness {

class ForestPredictor final : public SurvivalPredictor {
 public:
  explicit ForestPredictor(std::shared_ptr<const Forest> forest) : forest_(std::move(forest)) {}
  explicit ForestPredictor(Forest forest) : forest_(std::make_shared<const Forest>(std::move(forest))) {}
  StepFunction predict(std::span<const double> x) const override { return predict_survival(*forest_, x); }
  const Forest& forest() const { return *forest_; }

 private:
  std::shared_ptr<const Forest> forest_;
};

class NetworkPredictor final : public SurvivalPredictor {
 public:
  explicit NetworkPredictor(std::shared_ptr<const nn::NetworkModel> model) : model_(std::move(model)) {}
  explicit NetworkPredictor(nn::NetworkModel model)
      : model_(std::make_shared<const nn::NetworkModel>(std::move(model))) {}
  StepFunction predict(std::span<const double> x) const override { return nn::predict_survival(*model_, x); }
  const nn::NetworkModel& model() const { return *model_; }

 private:
  std::shared_ptr<const nn::NetworkModel> model_;
};

// Same curve for every subject.
class ConstantPredictor final : public SurvivalPredictor {
 public:
  explicit ConstantPredictor(StepFunction curve) : curve_(std::move(curve)) {}
  StepFunction predict(std::span<const double>) const override { return curve_; }

 private:
  StepFunction curve_;
};

}  // namespace tsf::harness
