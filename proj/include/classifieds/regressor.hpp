#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "classifieds/feature_matrix.hpp"

namespace classifieds {

enum class RegressorKind { Linear, Mlp, Svr };

std::string_view to_string(RegressorKind kind) noexcept;
/// Accepts linear|lr, mlp|nn, svr|svmr.
RegressorKind parse_regressor_kind(std::string_view text);

struct LinearParams {
  double ridge_lambda = 1e-8;
  bool fit_intercept = true;
  bool standardize = false;

  bool operator==(const LinearParams&) const = default;
};

struct MlpParams {
  std::size_t hidden = 0;  // 0 selects ceil((inputs + 1) / 2)
  std::size_t epochs = 500;
  double learning_rate = 0.01;
  double lr_growth = 1.0;  // applied after every accepted step
  bool standardize = true;

  bool operator==(const MlpParams&) const = default;
};

struct SvrParams {
  double c = 1.0;
  std::optional<double> epsilon;  // target units; unset means 0.1 * std(y)
  std::size_t max_epochs = 2000;
  double tolerance = 1e-6;
  bool standardize = true;

  bool operator==(const SvrParams&) const = default;
};

struct RegressorSpec {
  RegressorKind kind = RegressorKind::Linear;
  LinearParams linear;
  MlpParams mlp;
  SvrParams svr;
  std::uint64_t seed = 42;

  bool operator==(const RegressorSpec&) const = default;
};

/// Per-column affine map x -> (x - mean) / scale. Zero-variance columns keep scale 1.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static Standardizer identity(Eigen::Index cols);
  static Standardizer fit(const Eigen::MatrixXd& x);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

/// One-hidden-layer perceptron: sigmoid hidden units, linear output, loss
/// 1/(2n) * sum (f(x) - y)^2. Parameters flatten as [W1 row-major, b1, w2, b2].
class MlpNetwork {
 public:
  MlpNetwork() = default;
  MlpNetwork(std::size_t inputs, std::size_t hidden);

  static MlpNetwork random(std::size_t inputs, std::size_t hidden, std::uint64_t seed);

  std::size_t inputs() const noexcept { return static_cast<std::size_t>(w1_.cols()); }
  std::size_t hidden() const noexcept { return static_cast<std::size_t>(w1_.rows()); }
  std::size_t parameter_count() const noexcept;

  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& theta);

  Eigen::VectorXd forward(const Eigen::MatrixXd& x) const;
  double loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) const;
  /// Loss and its analytic gradient by backpropagation.
  std::pair<double, Eigen::VectorXd> loss_and_gradient(const Eigen::MatrixXd& x,
                                                       const Eigen::VectorXd& y) const;

  /// Full-batch gradient descent. A step that raises the loss is rejected and
  /// the learning rate halved, so the returned per-epoch losses never increase.
  std::vector<double> train(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            const MlpParams& params);

  const Eigen::MatrixXd& w1() const noexcept { return w1_; }
  const Eigen::VectorXd& b1() const noexcept { return b1_; }
  const Eigen::VectorXd& w2() const noexcept { return w2_; }
  double b2() const noexcept { return b2_; }

 private:
  Eigen::MatrixXd w1_;
  Eigen::VectorXd b1_;
  Eigen::VectorXd w2_;
  double b2_ = 0.0;
};

struct LinearModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;
};

struct MlpModel {
  Standardizer x_scaler;
  double y_mean = 0.0;
  double y_scale = 1.0;
  MlpNetwork network;
  std::vector<double> loss_history;
};

struct SvrModel {
  Standardizer x_scaler;
  double y_mean = 0.0;
  double y_scale = 1.0;
  double epsilon = 0.0;  // target units
  Eigen::VectorXd weights;  // on the standardised inputs
  double bias = 0.0;
  std::size_t epochs_run = 0;
};

/// Linear weights by column name, in training column order.
struct LinearWeights {
  std::vector<std::pair<std::string, double>> weights;
  double intercept = 0.0;

  /// Weight of the named column; throws InvalidArgument when absent.
  double at(std::string_view column) const;
};

class FittedRegressor {
 public:
  using State = std::variant<LinearModel, MlpModel, SvrModel>;

  FittedRegressor() = default;
  FittedRegressor(RegressorSpec spec, std::vector<std::string> columns, State state);

  RegressorKind kind() const noexcept { return spec_.kind; }
  const RegressorSpec& spec() const noexcept { return spec_; }
  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const State& state() const noexcept { return state_; }
  bool fitted() const noexcept { return fitted_; }

  /// Throws ColumnMismatch unless x has the training columns in training order.
  Eigen::VectorXd predict(const FeatureMatrix& x) const;

  /// Throws NotLinear for the mlp and svr kinds.
  LinearWeights linear_weights() const;

  nlohmann::json to_json() const;
  static FittedRegressor from_json(const nlohmann::json& j);

 private:
  RegressorSpec spec_;
  std::vector<std::string> columns_;
  State state_;
  bool fitted_ = false;
};

/// Throws EmptyTrainingSet, DimensionMismatch, or InvalidArgument on NaN input.
FittedRegressor fit(const RegressorSpec& spec, const FeatureMatrix& x, const Eigen::VectorXd& y);

Eigen::VectorXd predict(const FittedRegressor& model, const FeatureMatrix& x);
LinearWeights linear_weights(const FittedRegressor& model);

nlohmann::json to_json(const RegressorSpec& spec);
RegressorSpec regressor_spec_from_json(const nlohmann::json& j);

}  // namespace classifieds
