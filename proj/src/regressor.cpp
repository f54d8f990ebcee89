#include "classifieds/regressor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "classifieds/error.hpp"

namespace classifieds {

namespace {

using Index = Eigen::Index;

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
}

nlohmann::json scaler_json(const Standardizer& s) {
  return {{"mean", vector_json(s.mean)}, {"scale", vector_json(s.scale)}};
}

Standardizer scaler_from_json(const nlohmann::json& j) {
  return {vector_from_json(j.at("mean")), vector_from_json(j.at("scale"))};
}

double population_std(const Eigen::VectorXd& y) {
  if (y.size() == 0) return 0.0;
  const double mean = y.mean();
  return std::sqrt((y.array() - mean).square().mean());
}

void check_training_input(const FeatureMatrix& x, const Eigen::VectorXd& y) {
  if (y.size() == 0 || x.rows() == 0) {
    throw Error(ErrorKind::EmptyTrainingSet, "cannot fit a regressor on zero rows");
  }
  if (static_cast<Index>(x.rows()) != y.size()) {
    throw Error(ErrorKind::DimensionMismatch, std::to_string(x.rows()) + " feature rows for " +
                                                  std::to_string(y.size()) + " targets");
  }
  x.check_finite();
  if (!y.allFinite()) throw Error(ErrorKind::InvalidArgument, "target contains NaN or infinity");
}

// Ridge least squares on centred data; the intercept is never penalised.
LinearModel fit_linear(const LinearParams& params, const Eigen::MatrixXd& x,
                       const Eigen::VectorXd& y) {
  if (!(params.ridge_lambda >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "ridge_lambda must be non-negative");
  }
  const Index p = x.cols();
  const Standardizer scaler = params.standardize ? Standardizer::fit(x) : Standardizer::identity(p);
  const Eigen::MatrixXd xs = scaler.apply(x);

  Eigen::RowVectorXd x_mean = Eigen::RowVectorXd::Zero(p);
  double y_mean = 0.0;
  if (params.fit_intercept) {
    x_mean = xs.colwise().mean();
    y_mean = y.mean();
  }
  const Eigen::MatrixXd xc = xs.rowwise() - x_mean;
  const Eigen::VectorXd yc = y.array() - y_mean;

  Eigen::MatrixXd gram = xc.transpose() * xc;
  gram.diagonal().array() += params.ridge_lambda;
  const Eigen::VectorXd rhs = xc.transpose() * yc;

  // Jacobi scaling keeps the factorisation well conditioned when raw column
  // scales differ by orders of magnitude (square feet vs one-hot flags).
  Eigen::VectorXd d = gram.diagonal();
  for (Index k = 0; k < p; ++k) d(k) = d(k) > 0.0 ? 1.0 / std::sqrt(d(k)) : 1.0;
  const Eigen::MatrixXd scaled = d.asDiagonal() * gram * d.asDiagonal();
  const Eigen::VectorXd z = scaled.ldlt().solve(d.cwiseProduct(rhs));
  const Eigen::VectorXd ws = d.cwiseProduct(z);

  LinearModel model;
  model.weights = ws.cwiseQuotient(scaler.scale);
  model.intercept = y_mean - x_mean.dot(ws) - model.weights.dot(scaler.mean);
  if (!model.weights.allFinite() || !std::isfinite(model.intercept)) {
    throw Error(ErrorKind::InvalidArgument,
                "linear system is singular; use a positive ridge_lambda");
  }
  return model;
}

MlpModel fit_mlp(const RegressorSpec& spec, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const auto& params = spec.mlp;
  if (!(params.learning_rate > 0.0) || !(params.lr_growth >= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "mlp needs learning_rate > 0 and lr_growth >= 1");
  }
  MlpModel model;
  model.x_scaler = params.standardize ? Standardizer::fit(x) : Standardizer::identity(x.cols());
  if (params.standardize) {
    model.y_mean = y.mean();
    const double sd = population_std(y);
    model.y_scale = sd > 0.0 ? sd : 1.0;
  }
  const auto inputs = static_cast<std::size_t>(x.cols());
  const std::size_t hidden = params.hidden != 0 ? params.hidden : (inputs + 2) / 2;
  model.network = MlpNetwork::random(inputs, hidden, spec.seed);
  const Eigen::VectorXd ys = (y.array() - model.y_mean) / model.y_scale;
  model.loss_history = model.network.train(model.x_scaler.apply(x), ys, params);
  return model;
}

// Dual coordinate descent for L1-loss (epsilon-insensitive) linear SVR. The
// bias is handled as an extra constant input.
SvrModel fit_svr(const RegressorSpec& spec, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const auto& params = spec.svr;
  if (!(params.c > 0.0)) throw Error(ErrorKind::InvalidArgument, "svr C must be positive");
  if (params.epsilon && !(*params.epsilon >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "svr epsilon must be non-negative");
  }

  SvrModel model;
  model.x_scaler = params.standardize ? Standardizer::fit(x) : Standardizer::identity(x.cols());
  const double y_sd = population_std(y);
  if (params.standardize) {
    model.y_mean = y.mean();
    model.y_scale = y_sd > 0.0 ? y_sd : 1.0;
  }
  model.epsilon = params.epsilon.value_or(0.1 * y_sd);

  const Eigen::MatrixXd xs = model.x_scaler.apply(x);
  const Eigen::VectorXd ys = (y.array() - model.y_mean) / model.y_scale;
  const double eps = model.epsilon / model.y_scale;
  const double upper = params.c;
  const Index n = xs.rows();

  Eigen::VectorXd q_diag = xs.rowwise().squaredNorm().array() + 1.0;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(xs.cols());
  double b = 0.0;

  std::mt19937_64 rng(spec.seed);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});

  std::size_t epoch = 0;
  for (; epoch < params.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double max_violation = 0.0;
    for (const Index i : order) {
      const double g = xs.row(i).dot(w) + b - ys(i);
      const double gp = g + eps;
      const double gn = g - eps;
      const double bi = beta(i);

      double violation = 0.0;
      if (bi == 0.0) {
        violation = gp < 0.0 ? -gp : (gn > 0.0 ? gn : 0.0);
      } else if (bi >= upper) {
        violation = gp > 0.0 ? gp : 0.0;
      } else if (bi <= -upper) {
        violation = gn < 0.0 ? -gn : 0.0;
      } else {
        violation = bi > 0.0 ? std::abs(gp) : std::abs(gn);
      }
      max_violation = std::max(max_violation, violation);

      const double h = q_diag(i);
      double step;
      if (gp < h * bi) {
        step = -gp / h;
      } else if (gn > h * bi) {
        step = -gn / h;
      } else {
        step = -bi;
      }
      const double updated = std::clamp(bi + step, -upper, upper);
      const double delta = updated - bi;
      if (delta != 0.0) {
        beta(i) = updated;
        w += delta * xs.row(i).transpose();
        b += delta;
      }
    }
    if (max_violation < params.tolerance) {
      ++epoch;
      break;
    }
  }
  model.weights = w;
  model.bias = b;
  model.epochs_run = epoch;
  return model;
}

}  // namespace

std::string_view to_string(RegressorKind kind) noexcept {
  switch (kind) {
    case RegressorKind::Linear: return "linear";
    case RegressorKind::Mlp: return "mlp";
    case RegressorKind::Svr: return "svr";
  }
  return "unknown";
}

RegressorKind parse_regressor_kind(std::string_view text) {
  if (text == "linear" || text == "lr") return RegressorKind::Linear;
  if (text == "mlp" || text == "nn") return RegressorKind::Mlp;
  if (text == "svr" || text == "svmr") return RegressorKind::Svr;
  throw Error(ErrorKind::InvalidArgument, "unknown regressor kind '" + std::string(text) + "'");
}

Standardizer Standardizer::identity(Index cols) {
  return {Eigen::VectorXd::Zero(cols), Eigen::VectorXd::Ones(cols)};
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& x) {
  Standardizer s = identity(x.cols());
  if (x.rows() == 0) return s;
  s.mean = x.colwise().mean().transpose();
  for (Index c = 0; c < x.cols(); ++c) {
    const double sd = std::sqrt((x.col(c).array() - s.mean(c)).square().mean());
    s.scale(c) = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
  return ((x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array()).matrix();
}

MlpNetwork::MlpNetwork(std::size_t inputs, std::size_t hidden)
    : w1_(Eigen::MatrixXd::Zero(static_cast<Index>(hidden), static_cast<Index>(inputs))),
      b1_(Eigen::VectorXd::Zero(static_cast<Index>(hidden))),
      w2_(Eigen::VectorXd::Zero(static_cast<Index>(hidden))) {}

MlpNetwork MlpNetwork::random(std::size_t inputs, std::size_t hidden, std::uint64_t seed) {
  if (hidden == 0) throw Error(ErrorKind::InvalidArgument, "mlp needs at least one hidden unit");
  MlpNetwork net(inputs, hidden);
  std::mt19937_64 rng(seed);
  const double r1 = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(inputs, 1)));
  const double r2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  std::uniform_real_distribution<double> first(-r1, r1);
  std::uniform_real_distribution<double> second(-r2, r2);
  for (Index h = 0; h < net.w1_.rows(); ++h) {
    for (Index i = 0; i < net.w1_.cols(); ++i) net.w1_(h, i) = first(rng);
  }
  for (Index h = 0; h < net.w2_.size(); ++h) net.w2_(h) = second(rng);
  return net;
}

std::size_t MlpNetwork::parameter_count() const noexcept {
  return static_cast<std::size_t>(w1_.size() + b1_.size() + w2_.size() + 1);
}

Eigen::VectorXd MlpNetwork::parameters() const {
  Eigen::VectorXd theta(static_cast<Index>(parameter_count()));
  Index k = 0;
  for (Index h = 0; h < w1_.rows(); ++h) {
    for (Index i = 0; i < w1_.cols(); ++i) theta(k++) = w1_(h, i);
  }
  theta.segment(k, b1_.size()) = b1_;
  k += b1_.size();
  theta.segment(k, w2_.size()) = w2_;
  k += w2_.size();
  theta(k) = b2_;
  return theta;
}

void MlpNetwork::set_parameters(const Eigen::VectorXd& theta) {
  if (theta.size() != static_cast<Index>(parameter_count())) {
    throw Error(ErrorKind::DimensionMismatch, "parameter vector has the wrong length");
  }
  Index k = 0;
  for (Index h = 0; h < w1_.rows(); ++h) {
    for (Index i = 0; i < w1_.cols(); ++i) w1_(h, i) = theta(k++);
  }
  b1_ = theta.segment(k, b1_.size());
  k += b1_.size();
  w2_ = theta.segment(k, w2_.size());
  k += w2_.size();
  b2_ = theta(k);
}

Eigen::VectorXd MlpNetwork::forward(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd z = x * w1_.transpose();
  z.rowwise() += b1_.transpose();
  const Eigen::MatrixXd hidden = (1.0 + (-z.array()).exp()).inverse().matrix();
  return (hidden * w2_).array() + b2_;
}

double MlpNetwork::loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) const {
  if (y.size() == 0) return 0.0;
  return 0.5 * (forward(x) - y).squaredNorm() / static_cast<double>(y.size());
}

std::pair<double, Eigen::VectorXd> MlpNetwork::loss_and_gradient(const Eigen::MatrixXd& x,
                                                                 const Eigen::VectorXd& y) const {
  const auto n = static_cast<double>(y.size());
  Eigen::MatrixXd z = x * w1_.transpose();
  z.rowwise() += b1_.transpose();
  const Eigen::MatrixXd hidden = (1.0 + (-z.array()).exp()).inverse().matrix();
  const Eigen::VectorXd residual = ((hidden * w2_).array() + b2_).matrix() - y;
  const double loss = 0.5 * residual.squaredNorm() / n;

  const Eigen::VectorXd d_out = residual / n;
  const Eigen::MatrixXd d_z =
      ((d_out * w2_.transpose()).array() * hidden.array() * (1.0 - hidden.array())).matrix();
  const Eigen::MatrixXd g_w1 = d_z.transpose() * x;

  Eigen::VectorXd grad(static_cast<Index>(parameter_count()));
  Index k = 0;
  for (Index h = 0; h < g_w1.rows(); ++h) {
    for (Index i = 0; i < g_w1.cols(); ++i) grad(k++) = g_w1(h, i);
  }
  grad.segment(k, b1_.size()) = d_z.colwise().sum().transpose();
  k += b1_.size();
  grad.segment(k, w2_.size()) = hidden.transpose() * d_out;
  k += w2_.size();
  grad(k) = d_out.sum();
  return {loss, grad};
}

std::vector<double> MlpNetwork::train(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                      const MlpParams& params) {
  std::vector<double> history;
  history.reserve(params.epochs);
  double rate = params.learning_rate;
  Eigen::VectorXd theta = parameters();
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    const auto [current, grad] = loss_and_gradient(x, y);
    const Eigen::VectorXd candidate = theta - rate * grad;
    set_parameters(candidate);
    const double next = loss(x, y);
    if (next <= current) {
      theta = candidate;
      rate *= params.lr_growth;
      history.push_back(next);
    } else {
      set_parameters(theta);
      rate *= 0.5;
      history.push_back(current);
    }
  }
  return history;
}

double LinearWeights::at(std::string_view column) const {
  for (const auto& [name, w] : weights) {
    if (name == column) return w;
  }
  throw Error(ErrorKind::InvalidArgument, "no weight for column '" + std::string(column) + "'");
}

FittedRegressor::FittedRegressor(RegressorSpec spec, std::vector<std::string> columns, State state)
    : spec_(std::move(spec)), columns_(std::move(columns)), state_(std::move(state)), fitted_(true) {}

Eigen::VectorXd FittedRegressor::predict(const FeatureMatrix& x) const {
  if (!fitted_) throw Error(ErrorKind::NotFitted, "regressor has not been fitted");
  if (x.column_names() != columns_) {
    throw Error(ErrorKind::ColumnMismatch, "prediction columns differ from training columns");
  }
  if (x.rows() == 0) return Eigen::VectorXd(0);
  const auto& values = x.values();
  return std::visit(
      [&](const auto& m) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearModel>) {
          return (values * m.weights).array() + m.intercept;
        } else if constexpr (std::is_same_v<T, MlpModel>) {
          return (m.network.forward(m.x_scaler.apply(values)).array() * m.y_scale + m.y_mean)
              .matrix();
        } else {
          const Eigen::VectorXd f = (m.x_scaler.apply(values) * m.weights).array() + m.bias;
          return (f.array() * m.y_scale + m.y_mean).matrix();
        }
      },
      state_);
}

LinearWeights FittedRegressor::linear_weights() const {
  if (!fitted_) throw Error(ErrorKind::NotFitted, "regressor has not been fitted");
  const auto* linear = std::get_if<LinearModel>(&state_);
  if (linear == nullptr) {
    throw Error(ErrorKind::NotLinear,
                std::string(to_string(kind())) + " regressor has no linear weights");
  }
  LinearWeights out;
  out.intercept = linear->intercept;
  out.weights.reserve(columns_.size());
  for (std::size_t k = 0; k < columns_.size(); ++k) {
    out.weights.emplace_back(columns_[k], linear->weights(static_cast<Index>(k)));
  }
  return out;
}

nlohmann::json to_json(const RegressorSpec& spec) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(spec.kind));
  j["seed"] = spec.seed;
  j["linear"] = {{"ridge_lambda", spec.linear.ridge_lambda},
                 {"fit_intercept", spec.linear.fit_intercept},
                 {"standardize", spec.linear.standardize}};
  j["mlp"] = {{"hidden", spec.mlp.hidden},
              {"epochs", spec.mlp.epochs},
              {"learning_rate", spec.mlp.learning_rate},
              {"lr_growth", spec.mlp.lr_growth},
              {"standardize", spec.mlp.standardize}};
  j["svr"] = {{"c", spec.svr.c},
              {"epsilon", spec.svr.epsilon ? nlohmann::json(*spec.svr.epsilon) : nlohmann::json()},
              {"max_epochs", spec.svr.max_epochs},
              {"tolerance", spec.svr.tolerance},
              {"standardize", spec.svr.standardize}};
  return j;
}

RegressorSpec regressor_spec_from_json(const nlohmann::json& j) {
  RegressorSpec spec;
  spec.kind = parse_regressor_kind(j.at("kind").get<std::string>());
  spec.seed = j.at("seed").get<std::uint64_t>();
  const auto& lin = j.at("linear");
  spec.linear.ridge_lambda = lin.at("ridge_lambda").get<double>();
  spec.linear.fit_intercept = lin.at("fit_intercept").get<bool>();
  spec.linear.standardize = lin.at("standardize").get<bool>();
  const auto& mlp = j.at("mlp");
  spec.mlp.hidden = mlp.at("hidden").get<std::size_t>();
  spec.mlp.epochs = mlp.at("epochs").get<std::size_t>();
  spec.mlp.learning_rate = mlp.at("learning_rate").get<double>();
  spec.mlp.lr_growth = mlp.at("lr_growth").get<double>();
  spec.mlp.standardize = mlp.at("standardize").get<bool>();
  const auto& svr = j.at("svr");
  spec.svr.c = svr.at("c").get<double>();
  if (!svr.at("epsilon").is_null()) spec.svr.epsilon = svr.at("epsilon").get<double>();
  spec.svr.max_epochs = svr.at("max_epochs").get<std::size_t>();
  spec.svr.tolerance = svr.at("tolerance").get<double>();
  spec.svr.standardize = svr.at("standardize").get<bool>();
  return spec;
}

nlohmann::json FittedRegressor::to_json() const {
  if (!fitted_) throw Error(ErrorKind::NotFitted, "regressor has not been fitted");
  nlohmann::json j;
  j["kind"] = std::string(to_string(kind()));
  j["spec"] = classifieds::to_json(spec_);
  j["columns"] = columns_;
  j["params"] = std::visit(
      [](const auto& m) -> nlohmann::json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearModel>) {
          return {{"weights", vector_json(m.weights)}, {"intercept", m.intercept}};
        } else if constexpr (std::is_same_v<T, MlpModel>) {
          return {{"x_scaler", scaler_json(m.x_scaler)},
                  {"y_mean", m.y_mean},
                  {"y_scale", m.y_scale},
                  {"inputs", m.network.inputs()},
                  {"hidden", m.network.hidden()},
                  {"parameters", vector_json(m.network.parameters())}};
        } else {
          return {{"x_scaler", scaler_json(m.x_scaler)},
                  {"y_mean", m.y_mean},
                  {"y_scale", m.y_scale},
                  {"epsilon", m.epsilon},
                  {"weights", vector_json(m.weights)},
                  {"bias", m.bias}};
        }
      },
      state_);
  return j;
}

FittedRegressor FittedRegressor::from_json(const nlohmann::json& j) {
  RegressorSpec spec = regressor_spec_from_json(j.at("spec"));
  auto columns = j.at("columns").get<std::vector<std::string>>();
  const auto& p = j.at("params");
  const auto cols = static_cast<Index>(columns.size());
  State state;
  switch (spec.kind) {
    case RegressorKind::Linear: {
      LinearModel m;
      m.weights = vector_from_json(p.at("weights"));
      m.intercept = p.at("intercept").get<double>();
      if (m.weights.size() != cols) {
        throw Error(ErrorKind::DimensionMismatch, "linear weights do not match columns");
      }
      state = std::move(m);
      break;
    }
    case RegressorKind::Mlp: {
      MlpModel m;
      m.x_scaler = scaler_from_json(p.at("x_scaler"));
      m.y_mean = p.at("y_mean").get<double>();
      m.y_scale = p.at("y_scale").get<double>();
      m.network = MlpNetwork(p.at("inputs").get<std::size_t>(), p.at("hidden").get<std::size_t>());
      m.network.set_parameters(vector_from_json(p.at("parameters")));
      if (static_cast<Index>(m.network.inputs()) != cols) {
        throw Error(ErrorKind::DimensionMismatch, "mlp inputs do not match columns");
      }
      state = std::move(m);
      break;
    }
    case RegressorKind::Svr: {
      SvrModel m;
      m.x_scaler = scaler_from_json(p.at("x_scaler"));
      m.y_mean = p.at("y_mean").get<double>();
      m.y_scale = p.at("y_scale").get<double>();
      m.epsilon = p.at("epsilon").get<double>();
      m.weights = vector_from_json(p.at("weights"));
      m.bias = p.at("bias").get<double>();
      if (m.weights.size() != cols) {
        throw Error(ErrorKind::DimensionMismatch, "svr weights do not match columns");
      }
      state = std::move(m);
      break;
    }
  }
  return FittedRegressor(std::move(spec), std::move(columns), std::move(state));
}

FittedRegressor fit(const RegressorSpec& spec, const FeatureMatrix& x, const Eigen::VectorXd& y) {
  check_training_input(x, y);
  const auto& values = x.values();
  switch (spec.kind) {
    case RegressorKind::Linear:
      return FittedRegressor(spec, x.column_names(), fit_linear(spec.linear, values, y));
    case RegressorKind::Mlp:
      return FittedRegressor(spec, x.column_names(), fit_mlp(spec, values, y));
    case RegressorKind::Svr:
      return FittedRegressor(spec, x.column_names(), fit_svr(spec, values, y));
  }
  throw Error(ErrorKind::InvalidArgument, "unknown regressor kind");
}

Eigen::VectorXd predict(const FittedRegressor& model, const FeatureMatrix& x) {
  return model.predict(x);
}

LinearWeights linear_weights(const FittedRegressor& model) { return model.linear_weights(); }

}  // namespace classifieds
