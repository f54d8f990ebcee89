#include "classifieds/feature_matrix.hpp"

#include <algorithm>

#include "classifieds/error.hpp"

namespace classifieds {

FeatureMatrix::FeatureMatrix(std::vector<std::string> column_names, Eigen::MatrixXd values)
    : names_(std::move(column_names)), values_(std::move(values)) {
  if (static_cast<Eigen::Index>(names_.size()) != values_.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                std::to_string(names_.size()) + " column names for " +
                    std::to_string(values_.cols()) + " columns");
  }
}

FeatureMatrix::FeatureMatrix(std::vector<std::string> column_names, std::size_t rows)
    : names_(std::move(column_names)),
      values_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows),
                                    static_cast<Eigen::Index>(names_.size()))) {}

std::size_t FeatureMatrix::column_index(const std::string& name) const {
  return static_cast<std::size_t>(std::find(names_.begin(), names_.end(), name) - names_.begin());
}

FeatureMatrix FeatureMatrix::select_rows(const std::vector<std::size_t>& rows) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), values_.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = values_.row(static_cast<Eigen::Index>(rows[i]));
  }
  return FeatureMatrix(names_, std::move(out));
}

FeatureMatrix FeatureMatrix::select_columns(const std::vector<std::size_t>& cols) const {
  Eigen::MatrixXd out(values_.rows(), static_cast<Eigen::Index>(cols.size()));
  std::vector<std::string> names;
  names.reserve(cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = values_.col(static_cast<Eigen::Index>(cols[j]));
    names.push_back(names_[cols[j]]);
  }
  return FeatureMatrix(std::move(names), std::move(out));
}

void FeatureMatrix::check_finite() const {
  if (!values_.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "feature matrix contains NaN or infinite values");
  }
}

}  // namespace classifieds
