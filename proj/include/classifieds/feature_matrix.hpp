#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace classifieds {

/// Dense real matrix with named columns; row i describes record i.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<std::string> column_names, Eigen::MatrixXd values);
  /// Zero-filled matrix with the given shape.
  FeatureMatrix(std::vector<std::string> column_names, std::size_t rows);

  std::size_t rows() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(values_.cols()); }

  const std::vector<std::string>& column_names() const noexcept { return names_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  Eigen::MatrixXd& values() noexcept { return values_; }

  double operator()(std::size_t row, std::size_t col) const {
    return values_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }

  /// Index of the named column, or cols() when absent.
  std::size_t column_index(const std::string& name) const;

  FeatureMatrix select_rows(const std::vector<std::size_t>& rows) const;
  FeatureMatrix select_columns(const std::vector<std::size_t>& cols) const;

  /// Throws InvalidArgument on a NaN or infinite entry.
  void check_finite() const;

 private:
  std::vector<std::string> names_;
  Eigen::MatrixXd values_;
};

}  // namespace classifieds
