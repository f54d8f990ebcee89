#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "classifieds/feature_matrix.hpp"
#include "classifieds/record.hpp"

namespace classifieds {

/// "Dubai Marina" -> "loc_dubai_marina": lower-case, spaces to '_', other
/// non-alphanumeric characters dropped.
std::string location_column_name(std::string_view label);

/// One-hot encoder for the nominal location field. Labels whose column names
/// coincide after normalisation share one column.
class LocationEncoder {
 public:
  LocationEncoder() = default;
  explicit LocationEncoder(std::vector<std::string> locations);

  const std::vector<std::string>& locations() const noexcept { return locations_; }
  const std::vector<std::string>& column_names() const noexcept { return columns_; }

  /// Column of the label, or column_names().size() for an unseen location.
  std::size_t column_of(std::string_view label) const;

 private:
  std::vector<std::string> locations_;
  std::vector<std::string> columns_;
};

/// Distinct locations in first-appearance order. Throws EmptyInput.
LocationEncoder fit_location_encoder(std::span<const ClassifiedRecord> records);

/// Columns [beds, baths, size, loc_*...]; unseen locations leave the location block zero.
FeatureMatrix encode_structured(std::span<const ClassifiedRecord> records,
                                const LocationEncoder& encoder);

}  // namespace classifieds
