#include "classifieds/structured.hpp"

#include <algorithm>

#include "classifieds/error.hpp"
#include "utf8.hpp"

namespace classifieds {

std::string location_column_name(std::string_view label) {
  std::string name = "loc_";
  detail::for_each_code_point(to_lower_utf8(label), [&](UChar32 c, std::string_view bytes) {
    if (c == ' ') {
      name += '_';
    } else if (detail::is_alnum(c)) {
      name += bytes;
    }
  });
  return name;
}

LocationEncoder::LocationEncoder(std::vector<std::string> locations) {
  for (auto& label : locations) {
    auto column = location_column_name(label);
    if (std::find(columns_.begin(), columns_.end(), column) != columns_.end()) continue;
    columns_.push_back(std::move(column));
    locations_.push_back(std::move(label));
  }
}

std::size_t LocationEncoder::column_of(std::string_view label) const {
  const auto column = location_column_name(label);
  return static_cast<std::size_t>(std::find(columns_.begin(), columns_.end(), column) -
                                  columns_.begin());
}

LocationEncoder fit_location_encoder(std::span<const ClassifiedRecord> records) {
  if (records.empty()) {
    throw Error(ErrorKind::EmptyInput, "cannot fit a location encoder on zero records");
  }
  std::vector<std::string> labels;
  labels.reserve(records.size());
  for (const auto& r : records) labels.push_back(r.location);
  return LocationEncoder(std::move(labels));
}

FeatureMatrix encode_structured(std::span<const ClassifiedRecord> records,
                                const LocationEncoder& encoder) {
  std::vector<std::string> names = {"beds", "baths", "size"};
  names.insert(names.end(), encoder.column_names().begin(), encoder.column_names().end());
  FeatureMatrix matrix(std::move(names), records.size());
  auto& values = matrix.values();
  const auto location_count = encoder.column_names().size();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    values(row, 0) = static_cast<double>(records[i].beds);
    values(row, 1) = static_cast<double>(records[i].baths);
    values(row, 2) = static_cast<double>(records[i].size);
    const auto column = encoder.column_of(records[i].location);
    if (column < location_count) values(row, static_cast<Eigen::Index>(3 + column)) = 1.0;
  }
  return matrix;
}

}  // namespace classifieds
