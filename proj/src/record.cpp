#include "classifieds/record.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <utility>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "classifieds/error.hpp"

namespace classifieds {

namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

ListingCategory parse_category(std::string_view text) {
  std::string key = lower_ascii(text);
  std::replace(key.begin(), key.end(), '_', '-');
  const auto dash = key.find('-');
  if (dash == std::string::npos) {
    throw Error(ErrorKind::InvalidArgument, "category must look like apartment-rent, got '" +
                                                std::string(text) + "'");
  }
  const std::string unit = key.substr(0, dash);
  const std::string offer = key.substr(dash + 1);

  ListingCategory category;
  if (unit == "apartment" || unit == "flat") {
    category.unit = UnitKind::Apartment;
  } else if (unit == "house" || unit == "villa") {
    category.unit = UnitKind::House;
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown unit kind '" + unit + "'");
  }
  if (offer == "rent") {
    category.offer = OfferKind::Rent;
  } else if (offer == "sale") {
    category.offer = OfferKind::Sale;
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown offer kind '" + offer + "'");
  }
  return category;
}

std::string to_string(ListingCategory category) {
  std::string out = category.unit == UnitKind::Apartment ? "apartment" : "house";
  out += category.offer == OfferKind::Rent ? "-rent" : "-sale";
  return out;
}

void CleaningConfig::validate() const {
  if (!(rent_avg_min > 0 && sale_avg_min > 0)) {
    throw Error(ErrorKind::InvalidArgument, "cleaning bounds must be positive");
  }
  if (!(rent_avg_min < rent_avg_max)) {
    throw Error(ErrorKind::InvalidArgument, "rent_avg_min must be below rent_avg_max");
  }
  if (!(sale_avg_min < sale_avg_max)) {
    throw Error(ErrorKind::InvalidArgument, "sale_avg_min must be below sale_avg_max");
  }
}

std::vector<ClassifiedRecord> deduplicate(std::span<const ClassifiedRecord> records) {
  std::set<std::pair<std::string_view, std::string_view>> seen;
  std::vector<ClassifiedRecord> out;
  out.reserve(records.size());
  for (const auto& record : records) {
    if (seen.emplace(trim(record.title), trim(record.description)).second) {
      out.push_back(record);
    }
  }
  return out;
}

double average_price_per_bedroom(const ClassifiedRecord& record) noexcept {
  return static_cast<double>(record.price) / static_cast<double>(record.beds + 1);
}

bool within_price_bounds(const ClassifiedRecord& record, ListingCategory category,
                         const CleaningConfig& config) noexcept {
  const double avg = average_price_per_bedroom(record);
  if (category.offer == OfferKind::Rent) {
    return config.rent_avg_min <= avg && avg <= config.rent_avg_max;
  }
  return config.sale_avg_min <= avg && avg <= config.sale_avg_max;
}

std::string to_lower_utf8(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(text.data());
  const auto length = static_cast<std::int32_t>(text.size());
  std::int32_t i = 0;
  while (i < length) {
    const std::int32_t start = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) {
      out.append(text.substr(start, i - start));
      continue;
    }
    const UChar32 lower = u_tolower(c);
    std::uint8_t buffer[U8_MAX_LENGTH];
    std::int32_t n = 0;
    UBool error = false;
    U8_APPEND(buffer, n, U8_MAX_LENGTH, lower, error);
    if (error) {
      out.append(text.substr(start, i - start));
    } else {
      out.append(reinterpret_cast<const char*>(buffer), n);
    }
  }
  return out;
}

std::vector<ClassifiedRecord> clean(std::span<const ClassifiedRecord> records,
                                    ListingCategory category, const CleaningConfig& config,
                                    CleaningStats* stats) {
  config.validate();
  std::vector<ClassifiedRecord> unique = deduplicate(records);
  const std::size_t after_dedup = unique.size();

  std::vector<ClassifiedRecord> out;
  out.reserve(unique.size());
  for (auto& record : unique) {
    if (!within_price_bounds(record, category, config)) continue;
    record.title = to_lower_utf8(record.title);
    record.description = to_lower_utf8(record.description);
    out.push_back(std::move(record));
  }
  // Records that differed only by letter case collide after lower-casing;
  // collapsing them here keeps clean() idempotent.
  out = deduplicate(out);
  if (stats != nullptr) {
    stats->input = records.size();
    stats->after_dedup = after_dedup;
    stats->after_threshold = out.size();
  }
  return out;
}

}  // namespace classifieds
