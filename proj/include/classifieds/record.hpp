#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace classifieds {

/// One real-estate listing. Prices are AED (annual rent or sale price).
struct ClassifiedRecord {
  std::string title;
  std::string description;
  std::int64_t beds = 0;
  std::int64_t baths = 0;
  std::int64_t size = 0;  // square feet
  std::string location;
  std::int64_t price = 0;

  bool operator==(const ClassifiedRecord&) const = default;
};

enum class UnitKind { Apartment, House };
enum class OfferKind { Rent, Sale };

struct ListingCategory {
  UnitKind unit = UnitKind::Apartment;
  OfferKind offer = OfferKind::Rent;

  bool operator==(const ListingCategory&) const = default;
};

/// Parses "apartment-rent", "house_sale", ... (case-insensitive, '-' or '_').
ListingCategory parse_category(std::string_view text);
std::string to_string(ListingCategory category);

/// Bounds on price per (beds + 1); both ends inclusive.
struct CleaningConfig {
  double rent_avg_min = 10000.0;
  double rent_avg_max = 100000.0;
  double sale_avg_min = 100000.0;
  double sale_avg_max = 1000000.0;

  void validate() const;
  bool operator==(const CleaningConfig&) const = default;
};

/// Record counts after each cleaning step.
struct CleaningStats {
  std::size_t input = 0;
  std::size_t after_dedup = 0;
  std::size_t after_threshold = 0;
};

/// Keeps the first of every group sharing (trimmed) title and description.
std::vector<ClassifiedRecord> deduplicate(std::span<const ClassifiedRecord> records);

double average_price_per_bedroom(const ClassifiedRecord& record) noexcept;

bool within_price_bounds(const ClassifiedRecord& record, ListingCategory category,
                         const CleaningConfig& config) noexcept;

/// Unicode simple lower-case mapping, code point by code point. Invalid UTF-8
/// bytes are passed through unchanged.
std::string to_lower_utf8(std::string_view text);

/// Dedup, then price-per-bedroom outlier removal, then lower-casing of text.
std::vector<ClassifiedRecord> clean(std::span<const ClassifiedRecord> records,
                                    ListingCategory category, const CleaningConfig& config,
                                    CleaningStats* stats = nullptr);

}  // namespace classifieds
