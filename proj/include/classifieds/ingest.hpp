#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "classifieds/record.hpp"

namespace classifieds {

struct Rejection {
  std::size_t line = 0;  // 1-based physical line where the row starts
  std::string reason;

  bool operator==(const Rejection&) const = default;
};

/// accepted + rejected always equals the number of data rows seen.
struct IngestReport {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::vector<Rejection> rejections;
};

struct IngestResult {
  std::vector<ClassifiedRecord> records;
  IngestReport report;
};

/// Column order used when writing, and the seven required header names.
inline constexpr const char* kRecordFields[] = {"title", "description", "beds", "baths",
                                                "size",  "location",    "price"};

/// RFC-4180 CSV. The header must name exactly the seven record fields, in any
/// order and any case. A header problem throws Error (MissingColumn or
/// UnexpectedColumn); a bad data row is skipped and logged in the report.
IngestResult parse_csv(std::istream& in);
IngestResult read_csv(const std::filesystem::path& path);

/// One JSON object per line with exactly the seven lower-case keys. Blank
/// lines are skipped and not counted.
IngestResult parse_jsonl(std::istream& in);
IngestResult read_jsonl(const std::filesystem::path& path);

/// Dispatches on extension: ".jsonl"/".ndjson" read as JSONL, everything else as CSV.
IngestResult read_records(const std::filesystem::path& path);

void write_csv(std::ostream& out, std::span<const ClassifiedRecord> records);
void write_csv(const std::filesystem::path& path, std::span<const ClassifiedRecord> records);

}  // namespace classifieds
