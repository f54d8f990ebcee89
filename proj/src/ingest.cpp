#include "classifieds/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include <unicode/utf8.h>

#include "classifieds/error.hpp"

namespace classifieds {

namespace {

constexpr std::size_t kFieldCount = 7;

enum Field : std::size_t { Title, Description, Beds, Baths, Size, Location, Price };

bool valid_utf8(std::string_view s) {
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(s.data());
  const auto length = static_cast<std::int32_t>(s.size());
  std::int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) return false;
  }
  return true;
}

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

std::optional<std::int64_t> parse_integer(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

// Checks the numeric invariants of a record; returns a rejection reason or "".
std::string check_record(const ClassifiedRecord& r) {
  if (r.beds < 0) return "negative beds";
  if (r.baths < 0) return "negative baths";
  if (r.size < 0) return "negative size";
  if (r.size == 0) return "non-positive size";
  if (r.price < 0) return "negative price";
  if (r.price == 0) return "non-positive price";
  if (trim(r.location).empty()) return "empty location";
  for (const auto* text : {&r.title, &r.description, &r.location}) {
    if (!valid_utf8(*text)) return "invalid UTF-8";
  }
  return {};
}

struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

// Streaming RFC-4180 reader; quoted fields may hold commas, quotes ("") and newlines.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  std::optional<CsvRow> next() {
    CsvRow row;
    row.line = line_;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    char c;
    while (in_.get(c)) {
      any = true;
      if (in_quotes) {
        if (c == '"') {
          if (in_.peek() == '"') {
            in_.get(c);
            field += '"';
          } else {
            in_quotes = false;
          }
        } else {
          if (c == '\n') ++line_;
          field += c;
        }
        continue;
      }
      if (c == '"') {
        in_quotes = true;
      } else if (c == ',') {
        row.fields.push_back(std::move(field));
        field.clear();
      } else if (c == '\r' && in_.peek() == '\n') {
        // CRLF; the '\n' ends the row on the next iteration
      } else if (c == '\n') {
        ++line_;
        row.fields.push_back(std::move(field));
        return row;
      } else {
        field += c;
      }
    }
    if (!any) return std::nullopt;
    row.fields.push_back(std::move(field));
    return row;
  }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
};

bool blank_row(const CsvRow& row) {
  return row.fields.size() == 1 && trim(row.fields.front()).empty();
}

std::string lower(std::string_view s) {
  std::string out(trim(s));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void reject(IngestReport& report, std::size_t line, std::string reason) {
  ++report.rejected;
  report.rejections.push_back({line, std::move(reason)});
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return in;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

IngestResult parse_csv(std::istream& in) {
  CsvReader reader(in);
  IngestResult result;

  std::optional<CsvRow> header = reader.next();
  while (header && blank_row(*header)) header = reader.next();
  if (!header) {
    throw Error(ErrorKind::MissingColumn, "input has no header row");
  }
  if (!header->fields.empty() && header->fields.front().starts_with("\xEF\xBB\xBF")) {
    header->fields.front().erase(0, 3);
  }

  std::array<std::optional<std::size_t>, kFieldCount> column_of;
  for (std::size_t c = 0; c < header->fields.size(); ++c) {
    const std::string name = lower(header->fields[c]);
    const auto* it = std::find(std::begin(kRecordFields), std::end(kRecordFields), name);
    if (it == std::end(kRecordFields)) {
      throw Error(ErrorKind::UnexpectedColumn, "unexpected header column '" + name + "'");
    }
    auto& slot = column_of[static_cast<std::size_t>(it - std::begin(kRecordFields))];
    if (slot) throw Error(ErrorKind::UnexpectedColumn, "duplicate header column '" + name + "'");
    slot = c;
  }
  for (std::size_t f = 0; f < kFieldCount; ++f) {
    if (!column_of[f]) {
      throw Error(ErrorKind::MissingColumn,
                  std::string("header lacks required column '") + kRecordFields[f] + "'");
    }
  }

  while (auto row = reader.next()) {
    if (blank_row(*row)) continue;
    if (row->fields.size() != header->fields.size()) {
      reject(result.report, row->line,
             "expected " + std::to_string(header->fields.size()) + " fields, found " +
                 std::to_string(row->fields.size()));
      continue;
    }
    const auto field = [&](Field f) -> const std::string& { return row->fields[*column_of[f]]; };

    ClassifiedRecord record;
    record.title = field(Title);
    record.description = field(Description);
    record.location = std::string(trim(field(Location)));

    std::string reason;
    const std::pair<Field, std::int64_t*> numeric[] = {
        {Beds, &record.beds}, {Baths, &record.baths}, {Size, &record.size}, {Price, &record.price}};
    for (const auto& [f, target] : numeric) {
      const auto value = parse_integer(field(f));
      if (!value) {
        reason = std::string("non-integer ") + kRecordFields[f];
        break;
      }
      *target = *value;
    }
    if (reason.empty()) reason = check_record(record);
    if (!reason.empty()) {
      reject(result.report, row->line, std::move(reason));
      continue;
    }
    result.records.push_back(std::move(record));
    ++result.report.accepted;
  }
  return result;
}

IngestResult read_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_csv(in);
}

IngestResult parse_jsonl(std::istream& in) {
  IngestResult result;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;

    nlohmann::json object;
    try {
      object = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      reject(result.report, line_number, "malformed line");
      continue;
    }
    if (!object.is_object()) {
      reject(result.report, line_number, "malformed line: not an object");
      continue;
    }

    std::string reason;
    for (const auto& [key, value] : object.items()) {
      if (std::find(std::begin(kRecordFields), std::end(kRecordFields), key) ==
          std::end(kRecordFields)) {
        reason = "unexpected key '" + key + "'";
        break;
      }
    }
    for (const char* key : kRecordFields) {
      if (!reason.empty()) break;
      if (!object.contains(key)) reason = std::string("missing ") + key;
    }

    ClassifiedRecord record;
    if (reason.empty()) {
      const std::pair<Field, std::string*> text[] = {
          {Title, &record.title}, {Description, &record.description}, {Location, &record.location}};
      for (const auto& [f, target] : text) {
        const auto& value = object[kRecordFields[f]];
        if (!value.is_string()) {
          reason = std::string("non-string ") + kRecordFields[f];
          break;
        }
        *target = value.get<std::string>();
      }
      record.location = std::string(trim(record.location));
    }
    if (reason.empty()) {
      const std::pair<Field, std::int64_t*> numeric[] = {
          {Beds, &record.beds}, {Baths, &record.baths}, {Size, &record.size}, {Price, &record.price}};
      for (const auto& [f, target] : numeric) {
        const auto& value = object[kRecordFields[f]];
        if (!value.is_number_integer()) {
          reason = std::string("non-integer ") + kRecordFields[f];
          break;
        }
        *target = value.get<std::int64_t>();
      }
    }
    if (reason.empty()) reason = check_record(record);
    if (!reason.empty()) {
      reject(result.report, line_number, std::move(reason));
      continue;
    }
    result.records.push_back(std::move(record));
    ++result.report.accepted;
  }
  return result;
}

IngestResult read_jsonl(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_jsonl(in);
}

IngestResult read_records(const std::filesystem::path& path) {
  const auto ext = lower(path.extension().string());
  if (ext == ".jsonl" || ext == ".ndjson") return read_jsonl(path);
  return read_csv(path);
}

void write_csv(std::ostream& out, std::span<const ClassifiedRecord> records) {
  out << "title,description,beds,baths,size,location,price\n";
  for (const auto& r : records) {
    out << quote(r.title) << ',' << quote(r.description) << ',' << r.beds << ',' << r.baths << ','
        << r.size << ',' << quote(r.location) << ',' << r.price << '\n';
  }
}

void write_csv(const std::filesystem::path& path, std::span<const ClassifiedRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  write_csv(out, records);
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

}  // namespace classifieds
