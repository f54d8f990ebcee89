#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"

#include "classifieds/error.hpp"
#include "classifieds/ingest.hpp"
#include "helpers.hpp"

using namespace classifieds;

namespace {

ErrorKind kind_of(const std::string& csv) {
  std::istringstream in(csv);
  try {
    parse_csv(in);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

IngestResult csv(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

IngestResult jsonl(const std::string& text) {
  std::istringstream in(text);
  return parse_jsonl(in);
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("quoted fields with commas, quotes and newlines") {
  const auto r = csv(
      "title,description,beds,baths,size,location,price\n"
      "\"Flat, sea view\",\"He said \"\"wow\"\"\nsecond line\",2,1,900,Dubai Marina,80000\n");
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].title == "Flat, sea view");
  CHECK(r.records[0].description == "He said \"wow\"\nsecond line");
  CHECK(r.records[0].price == 80000);
  CHECK(r.report.accepted == 1);
  CHECK(r.report.rejected == 0);
}

TEST_CASE("header in any order and case, with BOM and CRLF") {
  const auto r = csv(
      "\xEF\xBB\xBFPRICE,Location,size,baths,beds,Description,Title\r\n"
      "50000,Al Barsha,700,1,1,desc,title\r\n");
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].title == "title");
  CHECK(r.records[0].beds == 1);
  CHECK(r.records[0].price == 50000);
}

TEST_CASE("header problems abort") {
  CHECK(kind_of("title,description,beds,baths,size,location\n") == ErrorKind::MissingColumn);
  CHECK(kind_of("title,description,beds,baths,size,location,price,agent\n") ==
        ErrorKind::UnexpectedColumn);
  CHECK(kind_of("title,title,description,beds,baths,size,location,price\n") ==
        ErrorKind::UnexpectedColumn);
  CHECK(kind_of("") == ErrorKind::MissingColumn);
}

TEST_CASE("bad rows are skipped with line and reason") {
  const auto r = csv(
      "title,description,beds,baths,size,location,price\n"
      "ok,fine,1,1,700,Al Barsha,50000\n"
      "frac,x,1.5,1,700,Al Barsha,50000\n"
      "neg,x,-1,1,700,Al Barsha,50000\n"
      "zero,x,1,1,700,Al Barsha,0\n"
      "short,x,1,1\n"
      "noloc,x,1,1,700,  ,50000\n"
      "utf,\xC3\x28,1,1,700,Al Barsha,50000\n");
  CHECK(r.report.accepted == 1);
  CHECK(r.report.rejected == 6);
  CHECK(r.report.accepted + r.report.rejected == 7);
  REQUIRE(r.report.rejections.size() == 6);
  CHECK(r.report.rejections[0].line == 3);
  CHECK(r.report.rejections[0].reason == "non-integer beds");
  CHECK(r.report.rejections[1].reason == "negative beds");
  CHECK(r.report.rejections[2].reason == "non-positive price");
  CHECK(r.report.rejections[4].reason == "empty location");
  CHECK(r.report.rejections[5].reason == "invalid UTF-8");
}

TEST_CASE("jsonl") {
  const auto r = jsonl(
      "{\"title\":\"a\",\"description\":\"b\",\"beds\":1,\"baths\":1,\"size\":700,"
      "\"location\":\"Al Barsha\",\"price\":50000}\n"
      "\n"
      "{not json\n"
      "{\"title\":\"a\",\"description\":\"b\",\"beds\":1,\"baths\":1,\"size\":700,"
      "\"location\":\"Al Barsha\"}\n"
      "{\"title\":\"a\",\"description\":\"b\",\"beds\":1,\"baths\":1,\"size\":700,"
      "\"location\":\"Al Barsha\",\"price\":5,\"agent\":\"x\"}\n");
  CHECK(r.report.accepted == 1);
  REQUIRE(r.report.rejected == 3);
  CHECK(r.report.rejections[0].line == 3);
  CHECK(r.report.rejections[0].reason == "malformed line");
  CHECK(r.report.rejections[1].reason == "missing price");
}

TEST_CASE("write_csv then parse_csv round-trips") {
  std::mt19937_64 rng(3);
  const std::string alphabet = "ab ,\"\n\xC3\xA9x";
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ClassifiedRecord> records;
    for (int i = 0; i < 5; ++i) {
      ClassifiedRecord r;
      for (int k = 0; k < 8; ++k) {
        const auto c = rng() % 8;
        // keep the two-byte é intact
        if (c == 6) {
          r.title += "\xC3\xA9";
        } else {
          r.title += alphabet[c == 7 ? 8 : c];
        }
        r.description += alphabet[rng() % 6];
      }
      r.title = "t" + r.title;
      r.beds = static_cast<std::int64_t>(rng() % 6);
      r.baths = 1;
      r.size = 100 + static_cast<std::int64_t>(rng() % 3000);
      r.location = "Dubai Marina";
      r.price = 1 + static_cast<std::int64_t>(rng() % 1000000);
      records.push_back(r);
    }
    std::ostringstream out;
    write_csv(out, records);
    const auto back = csv(out.str());
    CHECK(back.report.rejected == 0);
    CHECK(back.records == records);
  }
}

TEST_CASE("read_records dispatches on extension") {
  testing_helpers::TempDir dir;
  {
    std::ofstream f(dir.file("x.jsonl"));
    f << "{\"title\":\"a\",\"description\":\"b\",\"beds\":1,\"baths\":1,\"size\":700,"
         "\"location\":\"Al Barsha\",\"price\":50000}\n";
  }
  CHECK(read_records(dir.file("x.jsonl")).records.size() == 1);
  CHECK(read_records(testing_helpers::data_path("cleaning_fixture.csv")).records.size() == 10);
  CHECK_THROWS_AS(read_records(dir.file("missing.csv")), Error);
}

}  // TEST_SUITE
