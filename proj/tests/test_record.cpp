#include <random>

#include "doctest.h"

#include "classifieds/error.hpp"
#include "classifieds/ingest.hpp"
#include "classifieds/record.hpp"
#include "helpers.hpp"

using namespace classifieds;
using testing_helpers::record;

TEST_SUITE("record") {

TEST_CASE("category parsing") {
  CHECK(parse_category("apartment-rent") == ListingCategory{UnitKind::Apartment, OfferKind::Rent});
  CHECK(parse_category("House_Sale") == ListingCategory{UnitKind::House, OfferKind::Sale});
  CHECK(to_string(ListingCategory{UnitKind::House, OfferKind::Rent}) == "house-rent");
  CHECK_THROWS_AS(parse_category("castle-rent"), Error);
}

TEST_CASE("dedup keeps the first of trimmed title+description") {
  const std::vector<ClassifiedRecord> in = {
      record("A flat", "nice", 1, 50000), record("B flat", "nice", 1, 40000),
      record(" A flat ", "nice  ", 2, 70000), record("a flat", "nice", 1, 50000)};
  const auto out = deduplicate(in);
  REQUIRE(out.size() == 3);
  CHECK(out[0].price == 50000);
  CHECK(out[1].title == "B flat");
  CHECK(out[2].title == "a flat");  // case differs, so distinct at this step
}

TEST_CASE("price bounds are inclusive") {
  const CleaningConfig cfg;
  const ListingCategory rent{UnitKind::Apartment, OfferKind::Rent};
  const ListingCategory sale{UnitKind::Apartment, OfferKind::Sale};
  CHECK(within_price_bounds(record("t", "d", 1, 20000), rent, cfg));
  CHECK(within_price_bounds(record("t", "d", 0, 100000), rent, cfg));
  CHECK_FALSE(within_price_bounds(record("t", "d", 1, 19998), rent, cfg));
  CHECK_FALSE(within_price_bounds(record("t", "d", 0, 100001), rent, cfg));
  CHECK(within_price_bounds(record("t", "d", 1, 200000), sale, cfg));
  CHECK_FALSE(within_price_bounds(record("t", "d", 1, 199999), sale, cfg));
  CHECK(average_price_per_bedroom(record("t", "d", 3, 120000)) == doctest::Approx(30000.0));
}

TEST_CASE("config validation") {
  CleaningConfig cfg;
  cfg.rent_avg_min = 5e5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.sale_avg_min = -1;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("unicode lower-casing") {
  CHECK(to_lower_utf8("Dubai MARINA") == "dubai marina");
  CHECK(to_lower_utf8("\xC3\x89T\xC3\x89") == "\xC3\xA9t\xC3\xA9");  // ÉTÉ
  CHECK(to_lower_utf8("\xD0\x9C\xD0\x98\xD0\xA0") == "\xD0\xBC\xD0\xB8\xD1\x80");  // МИР
  CHECK(to_lower_utf8("bad \xFF byte") == "bad \xFF byte");
}

TEST_CASE("cleaning fixture: two duplicates, one low and one high outlier") {
  // Expected counts are worked out row by row in data/README.
  const auto in = read_csv(testing_helpers::data_path("cleaning_fixture.csv"));
  REQUIRE(in.records.size() == 10);
  CleaningStats stats;
  const auto out = clean(in.records, {}, {}, &stats);
  CHECK(stats.input == 10);
  CHECK(stats.after_dedup == 8);
  CHECK(stats.after_threshold == 6);
  REQUIRE(out.size() == 6);
  CHECK(out[0].title == "sunny 2br in marina");
  CHECK(out[0].price == 90000);  // first occurrence wins
  CHECK(out[3].title == "boundary low");
  CHECK(out[4].title == "boundary high");
  CHECK(out[0].location == "Dubai Marina");  // location is not lower-cased
}

TEST_CASE("cleaning fixture with a single outlier") {
  const auto in = read_csv(testing_helpers::data_path("cleaning_fixture_one_outlier.csv"));
  CleaningStats stats;
  const auto out = clean(in.records, {}, {}, &stats);
  CHECK(stats.input == 10);
  CHECK(stats.after_dedup == 8);
  CHECK(stats.after_threshold == 7);
  CHECK(out.size() == 7);
}

TEST_CASE("clean is idempotent and never grows the input") {
  std::mt19937_64 rng(7);
  const char* titles[] = {"Flat", "FLAT", "flat", "Villa", "Room", "Studio"};
  const char* descs[] = {"Nice view", "nice VIEW", "Close to metro", "Big"};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ClassifiedRecord> in;
    const int n = std::uniform_int_distribution<int>(0, 30)(rng);
    for (int i = 0; i < n; ++i) {
      in.push_back(record(titles[rng() % 6], descs[rng() % 4],
                          std::uniform_int_distribution<std::int64_t>(0, 4)(rng),
                          std::uniform_int_distribution<std::int64_t>(1000, 400000)(rng)));
    }
    const auto once = clean(in, {}, {});
    const auto twice = clean(once, {}, {});
    CHECK(once.size() <= in.size());
    CHECK(once == twice);
    for (const auto& r : once) CHECK(within_price_bounds(r, {}, {}));
  }
}

}  // TEST_SUITE
