#include "doctest.h"

#include "classifieds/error.hpp"
#include "classifieds/structured.hpp"
#include "helpers.hpp"

using namespace classifieds;
using testing_helpers::record;

TEST_SUITE("structured") {

TEST_CASE("location column names") {
  CHECK(location_column_name("Dubai Marina") == "loc_dubai_marina");
  CHECK(location_column_name("Jumeirah Lake Towers (JLT)") == "loc_jumeirah_lake_towers_jlt");
}

TEST_CASE("one-hot layout and unseen locations") {
  const std::vector<ClassifiedRecord> train = {
      record("a", "b", 2, 1, "Dubai Marina", 2, 1200), record("a", "b", 1, 1, "Al Barsha", 1, 700),
      record("a", "b", 3, 1, "Dubai Marina", 3, 1800)};
  const auto enc = fit_location_encoder(train);
  CHECK(enc.locations() == std::vector<std::string>{"Dubai Marina", "Al Barsha"});
  const auto x = encode_structured(train, enc);
  CHECK(x.column_names() ==
        std::vector<std::string>{"beds", "baths", "size", "loc_dubai_marina", "loc_al_barsha"});
  CHECK(x(0, 0) == 2);
  CHECK(x(0, 2) == 1200);
  CHECK(x(0, 3) == 1);
  CHECK(x(0, 4) == 0);
  CHECK(x(1, 4) == 1);
  for (std::size_t r = 0; r < x.rows(); ++r) CHECK(x(r, 3) + x(r, 4) == 1);

  const std::vector<ClassifiedRecord> unseen = {record("a", "b", 1, 1, "Palm Jumeirah")};
  const auto y = encode_structured(unseen, enc);
  CHECK(y.cols() == 5);
  CHECK(y(0, 3) == 0);
  CHECK(y(0, 4) == 0);
  CHECK_THROWS_AS(fit_location_encoder(std::vector<ClassifiedRecord>{}), Error);
}

TEST_CASE("labels that normalise to the same column share it") {
  const LocationEncoder enc({"Dubai Marina", "dubai marina!"});
  CHECK(enc.column_names().size() == 1);
  CHECK(enc.column_of("Dubai Marina") == enc.column_of("dubai marina!"));
}

TEST_CASE("feature matrix helpers") {
  Eigen::MatrixXd v(3, 2);
  v << 1, 2, 3, 4, 5, 6;
  const FeatureMatrix m({"x", "y"}, v);
  CHECK(m.column_index("y") == 1);
  CHECK(m.column_index("z") == 2);
  CHECK(m.select_rows({2, 0})(0, 1) == 6);
  CHECK(m.select_columns({1}).column_names() == std::vector<std::string>{"y"});
  CHECK_THROWS_AS(FeatureMatrix({"x"}, v), Error);
  Eigen::MatrixXd bad = v;
  bad(1, 1) = std::nan("");
  CHECK_THROWS_AS(FeatureMatrix({"x", "y"}, bad).check_finite(), Error);
}

}  // TEST_SUITE
