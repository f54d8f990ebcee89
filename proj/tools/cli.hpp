#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "classifieds/evaluation.hpp"
#include "classifieds/pipeline.hpp"
#include "classifieds/record.hpp"
#include "classifieds/regressor.hpp"
#include "classifieds/text.hpp"

namespace classifieds::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Bad flags or config file contents; maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a run depends on. The flat key names used by config files and
/// by --set are those produced by to_json.
struct RunConfig {
  std::vector<std::string> inputs;
  ListingCategory category;
  CleaningConfig cleaning;
  TextConfig text;
  std::string stopwords_file;  // empty = bundled list
  RegressorSpec stage1;
  TwoStageOptions two_stage;
  std::size_t folds = 10;
  std::uint64_t seed = 42;
  Spread spread = Spread::StdDev;
  std::size_t threads = 0;
  std::string out;
};

/// Applies one flat key. Throws UsageError for unknown keys or bad values.
void apply_setting(RunConfig& config, const std::string& key, const nlohmann::json& value);
/// A JSON object, or "key = value" lines with '#' comments.
void apply_config_text(RunConfig& config, std::string_view text);
void apply_config_file(RunConfig& config, const std::string& path);

nlohmann::json to_json(const RunConfig& config);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace classifieds::cli
