#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "classifieds/record.hpp"

namespace testing_helpers {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(CLASSIFIEDS_TEST_DATA) / name;
}

// Fresh scratch directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() /
           ("classifieds_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

inline classifieds::ClassifiedRecord record(std::string title, std::string description,
                                            std::int64_t beds, std::int64_t price,
                                            std::string location = "Al Barsha",
                                            std::int64_t baths = 1, std::int64_t size = 800) {
  return {std::move(title), std::move(description), beds, baths, size, std::move(location), price};
}

}  // namespace testing_helpers
