#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

// Compares `actual` with tests/golden/<name>. Setting FENC_UPDATE_GOLDEN=1
// rewrites the file instead; review the diff before committing it.
inline void check_snapshot(const std::string& name, const std::string& actual) {
  const std::string path = std::string(FENC_TEST_SOURCE_DIR) + "/golden/" + name;
  if (const char* update = std::getenv("FENC_UPDATE_GOLDEN"); update != nullptr && std::string(update) == "1") {
    std::ofstream(path, std::ios::binary) << actual;
    MESSAGE("updated " << path);
    return;
  }
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing snapshot " << path);
  std::ostringstream expected;
  expected << in.rdbuf();
  CHECK(actual == expected.str());
}

inline std::string test_data_path(const std::string& name) {
  return std::string(FENC_TEST_SOURCE_DIR) + "/data/" + name;
}
