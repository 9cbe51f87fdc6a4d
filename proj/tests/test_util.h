/*
 * Copyright 2026 The CAPCE Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CAPCE_TESTS_TEST_UTIL_H_
#define CAPCE_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "capce/error.h"

namespace capce::testing {

// A fresh directory per test, removed on destruction.
class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = std::filesystem::temp_directory_path() /
            ("capce_" + std::string(info->test_suite_name()) + "_" + info->name());
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string File(const std::string& name) const { return (path_ / name).string(); }
  std::string path() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

inline void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace capce::testing

#define EXPECT_CAPCE_ERROR(stmt, expected)                              \
  do {                                                                  \
    try {                                                               \
      stmt;                                                             \
      ADD_FAILURE() << "expected " #expected;                           \
    } catch (const ::capce::Error& e) {                                 \
      EXPECT_EQ(e.code(), ::capce::ErrorCode::expected) << e.what();    \
    }                                                                   \
  } while (0)

#endif  // CAPCE_TESTS_TEST_UTIL_H_
