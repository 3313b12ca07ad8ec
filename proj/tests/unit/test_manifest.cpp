// Copyright 2026 The lcgode Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "manifest.hpp"

TEST_CASE("git blob sha1 matches git hash-object") {
  CHECK(lcgode::cli::git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  CHECK(lcgode::cli::git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("file hashing agrees with in-memory hashing") {
  const auto path = std::filesystem::temp_directory_path() / "lcgode_manifest_test.txt";
  {
    std::ofstream out(path, std::ios::binary);
    out << "a\nb\n";
  }
  CHECK(lcgode::cli::git_blob_sha1_file(path) == lcgode::cli::git_blob_sha1("a\nb\n"));
  std::filesystem::remove(path);
}
