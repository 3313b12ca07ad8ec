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

#include "manifest.hpp"

#include <array>
#include <fmt/format.h>
#include <fstream>
#include <openssl/evp.h>
#include <sstream>
#include <stdexcept>

namespace lcgode::cli {

std::string git_blob_sha1(const std::string& content) {
  const std::string header = fmt::format("blob {}", content.size());
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw std::runtime_error("sha1: cannot allocate digest context");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size() + 1) == 1 &&  // includes the NUL
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest.data(), &length) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("sha1: digest failed");
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string git_blob_sha1_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return git_blob_sha1(buffer.str());
}

Manifest::Manifest(std::string command, nlohmann::json config, std::uint64_t seed)
    : start_(std::chrono::steady_clock::now()),
      doc_{{"command", std::move(command)},
           {"config", std::move(config)},
           {"seed", seed},
           {"inputs", nlohmann::json::array()},
           {"outputs", nlohmann::json::array()},
           {"timings", nlohmann::json::object()}} {}

void Manifest::add_input(const std::filesystem::path& path) {
  doc_["inputs"].push_back({{"path", path.string()}, {"sha1", git_blob_sha1_file(path)}});
}

void Manifest::add_output(const std::filesystem::path& path) { doc_["outputs"].push_back(path.string()); }

void Manifest::add_timing(const std::string& name, double seconds) { doc_["timings"][name] = seconds; }

void Manifest::write(const std::filesystem::path& path) {
  doc_["timings"]["wall_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write manifest '{}'", path.string()));
  out << doc_.dump(2) << '\n';
  if (!out) throw std::runtime_error(fmt::format("failed writing manifest '{}'", path.string()));
}

}  // namespace lcgode::cli
