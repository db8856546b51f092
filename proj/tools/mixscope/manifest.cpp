#include "mixscope/manifest.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include "mixscope/error.hpp"

namespace mixscope::cli {

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

void write_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const auto tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp);
  }
  fs::rename(tmp, target);
}

RunManifest::RunManifest(std::string subcommand) : subcommand_(std::move(subcommand)) {}

void RunManifest::add_input(const std::string& path) {
  inputs_.push_back({{"path", path}, {"sha256", sha256_file(path)}});
}

void RunManifest::add_output(const std::string& path, const std::string& contents) {
  outputs_.push_back({{"path", path}, {"sha256", sha256_hex(contents)}});
}

nlohmann::ordered_json RunManifest::to_json() const {
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_);
  return {{"subcommand", subcommand_},
          {"config", config_},
          {"inputs", inputs_},
          {"outputs", outputs_},
          {"wall_time_s", elapsed.count()}};
}

}  // namespace mixscope::cli
