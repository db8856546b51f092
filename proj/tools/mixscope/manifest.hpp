#pragma once

#include <chrono>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mixscope::cli {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

/// Writes `contents` to a sibling temp file and renames it over `path`.
void write_atomic(const std::string& path, const std::string& contents);

class RunManifest {
 public:
  explicit RunManifest(std::string subcommand);

  nlohmann::ordered_json& config() { return config_; }
  void add_input(const std::string& path);
  void add_output(const std::string& path, const std::string& contents);
  nlohmann::ordered_json to_json() const;

 private:
  std::string subcommand_;
  nlohmann::ordered_json config_ = nlohmann::ordered_json::object();
  nlohmann::ordered_json inputs_ = nlohmann::ordered_json::array();
  nlohmann::ordered_json outputs_ = nlohmann::ordered_json::array();
  std::chrono::steady_clock::time_point started_ = std::chrono::steady_clock::now();
};

}  // namespace mixscope::cli
