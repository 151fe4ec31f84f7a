#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace peergraph {

inline constexpr std::string_view kVersion = "0.1.0";

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// Provenance record written next to every output as "<output>.manifest.json".
// Contains no timestamps, so identical runs produce identical manifests.
struct RunManifest {
  std::vector<std::string> command_line;
  std::vector<std::pair<std::string, std::string>> inputs;   // path, sha256
  std::vector<std::pair<std::string, std::string>> outputs;  // path, sha256
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::string version{kVersion};

  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);
  std::string to_json() const;
};

}  // namespace peergraph
