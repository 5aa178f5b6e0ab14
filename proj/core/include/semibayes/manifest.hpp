#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace semibayes {

// Provenance record written atomically next to every command's outputs.
struct RunManifest {
  std::string command;
  std::string config_json;  // snapshot of the parsed configs
  std::uint64_t seed = 0;
  std::string version;
  std::map<std::string, std::string> input_digests;  // path -> sha256
  std::vector<std::string> outputs;
  double wall_time_s = 0.0;

  void add_input(const std::string& path);  // hashes the file

  // Serializes and writes <dir>/manifest.json via a temp file + rename.
  void write_atomic(const std::string& dir) const;

  std::string to_json_string() const;
};

// Atomic write helper (temp file in the same directory, then rename).
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace semibayes
