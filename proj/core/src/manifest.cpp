#include "semibayes/manifest.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "semibayes/common.hpp"
#include "semibayes/sha256.hpp"
#include "semibayes/version.hpp"

namespace semibayes {

void RunManifest::add_input(const std::string& path) {
  input_digests[path] = sha256_file_hex(path);
}

std::string RunManifest::to_json_string() const {
  nlohmann::json j;
  j["command"] = command;
  j["version"] = version.empty() ? kVersion : version;
  j["seed"] = seed;
  j["config"] = config_json.empty() ? nlohmann::json::object() : nlohmann::json::parse(config_json);
  j["inputs"] = input_digests;
  j["outputs"] = outputs;
  j["wall_time_s"] = wall_time_s;
  return j.dump(2);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw invalid_input("cannot write " + tmp);
    out << content;
    if (!out) throw invalid_input("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw invalid_input("rename failed for " + path + ": " + ec.message());
}

void RunManifest::write_atomic(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir + "/manifest.json", to_json_string() + "\n");
}

}  // namespace semibayes
