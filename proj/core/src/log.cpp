#include "semibayes/log.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace semibayes::logging {

namespace {

Level parse_env() {
  const char* env = std::getenv("SEMIBAYES_LOG");
  if (env == nullptr) return Level::kError;
  if (std::strcmp(env, "debug") == 0) return Level::kDebug;
  if (std::strcmp(env, "info") == 0) return Level::kInfo;
  return Level::kError;
}

std::atomic<int>& level_storage() {
  static std::atomic<int> lv{static_cast<int>(parse_env())};
  return lv;
}

}  // namespace

Level level() { return static_cast<Level>(level_storage().load(std::memory_order_relaxed)); }

void set_level(Level lv) { level_storage().store(static_cast<int>(lv), std::memory_order_relaxed); }

void error(const std::string& msg) {
  std::fprintf(stderr, "[semibayes:error] %s\n", msg.c_str());
}

void info(const std::string& msg) {
  if (level() >= Level::kInfo) std::fprintf(stderr, "[semibayes:info] %s\n", msg.c_str());
}

void debug(const std::string& msg) {
  if (level() >= Level::kDebug) std::fprintf(stderr, "[semibayes:debug] %s\n", msg.c_str());
}

}  // namespace semibayes::logging
