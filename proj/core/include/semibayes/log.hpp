#pragma once

#include <string>

namespace semibayes::logging {

enum class Level { kError = 0, kInfo = 1, kDebug = 2 };

// Level comes from SEMIBAYES_LOG={error,info,debug}; default error.
Level level();
void set_level(Level lv);

void error(const std::string& msg);
void info(const std::string& msg);
void debug(const std::string& msg);

inline bool debug_enabled() { return level() >= Level::kDebug; }

}  // namespace semibayes::logging
