#pragma once

namespace semibayes {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace semibayes
