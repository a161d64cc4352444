#pragma once

namespace cgnls {

inline constexpr const char* kVersion = "0.1.0";

inline const char* compiler_id() {
#if defined(__clang__)
  return "clang " __clang_version__;
#elif defined(__GNUC__)
  return "gcc " __VERSION__;
#else
  return "unknown";
#endif
}

}  // namespace cgnls
