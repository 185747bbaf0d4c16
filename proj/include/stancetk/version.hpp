#ifndef STANCETK_VERSION_HPP
#define STANCETK_VERSION_HPP

namespace stancetk {

inline constexpr const char* kToolName = "stancetk";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace stancetk

#endif // STANCETK_VERSION_HPP
