#ifndef NETOBS_VERSION_HPP
#define NETOBS_VERSION_HPP

namespace netobs {

inline constexpr const char* kVersion = "1.0.0";

} // namespace netobs

#endif
