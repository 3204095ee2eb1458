#ifndef CQSENSE_VERSION_HPP
#define CQSENSE_VERSION_HPP

namespace cqsense {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cqsense

#endif  // CQSENSE_VERSION_HPP
