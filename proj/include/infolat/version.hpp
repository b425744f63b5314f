#ifndef INFOLAT_VERSION_HPP
#define INFOLAT_VERSION_HPP

namespace infolat {

inline constexpr const char* version_string = "1.0.0";
inline constexpr int manifest_schema_version = 1;

} // namespace infolat

#endif
