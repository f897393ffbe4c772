#include "vsense/fnv.hpp"

#include <cstdio>

namespace vsense {

std::string fnv1a_hex(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(bytes)));
    return std::string(buf);
}

}  // namespace vsense
