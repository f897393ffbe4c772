#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace vsense {

// 64-bit FNV-1a; used for content ids in output documents.
inline std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fnv1a_hex(std::string_view bytes);

}  // namespace vsense
