#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace vsense {

/// Raw PGM payload, row-major, top row first. maxval <= 65535.
struct PgmImage {
    int width = 0;
    int height = 0;
    int maxval = 255;
    std::vector<std::uint16_t> samples;
};

/// Reads P2 (ascii) or P5 (binary, 1- or 2-byte big-endian samples).
/// Throws IoError on malformed header, truncated payload, or an
/// unsupported magic number.
PgmImage read_pgm(const std::filesystem::path& path);

/// Writes an 8-bit binary (P5) PGM.
void write_pgm8(const std::filesystem::path& path, int width, int height,
                const std::vector<std::uint8_t>& bytes);

}  // namespace vsense
