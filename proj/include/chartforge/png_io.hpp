#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace chartforge {

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major RGB
};

/// 8-bit RGB PNG. Output is a pure function of the pixels.
std::vector<std::uint8_t> encode_png(int width, int height, std::span<const std::uint8_t> rgb);

/// Decodes any PNG libpng understands into 8-bit RGB. Throws Error on
/// corrupt input.
RgbImage decode_png(std::span<const std::uint8_t> png);

}  // namespace chartforge
