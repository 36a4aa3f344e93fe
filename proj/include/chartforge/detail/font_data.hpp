#pragma once

#include <cstddef>
#include <cstdint>

namespace chartforge::detail {

// One rasterized glyph. Offsets are relative to the pen position on the
// baseline; coverage is stored row-major, 8 bits per pixel.
struct GlyphData {
    std::int16_t advance;
    std::int16_t x_off;
    std::int16_t y_off;
    std::uint8_t width;
    std::uint8_t height;
    std::uint32_t offset;
};

struct FontFaceData {
    const char* name;
    int pixel_size;
    int ascent;
    int descent;
    const GlyphData* glyphs;  // printable ASCII, 32..126
    const unsigned char* bitmap;
};

extern const FontFaceData kFontFaces[];
extern const std::size_t kFontFaceCount;

}  // namespace chartforge::detail
