#!/usr/bin/env python3
"""Rasterizes the DejaVu faces into src/font_data.cpp.

The renderer only reads the generated file; rerun this script when the face
list or pixel sizes change:

    python3 tools/gen_font_data.py /usr/share/fonts/truetype/dejavu > src/font_data.cpp
"""
import sys
from pathlib import Path

from PIL import Image, ImageDraw, ImageFont

FACES = [
    ("sans", "DejaVuSans.ttf"),
    ("sans-bold", "DejaVuSans-Bold.ttf"),
    ("serif", "DejaVuSerif.ttf"),
    ("mono", "DejaVuSansMono.ttf"),
]
SIZES = [10, 12, 15]
FIRST, LAST = 32, 126


def rasterize(path, size):
    font = ImageFont.truetype(str(path), size)
    ascent, descent = font.getmetrics()
    glyphs, bitmap = [], []
    pad = size
    for code in range(FIRST, LAST + 1):
        ch = chr(code)
        canvas = Image.new("L", (size * 3, size * 3), 0)
        draw = ImageDraw.Draw(canvas)
        draw.text((pad, pad + ascent), ch, fill=255, font=font, anchor="ls")
        box = canvas.getbbox()
        advance = int(round(font.getlength(ch)))
        if box is None:
            glyphs.append((advance, 0, 0, 0, 0, len(bitmap)))
            continue
        left, top, right, bottom = box
        crop = canvas.crop(box)
        glyphs.append((advance, left - pad, top - (pad + ascent),
                       right - left, bottom - top, len(bitmap)))
        bitmap.extend(crop.tobytes())
    return ascent, descent, glyphs, bitmap


def main():
    root = Path(sys.argv[1] if len(sys.argv) > 1 else "/usr/share/fonts/truetype/dejavu")
    out = []
    out.append("// Generated by tools/gen_font_data.py. Do not edit.")
    out.append("// Glyph coverage rasterized from the DejaVu fonts (Bitstream Vera")
    out.append("// derived license, redistributable).")
    out.append('#include "chartforge/detail/font_data.hpp"')
    out.append("")
    out.append("namespace chartforge::detail {")
    out.append("namespace {")
    faces = []
    for name, file in FACES:
        for size in SIZES:
            ascent, descent, glyphs, bitmap = rasterize(root / file, size)
            ident = f"{name.replace('-', '_')}_{size}"
            out.append(f"constexpr GlyphData k_{ident}_glyphs[] = {{")
            for g in glyphs:
                out.append("    {%d, %d, %d, %d, %d, %d}," % g)
            out.append("};")
            out.append(f"constexpr unsigned char k_{ident}_bitmap[] = {{")
            for i in range(0, len(bitmap), 32):
                out.append("    " + ",".join(str(b) for b in bitmap[i:i + 32]) + ",")
            if not bitmap:
                out.append("    0,")
            out.append("};")
            faces.append((name, size, ascent, descent, ident))
    out.append("}  // namespace")
    out.append("")
    out.append("const FontFaceData kFontFaces[] = {")
    for name, size, ascent, descent, ident in faces:
        out.append(f'    {{"{name}", {size}, {ascent}, {descent}, k_{ident}_glyphs, k_{ident}_bitmap}},')
    out.append("};")
    out.append(f"const std::size_t kFontFaceCount = {len(faces)};")
    out.append("")
    out.append("}  // namespace chartforge::detail")
    print("\n".join(out))


if __name__ == "__main__":
    main()
