#pragma once

#include <filesystem>

#include "mode/image.hpp"

namespace mode {

// Grayscale Portable Float Map ("Pf"), scale line -1.0 (little endian),
// rows stored bottom-to-top. Payload bytes are copied verbatim, so a
// write/read round trip is bit-exact for every 32-bit float value.
void pfm_write(const FloatMap& map, const std::filesystem::path& path);
FloatMap pfm_read(const std::filesystem::path& path);

// 8- or 16-bit gray/RGB PNG. Values map linearly between [0,1] and the
// integer range; no gamma handling.
void png_write(const PanoImage& image, const std::filesystem::path& path,
               int bit_depth = 8);
PanoImage png_read(const std::filesystem::path& path);

// Masks ride as 8-bit gray PNGs: 255 = valid, 0 = invalid.
void mask_write(const ValidityMask& mask, const std::filesystem::path& path);
ValidityMask mask_read(const std::filesystem::path& path);

}  // namespace mode
