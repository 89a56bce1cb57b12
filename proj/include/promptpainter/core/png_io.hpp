#pragma once

#include "promptpainter/core/field.hpp"

#include <string>

namespace promptpainter {

/// Load a PNG as an RGB image. Grayscale, palette and alpha variants are
/// expanded/stripped to 8-bit RGB; values map to [0,1] as value/255.
ImageBuffer load_png(const std::string& path);

/// Write an 8-bit RGB PNG (value = round(v * 255)). Deterministic output:
/// identical images produce identical bytes.
void save_png(const std::string& path, const ImageBuffer& img);

} // namespace promptpainter
