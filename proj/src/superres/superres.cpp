#include "promptpainter/superres/superres.hpp"

#include "promptpainter/core/errors.hpp"
#include "promptpainter/core/imageops.hpp"

namespace promptpainter {

LanczosUpscaler::LanczosUpscaler(int factor) : factor_(factor) {
    if (factor != 2 && factor != 4) {
        throw ConfigError("superres factor must be 2 or 4, got " + std::to_string(factor));
    }
}

ImageBuffer LanczosUpscaler::upscale(const ImageBuffer& img) const {
    Field out = imageops::lanczos_resize(img.field(), img.height() * factor_, img.width() * factor_);
    // Lanczos ringing can overshoot; clamp back into range.
    return ImageBuffer::clamped(std::move(out));
}

UpscalerPtr make_upscaler(const std::string& id, int factor) {
    if (id == "lanczos") {
        return std::make_shared<LanczosUpscaler>(factor);
    }
    throw ConfigError("unknown superres adapter: " + id);
}

} // namespace promptpainter
