#include "promptpainter/generator/generator.hpp"

#include "promptpainter/core/errors.hpp"
#include "promptpainter/core/imageops.hpp"

#include <string>

namespace promptpainter {

LatentTensor latent_transfer(const Generator& gen, const LatentTensor& t, int new_resolution) {
    if (new_resolution <= t.resolution_tag) {
        throw DomainError("latent_transfer only upscales: requested " +
                          std::to_string(new_resolution) + " from " +
                          std::to_string(t.resolution_tag));
    }
    const ImageBuffer decoded = gen.decode(t);
    Field resized = imageops::resize_bilinear(decoded.field(), new_resolution, new_resolution);
    return gen.encode(ImageBuffer::clamped(std::move(resized)));
}

} // namespace promptpainter
