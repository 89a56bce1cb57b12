#include "promptpainter/core/field.hpp"

#include "promptpainter/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace promptpainter {

namespace {

void check_shape(const Field& f) {
    if (f.height < 8 || f.width < 8) {
        throw DomainError("ImageBuffer requires height and width >= 8, got " +
                          std::to_string(f.height) + "x" + std::to_string(f.width));
    }
    if (f.data.size() != static_cast<std::size_t>(f.height) * f.width * 3) {
        throw DomainError("ImageBuffer pixel count does not match its dimensions");
    }
}

} // namespace

ImageBuffer::ImageBuffer(Field f) : field_(std::move(f)) {
    check_shape(field_);
    for (double v : field_.data) {
        if (!(v >= 0.0 && v <= 1.0)) { // also rejects NaN
            throw DomainError("ImageBuffer values must lie in [0,1]");
        }
    }
}

ImageBuffer::ImageBuffer(int height, int width, int channels, const std::vector<double>& values) {
    if (channels != 3) {
        throw DomainError("ImageBuffer expects 3 channels, got " + std::to_string(channels));
    }
    Field f(height, width);
    if (values.size() != f.data.size()) {
        throw DomainError("ImageBuffer pixel count does not match its dimensions");
    }
    f.data = values;
    *this = ImageBuffer(std::move(f));
}

ImageBuffer ImageBuffer::clamped(Field f) {
    check_shape(f);
    for (double& v : f.data) {
        if (std::isnan(v)) {
            throw DomainError("ImageBuffer values must be finite");
        }
        v = std::clamp(v, 0.0, 1.0);
    }
    ImageBuffer img;
    img.field_ = std::move(f);
    return img;
}

} // namespace promptpainter
