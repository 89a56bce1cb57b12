#pragma once

#include <cstddef>
#include <vector>

namespace promptpainter {

/// Dense H x W x 3 grid of doubles with no range constraint. Used for raw
/// pixel data, noise fields and pixel-space gradients alike.
struct Field {
    int height = 0;
    int width = 0;
    std::vector<double> data; // row-major, 3 channels interleaved

    Field() = default;
    Field(int h, int w) : height(h), width(w), data(static_cast<std::size_t>(h) * w * 3, 0.0) {}

    static Field zeros(int h, int w) { return Field(h, w); }

    double& at(int y, int x, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    double at(int y, int x, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }

    std::size_t size() const { return data.size(); }

    bool same_shape(const Field& other) const {
        return height == other.height && width == other.width;
    }
};

/// RGB raster with every value in [0, 1] and both dimensions >= 8.
/// Construction validates; use `clamped` when values may carry float dust.
class ImageBuffer {
public:
    ImageBuffer() = default;

    /// Validating constructor: throws DomainError on range or shape violations.
    explicit ImageBuffer(Field f);

    /// From a raw interleaved buffer; `channels` must be 3.
    ImageBuffer(int height, int width, int channels, const std::vector<double>& values);

    /// Clamp values into [0, 1], then validate shape.
    static ImageBuffer clamped(Field f);

    int height() const { return field_.height; }
    int width() const { return field_.width; }

    double at(int y, int x, int c) const { return field_.at(y, x, c); }

    const Field& field() const { return field_; }

    bool operator==(const ImageBuffer& other) const {
        return field_.height == other.field_.height && field_.width == other.field_.width &&
               field_.data == other.field_.data;
    }

private:
    Field field_;
};

} // namespace promptpainter
