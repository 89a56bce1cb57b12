#pragma once

#include "promptpainter/core/field.hpp"

#include <array>

namespace promptpainter::imageops {

// Differentiable raster primitives. Each sampling op comes as a
// forward/adjoint pair: the ops are linear in the pixel values (sampling
// coordinates are fixed parameters, never differentiated), so the exact
// gradient of the forward map is its transpose. Adjoints are verified by
// the <Ax, y> == <x, A^T y> property test.
//
// Convention: half-pixel centers (src = (dst + 0.5) * in/out - 0.5) with
// edge-clamped taps. Resizing to the same size is the exact identity.

/// Bilinear resize to out_h x out_w.
Field resize_bilinear(const Field& in, int out_h, int out_w);

/// Adjoint of resize_bilinear: scatter a gradient at out_h x out_w back to in_h x in_w.
Field resize_bilinear_adjoint(const Field& grad_out, int in_h, int in_w);

/// Axis-aligned crop of size h x w with top-left corner (y0, x0).
Field crop(const Field& in, int y0, int x0, int h, int w);
Field crop_adjoint(const Field& grad_out, int y0, int x0, int in_h, int in_w);

/// Horizontal mirror. Self-adjoint.
Field hflip(const Field& in);

/// Source quad for a perspective warp, corner order TL, TR, BR, BL in
/// pixel coordinates of the input image.
struct Quad {
    std::array<double, 4> x;
    std::array<double, 4> y;
};

/// Perspective warp: output pixel (r, c) samples the input at the position
/// the projective map sends the output corner rectangle onto `src`.
/// Output has the same size as the input; out-of-range samples edge-clamp.
Field perspective_warp(const Field& in, const Quad& src);
Field perspective_warp_adjoint(const Field& grad_out, const Quad& src, int in_h, int in_w);

/// Average pooling with a square stride x stride window; dims must divide.
Field avgpool(const Field& in, int stride);
Field avgpool_adjoint(const Field& grad_out, int stride, int in_h, int in_w);

/// Lanczos-3 resampling (separable, weights renormalized). Forward only;
/// used by the super-resolution baseline outside any gradient path.
Field lanczos_resize(const Field& in, int out_h, int out_w);

} // namespace promptpainter::imageops
