#include "promptpainter/core/imageops.hpp"

#include "promptpainter/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace promptpainter::imageops {

namespace {

struct Taps {
    int i0, i1;   // clamped neighbor indices
    double w0, w1;
};

// Half-pixel source position for output index `o`, with 2-tap bilinear weights.
Taps axis_taps(int o, int in_n, int out_n) {
    const double s = (o + 0.5) * static_cast<double>(in_n) / out_n - 0.5;
    const double fl = std::floor(s);
    const double f = s - fl;
    int i0 = static_cast<int>(fl);
    int i1 = i0 + 1;
    i0 = std::clamp(i0, 0, in_n - 1);
    i1 = std::clamp(i1, 0, in_n - 1);
    return {i0, i1, 1.0 - f, f};
}

void require_positive(int h, int w, const char* op) {
    if (h < 1 || w < 1) {
        throw DomainError(std::string(op) + ": target dimensions must be positive");
    }
}

// 3x3 projective matrix mapping the unit square onto a quad (corner order
// TL, TR, BR, BL). Classic square-to-quad construction.
struct Homography {
    double a, b, c, d, e, f, g, h;

    static Homography square_to_quad(const Quad& q) {
        const double x0 = q.x[0], x1 = q.x[1], x2 = q.x[2], x3 = q.x[3];
        const double y0 = q.y[0], y1 = q.y[1], y2 = q.y[2], y3 = q.y[3];
        const double sx = x0 - x1 + x2 - x3;
        const double sy = y0 - y1 + y2 - y3;
        Homography m{};
        if (sx == 0.0 && sy == 0.0) {
            // Affine case.
            m.a = x1 - x0; m.b = x3 - x0; m.c = x0;
            m.d = y1 - y0; m.e = y3 - y0; m.f = y0;
            m.g = 0.0;     m.h = 0.0;
            return m;
        }
        const double dx1 = x1 - x2, dx2 = x3 - x2;
        const double dy1 = y1 - y2, dy2 = y3 - y2;
        const double den = dx1 * dy2 - dx2 * dy1;
        if (den == 0.0) {
            throw DomainError("perspective_warp: degenerate source quad");
        }
        m.g = (sx * dy2 - dx2 * sy) / den;
        m.h = (dx1 * sy - sx * dy1) / den;
        m.a = x1 - x0 + m.g * x1;
        m.b = x3 - x0 + m.h * x3;
        m.c = x0;
        m.d = y1 - y0 + m.g * y1;
        m.e = y3 - y0 + m.h * y3;
        m.f = y0;
        return m;
    }

    // (u, v) in [0,1]^2 -> source pixel coordinates.
    void map(double u, double v, double& sx, double& sy) const {
        const double w = g * u + h * v + 1.0;
        sx = (a * u + b * v + c) / w;
        sy = (d * u + e * v + f) / w;
    }
};

double lanczos3(double x) {
    x = std::fabs(x);
    if (x >= 3.0) {
        return 0.0;
    }
    if (x < 1e-12) {
        return 1.0;
    }
    const double px = std::numbers::pi * x;
    return 3.0 * std::sin(px) * std::sin(px / 3.0) / (px * px);
}

// One separable Lanczos pass along the given axis.
Field lanczos_axis(const Field& in, int out_n, bool vertical) {
    const int in_n = vertical ? in.height : in.width;
    const int other = vertical ? in.width : in.height;
    Field out = vertical ? Field(out_n, in.width) : Field(in.height, out_n);

    const double scale = static_cast<double>(in_n) / out_n;
    // Widen the kernel when minifying.
    const double support = 3.0 * std::max(scale, 1.0);

    std::vector<int> idx;
    std::vector<double> wts;
    for (int o = 0; o < out_n; ++o) {
        const double center = (o + 0.5) * scale - 0.5;
        const int lo = static_cast<int>(std::ceil(center - support));
        const int hi = static_cast<int>(std::floor(center + support));
        idx.clear();
        wts.clear();
        double wsum = 0.0;
        for (int i = lo; i <= hi; ++i) {
            const double w = lanczos3((i - center) / std::max(scale, 1.0));
            if (w == 0.0) {
                continue;
            }
            idx.push_back(std::clamp(i, 0, in_n - 1));
            wts.push_back(w);
            wsum += w;
        }
        for (double& w : wts) {
            w /= wsum;
        }
        for (int j = 0; j < other; ++j) {
            for (int ch = 0; ch < 3; ++ch) {
                double acc = 0.0;
                for (std::size_t k = 0; k < idx.size(); ++k) {
                    acc += wts[k] * (vertical ? in.at(idx[k], j, ch) : in.at(j, idx[k], ch));
                }
                if (vertical) {
                    out.at(o, j, ch) = acc;
                } else {
                    out.at(j, o, ch) = acc;
                }
            }
        }
    }
    return out;
}

} // namespace

Field resize_bilinear(const Field& in, int out_h, int out_w) {
    require_positive(out_h, out_w, "resize_bilinear");
    if (out_h == in.height && out_w == in.width) {
        return in;
    }
    Field out(out_h, out_w);
    for (int y = 0; y < out_h; ++y) {
        const Taps ty = axis_taps(y, in.height, out_h);
        for (int x = 0; x < out_w; ++x) {
            const Taps tx = axis_taps(x, in.width, out_w);
            for (int c = 0; c < 3; ++c) {
                out.at(y, x, c) = ty.w0 * (tx.w0 * in.at(ty.i0, tx.i0, c) + tx.w1 * in.at(ty.i0, tx.i1, c)) +
                                  ty.w1 * (tx.w0 * in.at(ty.i1, tx.i0, c) + tx.w1 * in.at(ty.i1, tx.i1, c));
            }
        }
    }
    return out;
}

Field resize_bilinear_adjoint(const Field& grad_out, int in_h, int in_w) {
    require_positive(in_h, in_w, "resize_bilinear_adjoint");
    if (grad_out.height == in_h && grad_out.width == in_w) {
        return grad_out;
    }
    Field grad_in(in_h, in_w);
    for (int y = 0; y < grad_out.height; ++y) {
        const Taps ty = axis_taps(y, in_h, grad_out.height);
        for (int x = 0; x < grad_out.width; ++x) {
            const Taps tx = axis_taps(x, in_w, grad_out.width);
            for (int c = 0; c < 3; ++c) {
                const double g = grad_out.at(y, x, c);
                grad_in.at(ty.i0, tx.i0, c) += ty.w0 * tx.w0 * g;
                grad_in.at(ty.i0, tx.i1, c) += ty.w0 * tx.w1 * g;
                grad_in.at(ty.i1, tx.i0, c) += ty.w1 * tx.w0 * g;
                grad_in.at(ty.i1, tx.i1, c) += ty.w1 * tx.w1 * g;
            }
        }
    }
    return grad_in;
}

Field crop(const Field& in, int y0, int x0, int h, int w) {
    if (y0 < 0 || x0 < 0 || y0 + h > in.height || x0 + w > in.width) {
        throw DomainError("crop: window outside image bounds");
    }
    if (y0 == 0 && x0 == 0 && h == in.height && w == in.width) {
        return in;
    }
    Field out(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                out.at(y, x, c) = in.at(y0 + y, x0 + x, c);
            }
        }
    }
    return out;
}

Field crop_adjoint(const Field& grad_out, int y0, int x0, int in_h, int in_w) {
    if (y0 == 0 && x0 == 0 && grad_out.height == in_h && grad_out.width == in_w) {
        return grad_out;
    }
    Field grad_in(in_h, in_w);
    for (int y = 0; y < grad_out.height; ++y) {
        for (int x = 0; x < grad_out.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                grad_in.at(y0 + y, x0 + x, c) = grad_out.at(y, x, c);
            }
        }
    }
    return grad_in;
}

Field hflip(const Field& in) {
    Field out(in.height, in.width);
    for (int y = 0; y < in.height; ++y) {
        for (int x = 0; x < in.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                out.at(y, x, c) = in.at(y, in.width - 1 - x, c);
            }
        }
    }
    return out;
}

Field perspective_warp(const Field& in, const Quad& src) {
    const Homography m = Homography::square_to_quad(src);
    Field out(in.height, in.width);
    const double du = in.width > 1 ? 1.0 / (in.width - 1) : 0.0;
    const double dv = in.height > 1 ? 1.0 / (in.height - 1) : 0.0;
    for (int y = 0; y < in.height; ++y) {
        for (int x = 0; x < in.width; ++x) {
            double sx, sy;
            m.map(x * du, y * dv, sx, sy);
            // Edge-clamped bilinear sample.
            sx = std::clamp(sx, 0.0, static_cast<double>(in.width - 1));
            sy = std::clamp(sy, 0.0, static_cast<double>(in.height - 1));
            const int x0 = std::min(static_cast<int>(std::floor(sx)), in.width - 1);
            const int y0 = std::min(static_cast<int>(std::floor(sy)), in.height - 1);
            const int x1 = std::min(x0 + 1, in.width - 1);
            const int y1 = std::min(y0 + 1, in.height - 1);
            const double fx = sx - x0;
            const double fy = sy - y0;
            for (int c = 0; c < 3; ++c) {
                out.at(y, x, c) = (1 - fy) * ((1 - fx) * in.at(y0, x0, c) + fx * in.at(y0, x1, c)) +
                                  fy * ((1 - fx) * in.at(y1, x0, c) + fx * in.at(y1, x1, c));
            }
        }
    }
    return out;
}

Field perspective_warp_adjoint(const Field& grad_out, const Quad& src, int in_h, int in_w) {
    const Homography m = Homography::square_to_quad(src);
    Field grad_in(in_h, in_w);
    const double du = in_w > 1 ? 1.0 / (in_w - 1) : 0.0;
    const double dv = in_h > 1 ? 1.0 / (in_h - 1) : 0.0;
    for (int y = 0; y < grad_out.height; ++y) {
        for (int x = 0; x < grad_out.width; ++x) {
            double sx, sy;
            m.map(x * du, y * dv, sx, sy);
            sx = std::clamp(sx, 0.0, static_cast<double>(in_w - 1));
            sy = std::clamp(sy, 0.0, static_cast<double>(in_h - 1));
            const int x0 = std::min(static_cast<int>(std::floor(sx)), in_w - 1);
            const int y0 = std::min(static_cast<int>(std::floor(sy)), in_h - 1);
            const int x1 = std::min(x0 + 1, in_w - 1);
            const int y1 = std::min(y0 + 1, in_h - 1);
            const double fx = sx - x0;
            const double fy = sy - y0;
            for (int c = 0; c < 3; ++c) {
                const double g = grad_out.at(y, x, c);
                grad_in.at(y0, x0, c) += (1 - fy) * (1 - fx) * g;
                grad_in.at(y0, x1, c) += (1 - fy) * fx * g;
                grad_in.at(y1, x0, c) += fy * (1 - fx) * g;
                grad_in.at(y1, x1, c) += fy * fx * g;
            }
        }
    }
    return grad_in;
}

Field avgpool(const Field& in, int stride) {
    if (stride < 1 || in.height % stride != 0 || in.width % stride != 0) {
        throw DomainError("avgpool: dimensions must be divisible by stride " + std::to_string(stride));
    }
    const int oh = in.height / stride;
    const int ow = in.width / stride;
    const double inv = 1.0 / (stride * stride);
    Field out(oh, ow);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int dy = 0; dy < stride; ++dy) {
                    for (int dx = 0; dx < stride; ++dx) {
                        acc += in.at(y * stride + dy, x * stride + dx, c);
                    }
                }
                out.at(y, x, c) = acc * inv;
            }
        }
    }
    return out;
}

Field avgpool_adjoint(const Field& grad_out, int stride, int in_h, int in_w) {
    Field grad_in(in_h, in_w);
    const double inv = 1.0 / (stride * stride);
    for (int y = 0; y < grad_out.height; ++y) {
        for (int x = 0; x < grad_out.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                const double g = grad_out.at(y, x, c) * inv;
                for (int dy = 0; dy < stride; ++dy) {
                    for (int dx = 0; dx < stride; ++dx) {
                        grad_in.at(y * stride + dy, x * stride + dx, c) = g;
                    }
                }
            }
        }
    }
    return grad_in;
}

Field lanczos_resize(const Field& in, int out_h, int out_w) {
    require_positive(out_h, out_w, "lanczos_resize");
    Field tmp = lanczos_axis(in, out_h, /*vertical=*/true);
    return lanczos_axis(tmp, out_w, /*vertical=*/false);
}

} // namespace promptpainter::imageops
