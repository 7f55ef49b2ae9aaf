#pragma once

// Analytic landscape synthesis from ground-truth shapes: D is the unsigned
// distance to the shape boundary (optionally blurred), beta is constant,
// kappa is constant inside the shape and zero outside. Lets the solver be
// exercised end-to-end without any learned landscape producer.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "activerays/geometry.hpp"
#include "activerays/landscape.hpp"
#include "activerays/raster.hpp"

namespace activerays {

namespace detail {

inline double point_segment_distance(const Point& p, const Point& a, const Point& b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0)
        t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
    const double ex = a.x + t * dx - p.x;
    const double ey = a.y + t * dy - p.y;
    return std::sqrt(ex * ex + ey * ey);
}

inline bool point_in_polygon_even_odd(const Point& p, const std::vector<Point>& v) {
    bool inside = false;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = v[i];
        const Point& b = v[(i + 1) % n];
        if ((a.y > p.y) != (b.y > p.y) &&
            p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x)
            inside = !inside;
    }
    return inside;
}

inline bool segments_intersect(const Point& p1, const Point& p2, const Point& q1,
                               const Point& q2) {
    auto cross = [](const Point& o, const Point& a, const Point& b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    const double d1 = cross(q1, q2, p1);
    const double d2 = cross(q1, q2, p2);
    const double d3 = cross(p1, p2, q1);
    const double d4 = cross(p1, p2, q2);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
           ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace detail

struct ShapeSpec {
    enum class Kind { disk, rectangle, rounded_rectangle, polygon };

    Kind kind = Kind::disk;
    int h = 0, w = 0;
    Point center;          // disk
    double radius = 0.0;   // disk
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // rectangle / rounded_rectangle
    double corner_radius = 0.0;             // rounded_rectangle
    std::vector<Point> vertices;            // polygon

    /// Unsigned Euclidean distance from a point to the shape boundary.
    double boundary_distance(const Point& p) const {
        switch (kind) {
            case Kind::disk: {
                const double d = std::hypot(p.x - center.x, p.y - center.y);
                return std::abs(d - radius);
            }
            case Kind::rectangle:
                return std::abs(box_sdf(p, 0.0));
            case Kind::rounded_rectangle:
                return std::abs(box_sdf(p, corner_radius));
            case Kind::polygon: {
                double best = std::numeric_limits<double>::infinity();
                const std::size_t n = vertices.size();
                for (std::size_t i = 0; i < n; ++i)
                    best = std::min(best, detail::point_segment_distance(
                                              p, vertices[i], vertices[(i + 1) % n]));
                return best;
            }
        }
        return 0.0;
    }

    bool inside(const Point& p) const {
        switch (kind) {
            case Kind::disk:
                return std::hypot(p.x - center.x, p.y - center.y) <= radius;
            case Kind::rectangle:
                return box_sdf(p, 0.0) <= 0.0;
            case Kind::rounded_rectangle:
                return box_sdf(p, corner_radius) <= 0.0;
            case Kind::polygon:
                return detail::point_in_polygon_even_odd(p, vertices);
        }
        return false;
    }

    void validate() const {
        if (h < 2 || w < 2)
            throw std::invalid_argument("ShapeSpec: image must be at least 2x2");
        switch (kind) {
            case Kind::disk:
                if (!(radius > 0.0))
                    throw std::invalid_argument("ShapeSpec: disk radius must be positive");
                break;
            case Kind::rounded_rectangle:
                if (corner_radius < 0.0 ||
                    corner_radius > 0.5 * std::min(x1 - x0, y1 - y0))
                    throw std::invalid_argument(
                        "ShapeSpec: corner radius out of range");
                [[fallthrough]];
            case Kind::rectangle:
                if (!(x1 > x0) || !(y1 > y0))
                    throw std::invalid_argument("ShapeSpec: rectangle has no area");
                break;
            case Kind::polygon: {
                if (vertices.size() < 3)
                    throw std::invalid_argument("ShapeSpec: polygon needs >= 3 vertices");
                double area2 = 0.0;
                const std::size_t n = vertices.size();
                for (std::size_t i = 0; i < n; ++i) {
                    const Point& a = vertices[i];
                    const Point& b = vertices[(i + 1) % n];
                    area2 += a.x * b.y - b.x * a.y;
                }
                if (std::abs(area2) < 1e-9)
                    throw std::invalid_argument("ShapeSpec: polygon has zero area");
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = i + 1; j < n; ++j) {
                        if (j == i + 1 || (i == 0 && j == n - 1)) continue;
                        if (detail::segments_intersect(vertices[i], vertices[(i + 1) % n],
                                                       vertices[j], vertices[(j + 1) % n]))
                            throw std::invalid_argument(
                                "ShapeSpec: polygon is self-intersecting");
                    }
                }
                break;
            }
        }
        // The shape must cover at least one pixel center of the image.
        bool hit = false;
        for (int r = 0; r < h && !hit; ++r)
            for (int c = 0; c < w && !hit; ++c)
                hit = inside(Point{c + 0.5, r + 0.5});
        if (!hit)
            throw std::invalid_argument("ShapeSpec: shape misses the image interior");
    }

private:
    double box_sdf(const Point& p, double r) const {
        const double bcx = 0.5 * (x0 + x1), bcy = 0.5 * (y0 + y1);
        const double hx = 0.5 * (x1 - x0) - r, hy = 0.5 * (y1 - y0) - r;
        const double qx = std::abs(p.x - bcx) - hx;
        const double qy = std::abs(p.y - bcy) - hy;
        const double ox = std::max(qx, 0.0), oy = std::max(qy, 0.0);
        return std::sqrt(ox * ox + oy * oy) + std::min(std::max(qx, qy), 0.0) - r;
    }
};

namespace detail {
inline void gaussian_blur_inplace(std::vector<double>& f, int h, int w,
                                  double sigma) {
    if (!(sigma > 0.0)) return;
    const int rad = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * rad + 1);
    double sum = 0.0;
    for (int i = -rad; i <= rad; ++i) {
        kernel[i + rad] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += kernel[i + rad];
    }
    for (double& k : kernel) k /= sum;

    std::vector<double> tmp(f.size());
    // horizontal pass, replicate borders
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int i = -rad; i <= rad; ++i) {
                const int cc = std::clamp(c + i, 0, w - 1);
                acc += kernel[i + rad] * f[static_cast<std::size_t>(r) * w + cc];
            }
            tmp[static_cast<std::size_t>(r) * w + c] = acc;
        }
    }
    // vertical pass
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int i = -rad; i <= rad; ++i) {
                const int rr = std::clamp(r + i, 0, h - 1);
                acc += kernel[i + rad] * tmp[static_cast<std::size_t>(rr) * w + c];
            }
            f[static_cast<std::size_t>(r) * w + c] = acc;
        }
    }
}
}  // namespace detail

/// D(p) = d_scale * dist(p, shape boundary), optionally Gaussian-blurred;
/// beta constant; kappa constant inside the shape, zero outside.
inline EnergyLandscape synth_landscape(const ShapeSpec& shape, double d_scale,
                                       double beta_const, double kappa_const,
                                       double blur_sigma) {
    if (!(d_scale > 0.0))
        throw std::invalid_argument("synth_landscape: d_scale must be positive");
    if (beta_const < 0.0 || kappa_const < 0.0 || blur_sigma < 0.0)
        throw std::invalid_argument("synth_landscape: negative parameter");
    shape.validate();

    const int h = shape.h, w = shape.w;
    const std::size_t n = static_cast<std::size_t>(h) * w;
    std::vector<double> d(n), beta(n, beta_const), kappa(n, 0.0);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const Point p{static_cast<double>(c), static_cast<double>(r)};
            const std::size_t i = static_cast<std::size_t>(r) * w + c;
            d[i] = d_scale * shape.boundary_distance(p);
            if (shape.inside(p)) kappa[i] = kappa_const;
        }
    }
    detail::gaussian_blur_inplace(d, h, w, blur_sigma);
    return EnergyLandscape(h, w, std::move(d), std::move(beta), std::move(kappa));
}

/// Pixel-center membership mask, matching the rasterizer's convention.
inline Mask gt_mask(const ShapeSpec& shape) {
    shape.validate();
    Mask mask(shape.h, shape.w);
    for (int r = 0; r < shape.h; ++r)
        for (int c = 0; c < shape.w; ++c)
            if (shape.inside(Point{c + 0.5, r + 0.5})) mask.set(r, c, true);
    return mask;
}

}  // namespace activerays
