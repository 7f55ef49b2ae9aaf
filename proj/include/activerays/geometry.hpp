#pragma once

// Polar (active-rays) contour representation: a reference point plus L radii
// at uniformly spaced angles. Star-shaped contours only.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace activerays {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Contour discretized as L rays from a center. Vertex i sits at angle
/// i * (2*pi/L) from the positive x-axis, counter-clockwise.
class PolarContour {
public:
    PolarContour(Point center, std::vector<double> radii, double rho_max)
        : center_(center), radii_(std::move(radii)), rho_max_(rho_max) {
        if (radii_.size() < 4)
            throw std::invalid_argument("PolarContour: need at least 4 vertices");
        if (!(rho_max_ > 0.0))
            throw std::invalid_argument("PolarContour: rho_max must be positive");
        for (double r : radii_) {
            if (!(r > 0.0) || r > rho_max_)
                throw std::invalid_argument(
                    "PolarContour: radii must lie in (0, rho_max]");
        }
    }

    const Point& center() const { return center_; }
    const std::vector<double>& radii() const { return radii_; }
    std::size_t vertex_count() const { return radii_.size(); }
    double rho_max() const { return rho_max_; }

    // delta_theta is derived, never stored.
    double delta_theta() const {
        return 2.0 * std::numbers::pi / static_cast<double>(radii_.size());
    }

    double angle(std::size_t i) const {
        return static_cast<double>(i) * delta_theta();
    }

    /// Replaces the radii, revalidating the (0, rho_max] invariant.
    void set_radii(std::vector<double> radii) {
        if (radii.size() != radii_.size())
            throw std::invalid_argument("set_radii: vertex count mismatch");
        for (double r : radii) {
            if (!(r > 0.0) || r > rho_max_)
                throw std::invalid_argument("set_radii: radius out of (0, rho_max]");
        }
        radii_ = std::move(radii);
    }

private:
    Point center_;
    std::vector<double> radii_;
    double rho_max_;
};

/// Cartesian vertices of the contour, index order preserved.
inline std::vector<Point> to_cartesian(const PolarContour& c) {
    const std::size_t n = c.vertex_count();
    std::vector<Point> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double th = c.angle(i);
        pts[i].x = c.center().x + c.radii()[i] * std::cos(th);
        pts[i].y = c.center().y + c.radii()[i] * std::sin(th);
    }
    return pts;
}

inline PolarContour init_circle(Point center, double radius, std::size_t L,
                                double rho_max) {
    if (!(radius > 0.0) || radius > rho_max)
        throw std::invalid_argument("init_circle: radius must lie in (0, rho_max]");
    return PolarContour(center, std::vector<double>(L, radius), rho_max);
}

/// Resamples to new_L vertices by periodic linear interpolation of the radii
/// in angle. Passes through the original knots when angles coincide.
inline PolarContour resample(const PolarContour& c, std::size_t new_L) {
    if (new_L < 4)
        throw std::invalid_argument("resample: new vertex count must be >= 4");
    const std::size_t L = c.vertex_count();
    if (new_L == L) return c;

    std::vector<double> out(new_L);
    for (std::size_t k = 0; k < new_L; ++k) {
        // Position of the new angle in units of the old angular step.
        const double t = static_cast<double>(k) * static_cast<double>(L) /
                         static_cast<double>(new_L);
        const std::size_t i0 = static_cast<std::size_t>(t) % L;
        const std::size_t i1 = (i0 + 1) % L;
        const double f = t - std::floor(t);
        out[k] = (1.0 - f) * c.radii()[i0] + f * c.radii()[i1];
    }
    return PolarContour(c.center(), std::move(out), c.rho_max());
}

/// Writes Cartesian vertices as `x,y` lines, full round-trip precision.
inline void write_contour_csv(const std::string& path,
                              const std::vector<Point>& pts) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "x,y\n";
    char buf[64];
    for (const Point& p : pts) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", p.x, p.y);
        out << buf;
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

/// Reads `x,y` lines; an optional leading `x,y` header is skipped.
inline std::vector<Point> read_contour_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::vector<Point> pts;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line == "x,y") continue;
        }
        std::istringstream ss(line);
        Point p;
        char comma = 0;
        if (!(ss >> p.x >> comma >> p.y) || comma != ',')
            throw std::runtime_error("malformed contour CSV line: " + line);
        pts.push_back(p);
    }
    return pts;
}

}  // namespace activerays
