#pragma once

// Energy landscapes: the three non-negative maps D (data), beta (curvature
// weight), kappa (balloon weight) over an HxW grid, sub-pixel sampling, and
// the energy functional evaluated on a polar contour.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "activerays/geometry.hpp"

namespace activerays {

/// Bilinear interpolation of a row-major HxW field at a sub-pixel point.
/// Coordinates outside [0,W-1]x[0,H-1] are clamped to the border first.
inline double sample_bilinear(const std::vector<double>& field, int h, int w,
                              double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(w - 1));
    y = std::clamp(y, 0.0, static_cast<double>(h - 1));
    const int x0 = std::min(static_cast<int>(x), w - 2 >= 0 ? w - 2 : 0);
    const int y0 = std::min(static_cast<int>(y), h - 2 >= 0 ? h - 2 : 0);
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double v00 = field[static_cast<std::size_t>(y0) * w + x0];
    const double v10 = field[static_cast<std::size_t>(y0) * w + x1];
    const double v01 = field[static_cast<std::size_t>(y1) * w + x0];
    const double v11 = field[static_cast<std::size_t>(y1) * w + x1];
    return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) +
           fy * ((1.0 - fx) * v01 + fx * v11);
}

struct EnergyBreakdown {
    double data = 0.0;
    double curve = 0.0;
    double balloon = 0.0;
    double total() const { return data + curve + balloon; }
};

/// Immutable after construction. Gradient planes of D are precomputed central
/// differences (one-sided at borders) and are never read from disk.
class EnergyLandscape {
public:
    EnergyLandscape(int h, int w, std::vector<double> d, std::vector<double> beta,
                    std::vector<double> kappa)
        : h_(h), w_(w), d_(std::move(d)), beta_(std::move(beta)),
          kappa_(std::move(kappa)) {
        if (h_ < 2 || w_ < 2)
            throw std::invalid_argument("EnergyLandscape: grid must be >= 2x2");
        const std::size_t n = static_cast<std::size_t>(h_) * w_;
        if (d_.size() != n || beta_.size() != n || kappa_.size() != n)
            throw std::invalid_argument("EnergyLandscape: plane size mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            if (!(d_[i] >= 0.0) || !(beta_[i] >= 0.0) || !(kappa_[i] >= 0.0))
                throw std::invalid_argument(
                    "EnergyLandscape: maps must be non-negative and finite");
        }
        compute_gradients();
    }

    int height() const { return h_; }
    int width() const { return w_; }
    const std::vector<double>& d() const { return d_; }
    const std::vector<double>& beta() const { return beta_; }
    const std::vector<double>& kappa() const { return kappa_; }
    const std::vector<double>& grad_d_x() const { return gdx_; }
    const std::vector<double>& grad_d_y() const { return gdy_; }

    double sample_d(double x, double y) const { return sample_bilinear(d_, h_, w_, x, y); }
    double sample_beta(double x, double y) const { return sample_bilinear(beta_, h_, w_, x, y); }
    double sample_kappa(double x, double y) const { return sample_bilinear(kappa_, h_, w_, x, y); }
    double sample_grad_d_x(double x, double y) const { return sample_bilinear(gdx_, h_, w_, x, y); }
    double sample_grad_d_y(double x, double y) const { return sample_bilinear(gdy_, h_, w_, x, y); }

private:
    void compute_gradients() {
        const std::size_t n = static_cast<std::size_t>(h_) * w_;
        gdx_.assign(n, 0.0);
        gdy_.assign(n, 0.0);
        for (int r = 0; r < h_; ++r) {
            for (int c = 0; c < w_; ++c) {
                const std::size_t i = static_cast<std::size_t>(r) * w_ + c;
                if (c == 0)
                    gdx_[i] = d_[i + 1] - d_[i];
                else if (c == w_ - 1)
                    gdx_[i] = d_[i] - d_[i - 1];
                else
                    gdx_[i] = 0.5 * (d_[i + 1] - d_[i - 1]);
                if (r == 0)
                    gdy_[i] = d_[i + w_] - d_[i];
                else if (r == h_ - 1)
                    gdy_[i] = d_[i] - d_[i - w_];
                else
                    gdy_[i] = 0.5 * (d_[i + w_] - d_[i - w_]);
            }
        }
    }

    int h_, w_;
    std::vector<double> d_, beta_, kappa_;
    std::vector<double> gdx_, gdy_;
};

/// Sum of D at the contour vertices.
inline double energy_data(const EnergyLandscape& ls, const PolarContour& c) {
    double e = 0.0;
    for (const Point& p : to_cartesian(c)) e += ls.sample_d(p.x, p.y);
    return e;
}

/// Sum of beta(c_i) * |c_{i+1} - 2 c_i + c_{i-1}|^2, cyclic indexing.
inline double energy_curve(const EnergyLandscape& ls, const PolarContour& c) {
    const std::vector<Point> p = to_cartesian(c);
    const std::size_t n = p.size();
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& prev = p[(i + n - 1) % n];
        const Point& next = p[(i + 1) % n];
        const double dx = next.x - 2.0 * p[i].x + prev.x;
        const double dy = next.y - 2.0 * p[i].y + prev.y;
        e += ls.sample_beta(p[i].x, p[i].y) * (dx * dx + dy * dy);
    }
    return e;
}

/// Sum of kappa(c_i) * (1 - rho_i / rho_max). Rewards inflation up to rho_max.
inline double energy_balloon(const EnergyLandscape& ls, const PolarContour& c) {
    const std::vector<Point> p = to_cartesian(c);
    double e = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        e += ls.sample_kappa(p[i].x, p[i].y) *
             (1.0 - c.radii()[i] / c.rho_max());
    return e;
}

inline EnergyBreakdown energy_total(const EnergyLandscape& ls,
                                    const PolarContour& c) {
    EnergyBreakdown b;
    b.data = energy_data(ls, c);
    b.curve = energy_curve(ls, c);
    b.balloon = energy_balloon(ls, c);
    return b;
}

// ---------------------------------------------------------------------------
// EMAP container: magic "EMAP", LE u32 version (=1), u32 H, u32 W, then the
// three planes D, beta, kappa as row-major LE f32, row 0 = top of image.
// ---------------------------------------------------------------------------

namespace detail {
inline void put_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(std::ifstream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void put_plane_f32(std::ofstream& out, const std::vector<double>& v) {
    std::vector<std::uint32_t> bits(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const float f = static_cast<float>(v[i]);
        std::memcpy(&bits[i], &f, 4);
    }
    for (std::uint32_t u : bits) put_u32(out, u);
}

inline std::vector<double> get_plane_f32(std::ifstream& in, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t u = get_u32(in);
        float f;
        std::memcpy(&f, &u, 4);
        v[i] = static_cast<double>(f);
    }
    return v;
}
}  // namespace detail

inline void write_emap(const std::string& path, const EnergyLandscape& ls) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write("EMAP", 4);
    detail::put_u32(out, 1u);
    detail::put_u32(out, static_cast<std::uint32_t>(ls.height()));
    detail::put_u32(out, static_cast<std::uint32_t>(ls.width()));
    detail::put_plane_f32(out, ls.d());
    detail::put_plane_f32(out, ls.beta());
    detail::put_plane_f32(out, ls.kappa());
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline EnergyLandscape read_emap(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "EMAP", 4) != 0)
        throw std::runtime_error("not an EMAP file: " + path);
    const std::uint32_t version = detail::get_u32(in);
    if (version != 1u)
        throw std::runtime_error("unsupported EMAP version in " + path);
    const std::uint32_t h = detail::get_u32(in);
    const std::uint32_t w = detail::get_u32(in);
    if (!in || h < 2 || w < 2 || h > (1u << 16) || w > (1u << 16))
        throw std::runtime_error("bad EMAP dimensions in " + path);
    const std::size_t n = static_cast<std::size_t>(h) * w;
    std::vector<double> d = detail::get_plane_f32(in, n);
    std::vector<double> beta = detail::get_plane_f32(in, n);
    std::vector<double> kappa = detail::get_plane_f32(in, n);
    if (!in) throw std::runtime_error("truncated EMAP file: " + path);
    return EnergyLandscape(static_cast<int>(h), static_cast<int>(w),
                           std::move(d), std::move(beta), std::move(kappa));
}

}  // namespace activerays
