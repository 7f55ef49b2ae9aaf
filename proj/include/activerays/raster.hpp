#pragma once

// Contour-to-mask rasterization (pixel-center, even-odd scanline fill) and
// the evaluation metrics: IoU, pixel areas in m^2, batch mIoU / area RMSE.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "activerays/geometry.hpp"

namespace activerays {

struct Mask {
    int h = 0;
    int w = 0;
    std::vector<std::uint8_t> bits;  // row-major, 1 = building

    Mask() = default;
    Mask(int h_, int w_) : h(h_), w(w_), bits(static_cast<std::size_t>(h_) * w_, 0) {}

    bool at(int r, int c) const { return bits[static_cast<std::size_t>(r) * w + c] != 0; }
    void set(int r, int c, bool v) { bits[static_cast<std::size_t>(r) * w + c] = v ? 1 : 0; }

    std::size_t count() const {
        std::size_t n = 0;
        for (std::uint8_t b : bits) n += b;
        return n;
    }
};

/// Scanline even-odd fill: pixel (r,c) is set iff its center (c+0.5, r+0.5)
/// lies inside the closed polygon of the contour's Cartesian vertices. A
/// degenerate (zero-area) polygon yields an empty mask and sets the flag.
inline Mask rasterize(const PolarContour& contour, int h, int w,
                      bool* degenerate = nullptr) {
    if (degenerate) *degenerate = false;
    Mask mask(h, w);
    const std::vector<Point> p = to_cartesian(contour);
    const std::size_t n = p.size();

    double area2 = 0.0;  // shoelace, twice the signed area
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = p[i];
        const Point& b = p[(i + 1) % n];
        area2 += a.x * b.y - b.x * a.y;
    }
    if (std::abs(area2) < 1e-12) {
        if (degenerate) *degenerate = true;
        return mask;
    }

    std::vector<double> xs;
    for (int r = 0; r < h; ++r) {
        const double y = r + 0.5;
        xs.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const Point& a = p[i];
            const Point& b = p[(i + 1) % n];
            if ((a.y > y) != (b.y > y))
                xs.push_back((b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x);
        }
        if (xs.empty()) continue;
        std::sort(xs.begin(), xs.end());
        for (int c = 0; c < w; ++c) {
            const double x = c + 0.5;
            // Inside iff an odd number of crossings lies strictly right of x.
            const auto it = std::upper_bound(xs.begin(), xs.end(), x);
            if ((xs.end() - it) % 2 == 1) mask.set(r, c, true);
        }
    }
    return mask;
}

/// |a AND b| / |a OR b|; 1.0 when both masks are empty.
inline double iou(const Mask& a, const Mask& b) {
    if (a.h != b.h || a.w != b.w)
        throw std::invalid_argument("iou: mask dimensions differ");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.bits.size(); ++i) {
        const bool av = a.bits[i] != 0;
        const bool bv = b.bits[i] != 0;
        inter += (av && bv);
        uni += (av || bv);
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

inline double area_m2(const Mask& mask, double resolution_m) {
    if (!(resolution_m > 0.0))
        throw std::invalid_argument("area_m2: resolution must be positive");
    return static_cast<double>(mask.count()) * resolution_m * resolution_m;
}

struct SampleResult {
    std::string id;
    double iou = 0.0;
    double pred_area_m2 = 0.0;
    double gt_area_m2 = 0.0;
    double area_error_m2 = 0.0;  // |pred - gt|
    bool both_empty = false;     // IoU reported as 1.0 by convention
};

struct EvalReport {
    std::vector<SampleResult> samples;
    double miou = 0.0;     // arithmetic mean of per-sample IoU
    double rmse_m2 = 0.0;  // sqrt(mean(area_error^2))
    double resolution_m = 0.0;
};

struct MaskPair {
    std::string id;
    Mask pred;
    Mask gt;
};

inline EvalReport evaluate_batch(const std::vector<MaskPair>& pairs,
                                 double resolution_m) {
    if (!(resolution_m > 0.0))
        throw std::invalid_argument("evaluate_batch: resolution must be positive");
    EvalReport rep;
    rep.resolution_m = resolution_m;
    double iou_sum = 0.0, sq_sum = 0.0;
    for (const MaskPair& pr : pairs) {
        if (pr.pred.h != pr.gt.h || pr.pred.w != pr.gt.w)
            throw std::invalid_argument("evaluate_batch: dimension mismatch for sample " +
                                        pr.id);
        SampleResult s;
        s.id = pr.id;
        s.iou = iou(pr.pred, pr.gt);
        s.both_empty = pr.pred.count() == 0 && pr.gt.count() == 0;
        s.pred_area_m2 = area_m2(pr.pred, resolution_m);
        s.gt_area_m2 = area_m2(pr.gt, resolution_m);
        s.area_error_m2 = std::abs(s.pred_area_m2 - s.gt_area_m2);
        iou_sum += s.iou;
        sq_sum += s.area_error_m2 * s.area_error_m2;
        rep.samples.push_back(std::move(s));
    }
    if (!rep.samples.empty()) {
        rep.miou = iou_sum / static_cast<double>(rep.samples.size());
        rep.rmse_m2 = std::sqrt(sq_sum / static_cast<double>(rep.samples.size()));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Binary PGM (P5, maxval 255): 0 = background, 255 = building.
// ---------------------------------------------------------------------------

inline void write_pgm(const std::string& path, const Mask& mask) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "P5\n" << mask.w << " " << mask.h << "\n255\n";
    std::vector<std::uint8_t> row(static_cast<std::size_t>(mask.w));
    for (int r = 0; r < mask.h; ++r) {
        for (int c = 0; c < mask.w; ++c) row[c] = mask.at(r, c) ? 255 : 0;
        out.write(reinterpret_cast<const char*>(row.data()), mask.w);
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline Mask read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P5" || w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
        throw std::runtime_error("not an 8-bit P5 PGM: " + path);
    in.get();  // single whitespace after maxval
    Mask mask(h, w);
    std::vector<std::uint8_t> row(static_cast<std::size_t>(w));
    for (int r = 0; r < h; ++r) {
        in.read(reinterpret_cast<char*>(row.data()), w);
        if (!in) throw std::runtime_error("truncated PGM: " + path);
        for (int c = 0; c < w; ++c) mask.set(r, c, row[c] >= 128);
    }
    return mask;
}

}  // namespace activerays
