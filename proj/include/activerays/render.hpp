#pragma once

// SVG overlay rendering: a grayscale background raster (embedded as a PNG
// data URI) with closed contour polylines on top. Ground truth is drawn in
// blue, predictions in yellow.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <zlib.h>

#include "activerays/geometry.hpp"

namespace activerays {
namespace detail {

inline void png_append_u32(std::vector<std::uint8_t>& v, std::uint32_t x) {
    v.push_back(static_cast<std::uint8_t>((x >> 24) & 0xff));
    v.push_back(static_cast<std::uint8_t>((x >> 16) & 0xff));
    v.push_back(static_cast<std::uint8_t>((x >> 8) & 0xff));
    v.push_back(static_cast<std::uint8_t>(x & 0xff));
}

inline void png_append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                             const std::vector<std::uint8_t>& data) {
    png_append_u32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const uLong crc = ::crc32(0L, out.data() + crc_start,
                              static_cast<uInt>(out.size() - crc_start));
    png_append_u32(out, static_cast<std::uint32_t>(crc));
}

/// Minimal 8-bit grayscale PNG encoder (filter 0 on every scanline).
inline std::vector<std::uint8_t> encode_gray_png(const std::vector<std::uint8_t>& gray,
                                                 int h, int w) {
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(h) * (w + 1));
    for (int r = 0; r < h; ++r) {
        raw.push_back(0);  // filter type none
        raw.insert(raw.end(), gray.begin() + static_cast<std::size_t>(r) * w,
                   gray.begin() + static_cast<std::size_t>(r + 1) * w);
    }
    uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> comp(comp_len);
    if (compress2(comp.data(), &comp_len, raw.data(),
                  static_cast<uLong>(raw.size()), 9) != Z_OK)
        throw std::runtime_error("PNG deflate failed");
    comp.resize(comp_len);

    std::vector<std::uint8_t> png = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    std::vector<std::uint8_t> ihdr;
    png_append_u32(ihdr, static_cast<std::uint32_t>(w));
    png_append_u32(ihdr, static_cast<std::uint32_t>(h));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(0);  // grayscale
    ihdr.push_back(0);  // deflate
    ihdr.push_back(0);  // filter method
    ihdr.push_back(0);  // no interlace
    png_append_chunk(png, "IHDR", ihdr);
    png_append_chunk(png, "IDAT", comp);
    png_append_chunk(png, "IEND", {});
    return png;
}

inline std::string base64_encode(const std::vector<std::uint8_t>& data) {
    static const char tab[] =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    for (std::size_t i = 0; i < data.size(); i += 3) {
        std::uint32_t v = static_cast<std::uint32_t>(data[i]) << 16;
        if (i + 1 < data.size()) v |= static_cast<std::uint32_t>(data[i + 1]) << 8;
        if (i + 2 < data.size()) v |= data[i + 2];
        out.push_back(tab[(v >> 18) & 63]);
        out.push_back(tab[(v >> 12) & 63]);
        out.push_back(i + 1 < data.size() ? tab[(v >> 6) & 63] : '=');
        out.push_back(i + 2 < data.size() ? tab[v & 63] : '=');
    }
    return out;
}

}  // namespace detail

struct RenderLayer {
    std::vector<Point> vertices;
    bool is_ground_truth = false;  // blue when true, yellow otherwise
};

/// Writes an SVG: the background field rendered as grayscale (linearly
/// normalized to [0, 255]) with the contour polygons drawn on top. Vertex
/// coordinates are shifted by +0.5 so grid point (x, y) lands on the center
/// of pixel (x, y).
inline void write_svg(const std::string& path, const std::vector<double>& field,
                      int h, int w, const std::vector<RenderLayer>& layers) {
    double lo = field.empty() ? 0.0 : field[0];
    double hi = lo;
    for (double v : field) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    std::vector<std::uint8_t> gray(field.size());
    for (std::size_t i = 0; i < field.size(); ++i)
        gray[i] = static_cast<std::uint8_t>(
            std::lround(255.0 * (field[i] - lo) / span));

    const std::string png_b64 =
        detail::base64_encode(detail::encode_gray_png(gray, h, w));

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
        << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h
        << "\">\n";
    out << "  <image x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h
        << "\" image-rendering=\"pixelated\" "
           "href=\"data:image/png;base64,"
        << png_b64 << "\"/>\n";
    char buf[64];
    for (const RenderLayer& layer : layers) {
        out << "  <path fill=\"none\" stroke=\""
            << (layer.is_ground_truth ? "#1f6ef7" : "#f7d51f")
            << "\" stroke-width=\"1\" d=\"";
        for (std::size_t i = 0; i < layer.vertices.size(); ++i) {
            const Point& p = layer.vertices[i];
            std::snprintf(buf, sizeof(buf), "%c%.6g %.6g", i == 0 ? 'M' : 'L',
                          p.x + 0.5, p.y + 0.5);
            out << buf;
        }
        out << "Z\"/>\n";
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace activerays
