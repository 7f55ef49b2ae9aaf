#pragma once

// JSON serialization of solver traces and evaluation reports, plus the shape
// spec file parser. nlohmann::json keeps object keys sorted, so identical
// inputs serialize byte-identically.

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "activerays/oracle.hpp"
#include "activerays/raster.hpp"
#include "activerays/solver.hpp"

namespace activerays {

inline nlohmann::json trace_to_json(const SolverTrace& trace) {
    nlohmann::json j;
    j["status"] = trace.converged ? "converged" : "max-iters";
    j["iterations"] = trace.iterations.size();
    std::vector<double> e_total, e_data, e_curve, e_balloon, max_delta;
    std::vector<int> halvings, clamped;
    for (const IterationRecord& r : trace.iterations) {
        e_total.push_back(r.energy.total());
        e_data.push_back(r.energy.data);
        e_curve.push_back(r.energy.curve);
        e_balloon.push_back(r.energy.balloon);
        max_delta.push_back(r.max_delta_rho);
        halvings.push_back(r.halvings);
        clamped.push_back(r.clamped);
    }
    j["energy_total"] = e_total;
    j["energy_data"] = e_data;
    j["energy_curve"] = e_curve;
    j["energy_balloon"] = e_balloon;
    j["max_delta_rho"] = max_delta;
    j["halvings"] = halvings;
    j["clamped_vertices"] = clamped;
    return j;
}

inline void write_trace_json(const std::string& path, const SolverTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << trace_to_json(trace).dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline nlohmann::json report_to_json(const EvalReport& rep) {
    nlohmann::json j;
    j["miou"] = rep.miou;
    j["rmse_m2"] = rep.rmse_m2;
    j["resolution_m"] = rep.resolution_m;
    j["samples"] = nlohmann::json::array();
    for (const SampleResult& s : rep.samples) {
        nlohmann::json js;
        js["id"] = s.id;
        js["iou"] = s.iou;
        js["pred_area_m2"] = s.pred_area_m2;
        js["gt_area_m2"] = s.gt_area_m2;
        js["area_error_m2"] = s.area_error_m2;
        js["both_empty"] = s.both_empty;
        j["samples"].push_back(js);
    }
    return j;
}

inline void write_report_json(const std::string& path, const EvalReport& rep) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << report_to_json(rep).dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

/// Aligned plain-text table: one row per sample plus the aggregates.
inline std::string report_to_table(const EvalReport& rep, bool with_rmse) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3);
    os << std::left << std::setw(16) << "sample" << std::right << std::setw(8)
       << "IoU";
    if (with_rmse)
        os << std::setw(14) << "pred m2" << std::setw(14) << "gt m2"
           << std::setw(14) << "err m2";
    os << "\n";
    for (const SampleResult& s : rep.samples) {
        os << std::left << std::setw(16) << s.id << std::right << std::setw(8)
           << s.iou;
        if (with_rmse)
            os << std::setw(14) << s.pred_area_m2 << std::setw(14) << s.gt_area_m2
               << std::setw(14) << s.area_error_m2;
        os << "\n";
    }
    os << std::left << std::setw(16) << "mIoU" << std::right << std::setw(8)
       << rep.miou << "\n";
    if (with_rmse)
        os << std::left << std::setw(16) << "RMSE (m2)" << std::right
           << std::setw(8) << rep.rmse_m2 << "\n";
    return os.str();
}

struct SynthSpec {
    ShapeSpec shape;
    double d_scale = 1.0;
    double beta = 0.2;
    double kappa = 0.3;
    double blur_sigma = 0.0;
};

/// Parses a shape spec document:
///   {"shape": {"kind": "disk", "cx": 32, "cy": 32, "radius": 20,
///              "height": 64, "width": 64},
///    "d_scale": 1.0, "beta": 0.2, "kappa": 0.3, "blur_sigma": 1.0}
/// Rectangle kinds take x0/y0/x1/y1 (plus corner_radius when rounded);
/// polygons take "vertices": [[x, y], ...].
inline SynthSpec parse_synth_spec(const nlohmann::json& j) {
    SynthSpec spec;
    const nlohmann::json& sj = j.at("shape");
    const std::string kind = sj.at("kind").get<std::string>();
    ShapeSpec& s = spec.shape;
    s.h = sj.at("height").get<int>();
    s.w = sj.at("width").get<int>();
    if (kind == "disk") {
        s.kind = ShapeSpec::Kind::disk;
        s.center = Point{sj.at("cx").get<double>(), sj.at("cy").get<double>()};
        s.radius = sj.at("radius").get<double>();
    } else if (kind == "rectangle" || kind == "rounded_rectangle") {
        s.kind = kind == "rectangle" ? ShapeSpec::Kind::rectangle
                                     : ShapeSpec::Kind::rounded_rectangle;
        s.x0 = sj.at("x0").get<double>();
        s.y0 = sj.at("y0").get<double>();
        s.x1 = sj.at("x1").get<double>();
        s.y1 = sj.at("y1").get<double>();
        if (s.kind == ShapeSpec::Kind::rounded_rectangle)
            s.corner_radius = sj.at("corner_radius").get<double>();
    } else if (kind == "polygon") {
        s.kind = ShapeSpec::Kind::polygon;
        for (const auto& v : sj.at("vertices"))
            s.vertices.push_back(Point{v.at(0).get<double>(), v.at(1).get<double>()});
    } else {
        throw std::invalid_argument("unknown shape kind: " + kind);
    }
    spec.d_scale = j.value("d_scale", 1.0);
    spec.beta = j.value("beta", 0.2);
    spec.kappa = j.value("kappa", 0.3);
    spec.blur_sigma = j.value("blur_sigma", 0.0);
    return spec;
}

inline SynthSpec read_synth_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    return parse_synth_spec(j);
}

}  // namespace activerays
