// activerays command-line tool: synthesize analytic landscapes, evolve
// contours, evaluate mask batches, and render SVG overlays.
//
// Exit codes: 0 success, 1 unexpected error, 2 I/O or schema failure,
// 3 invalid shape, 4 solver numerical failure (trace still written),
// 5 unmatched/missing evaluation pair, 6 mismatched dimensions.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "activerays/geometry.hpp"
#include "activerays/landscape.hpp"
#include "activerays/oracle.hpp"
#include "activerays/raster.hpp"
#include "activerays/render.hpp"
#include "activerays/serialize.hpp"
#include "activerays/solver.hpp"

namespace fs = std::filesystem;
using namespace activerays;

namespace {

constexpr int kExitIo = 2;
constexpr int kExitShape = 3;
constexpr int kExitNumerical = 4;
constexpr int kExitPairing = 5;
constexpr int kExitDimensions = 6;

int run_synth(const std::string& spec_path, const std::string& emap_path,
              const std::string& mask_path) {
    SynthSpec spec;
    try {
        spec = read_synth_spec(spec_path);
    } catch (const std::exception& e) {
        std::cerr << "synth: cannot read spec: " << e.what() << "\n";
        return kExitIo;
    }
    try {
        spec.shape.validate();
    } catch (const std::exception& e) {
        std::cerr << "synth: invalid shape: " << e.what() << "\n";
        return kExitShape;
    }
    try {
        const EnergyLandscape ls = synth_landscape(
            spec.shape, spec.d_scale, spec.beta, spec.kappa, spec.blur_sigma);
        write_emap(emap_path, ls);
        if (!mask_path.empty()) write_pgm(mask_path, gt_mask(spec.shape));
    } catch (const std::exception& e) {
        std::cerr << "synth: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}

int run_evolve(const std::string& emap_path, const std::string& center_arg,
               double init_radius, double init_radius_frac, std::size_t vertices,
               std::optional<double> rho_max_arg, const SolverConfig& cfg,
               const std::string& out_csv, const std::string& trace_path) {
    std::optional<EnergyLandscape> ls;
    try {
        ls.emplace(read_emap(emap_path));
    } catch (const std::exception& e) {
        std::cerr << "evolve: " << e.what() << "\n";
        return kExitIo;
    }

    Point center{0.5 * (ls->width() - 1), 0.5 * (ls->height() - 1)};
    if (!center_arg.empty()) {
        if (std::sscanf(center_arg.c_str(), "%lf,%lf", &center.x, &center.y) != 2) {
            std::cerr << "evolve: --init-center expects x,y\n";
            return kExitIo;
        }
    }
    // Global cap: distance from the reference point to the nearest image edge.
    double rho_max = std::min({center.x, center.y, (ls->width() - 1) - center.x,
                               (ls->height() - 1) - center.y});
    if (rho_max_arg) rho_max = *rho_max_arg;
    if (!(rho_max > 0.0)) {
        std::cerr << "evolve: reference point leaves no room for rays\n";
        return kExitIo;
    }
    double radius = init_radius;
    if (radius <= 0.0) radius = init_radius_frac * rho_max;

    try {
        const PolarContour init = init_circle(center, radius, vertices, rho_max);
        auto [final_contour, trace] = evolve(*ls, init, cfg);
        write_contour_csv(out_csv, to_cartesian(final_contour));
        if (!trace_path.empty()) write_trace_json(trace_path, trace);
    } catch (const numerical_failure& e) {
        std::cerr << "evolve: numerical failure: " << e.what() << "\n";
        if (!trace_path.empty()) {
            try {
                write_trace_json(trace_path, e.trace);
            } catch (const std::exception& io) {
                std::cerr << "evolve: cannot write trace: " << io.what() << "\n";
            }
        }
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "evolve: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}

int run_eval(const std::string& dir, std::optional<double> resolution_m,
             const std::string& report_path) {
    std::map<std::string, std::pair<fs::path, fs::path>> by_id;
    std::error_code ec;
    for (const fs::directory_entry& e : fs::directory_iterator(dir, ec)) {
        const std::string name = e.path().filename().string();
        auto ends_with = [&](const std::string& suffix) {
            return name.size() > suffix.size() &&
                   name.compare(name.size() - suffix.size(), suffix.size(),
                                suffix) == 0;
        };
        if (ends_with("_pred.pgm"))
            by_id[name.substr(0, name.size() - 9)].first = e.path();
        else if (ends_with("_gt.pgm"))
            by_id[name.substr(0, name.size() - 7)].second = e.path();
    }
    if (ec) {
        std::cerr << "eval: cannot read directory: " << dir << "\n";
        return kExitIo;
    }
    if (by_id.empty()) {
        std::cerr << "eval: no <id>_pred.pgm / <id>_gt.pgm pairs in " << dir << "\n";
        return kExitPairing;
    }

    std::vector<MaskPair> pairs;
    for (const auto& [id, paths] : by_id) {
        if (paths.first.empty() || paths.second.empty()) {
            std::cerr << "eval: unmatched pair for sample '" << id << "'\n";
            return kExitPairing;
        }
        MaskPair p;
        p.id = id;
        try {
            p.pred = read_pgm(paths.first.string());
            p.gt = read_pgm(paths.second.string());
        } catch (const std::exception& e) {
            std::cerr << "eval: " << e.what() << "\n";
            return kExitIo;
        }
        pairs.push_back(std::move(p));
    }

    try {
        const EvalReport rep = evaluate_batch(pairs, resolution_m.value_or(1.0));
        std::cout << report_to_table(rep, resolution_m.has_value());
        if (!report_path.empty()) write_report_json(report_path, rep);
    } catch (const std::exception& e) {
        std::cerr << "eval: " << e.what() << "\n";
        return kExitDimensions;
    }
    return 0;
}

int run_render(const std::string& emap_path, const std::string& gt_csv,
               const std::vector<std::string>& pred_csvs,
               const std::string& out_svg) {
    std::optional<EnergyLandscape> ls;
    try {
        ls.emplace(read_emap(emap_path));
    } catch (const std::exception& e) {
        std::cerr << "render: " << e.what() << "\n";
        return kExitIo;
    }

    std::vector<RenderLayer> layers;
    auto load_layer = [&](const std::string& path, bool is_gt) -> int {
        RenderLayer layer;
        layer.is_ground_truth = is_gt;
        try {
            layer.vertices = read_contour_csv(path);
        } catch (const std::exception& e) {
            std::cerr << "render: " << e.what() << "\n";
            return kExitIo;
        }
        for (const Point& p : layer.vertices) {
            if (p.x < 0.0 || p.x > ls->width() || p.y < 0.0 || p.y > ls->height()) {
                std::cerr << "render: contour " << path
                          << " lies outside the raster dimensions\n";
                return kExitDimensions;
            }
        }
        layers.push_back(std::move(layer));
        return 0;
    };

    if (!gt_csv.empty())
        if (int rc = load_layer(gt_csv, true); rc != 0) return rc;
    for (const std::string& p : pred_csvs)
        if (int rc = load_layer(p, false); rc != 0) return rc;

    try {
        write_svg(out_svg, ls->d(), ls->height(), ls->width(), layers);
    } catch (const std::exception& e) {
        std::cerr << "render: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Active-rays contour extraction toolkit"};
    app.require_subcommand(1);

    // synth
    std::string spec_path, synth_emap, synth_mask;
    CLI::App* synth = app.add_subcommand(
        "synth", "Generate an analytic landscape and ground-truth mask");
    synth->add_option("--spec", spec_path, "Shape spec JSON")->required();
    synth->add_option("--out", synth_emap, "Output EMAP path")->required();
    synth->add_option("--out-mask", synth_mask, "Output ground-truth PGM path");

    // evolve
    std::string emap_path, center_arg, out_csv, trace_path;
    double init_radius = 0.0, init_radius_frac = 0.25;
    std::size_t vertices = 60;
    std::optional<double> rho_max_arg;
    SolverConfig cfg;
    bool no_backtracking = false;
    CLI::App* evolve_cmd =
        app.add_subcommand("evolve", "Evolve a contour on a landscape");
    evolve_cmd->add_option("--landscape", emap_path, "Input EMAP path")->required();
    evolve_cmd->add_option("--init-center", center_arg,
                           "Reference point x,y (default: image center)");
    evolve_cmd->add_option("--init-radius", init_radius,
                           "Initial circle radius in pixels");
    evolve_cmd->add_option("--init-radius-frac", init_radius_frac,
                           "Initial radius as a fraction of rho_max");
    evolve_cmd->add_option("--vertices", vertices, "Vertex count L");
    evolve_cmd->add_option("--rho-max", rho_max_arg,
                           "Override the ray cap (default: nearest image edge)");
    evolve_cmd->add_option("--gamma", cfg.step_gamma, "Semi-implicit damping");
    evolve_cmd->add_option("--max-iters", cfg.max_iters, "Iteration budget");
    evolve_cmd->add_option("--tol", cfg.tol_rho, "Convergence tol on max |drho|");
    evolve_cmd->add_option("--rho-floor", cfg.rho_floor, "Minimum radius");
    evolve_cmd->add_flag("--no-backtracking", no_backtracking,
                         "Disable the energy backtracking line search");
    evolve_cmd->add_option("--out", out_csv, "Output contour CSV")->required();
    evolve_cmd->add_option("--trace", trace_path, "Output trace JSON");

    // eval
    std::string eval_dir, report_path;
    std::optional<double> resolution_m;
    CLI::App* eval_cmd =
        app.add_subcommand("eval", "Evaluate <id>_pred.pgm vs <id>_gt.pgm pairs");
    eval_cmd->add_option("--dir", eval_dir, "Directory of mask pairs")->required();
    eval_cmd->add_option("--resolution-m", resolution_m,
                         "Meters per pixel (enables area RMSE)");
    eval_cmd->add_option("--report", report_path, "Output report JSON");

    // render
    std::string render_emap, gt_csv, out_svg;
    std::vector<std::string> pred_csvs;
    CLI::App* render_cmd =
        app.add_subcommand("render", "Render contours over a landscape as SVG");
    render_cmd->add_option("--landscape", render_emap, "Background EMAP")->required();
    render_cmd->add_option("--gt", gt_csv, "Ground-truth contour CSV (blue)");
    render_cmd->add_option("--pred", pred_csvs, "Prediction contour CSV (yellow)");
    render_cmd->add_option("--out", out_svg, "Output SVG path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return run_synth(spec_path, synth_emap, synth_mask);
        if (evolve_cmd->parsed()) {
            cfg.backtracking = !no_backtracking;
            return run_evolve(emap_path, center_arg, init_radius, init_radius_frac,
                              vertices, rho_max_arg, cfg, out_csv, trace_path);
        }
        if (eval_cmd->parsed()) return run_eval(eval_dir, resolution_m, report_path);
        if (render_cmd->parsed()) {
            if (gt_csv.empty() && pred_csvs.empty()) {
                std::cerr << "render: need at least one contour (--gt or --pred)\n";
                return kExitIo;
            }
            return run_render(render_emap, gt_csv, pred_csvs, out_svg);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
