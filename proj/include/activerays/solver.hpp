#pragma once

// Semi-implicit evolution of a polar contour on an energy landscape: the
// curvature quadratic form is treated implicitly, data and balloon gradients
// explicitly. Coefficients (beta, kappa, grad D) are sampled at the current
// vertices and frozen within each iteration.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "activerays/geometry.hpp"
#include "activerays/landscape.hpp"

namespace activerays {

struct SolverConfig {
    int max_iters = 400;
    double step_gamma = 1.0;    // damping of the semi-implicit update
    double tol_rho = 1e-3;      // convergence threshold on max |delta rho|
    double rho_floor = 0.5;     // keeps rays off the reference point
    bool backtracking = true;   // halve the effective step when energy rises

    void validate() const {
        if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters >= 1");
        if (!(step_gamma > 0.0)) throw std::invalid_argument("SolverConfig: step_gamma > 0");
        if (!(tol_rho > 0.0)) throw std::invalid_argument("SolverConfig: tol_rho > 0");
        if (!(rho_floor > 0.0)) throw std::invalid_argument("SolverConfig: rho_floor > 0");
    }
};

struct IterationRecord {
    EnergyBreakdown energy;
    double max_delta_rho = 0.0;
    int halvings = 0;
    int clamped = 0;  // vertices hit by the [rho_floor, rho_max] clamp
};

struct SolverTrace {
    std::vector<IterationRecord> iterations;
    bool converged = false;
};

/// Thrown when radii or energies go non-finite; carries the trace so far.
class numerical_failure : public std::runtime_error {
public:
    numerical_failure(const std::string& what, SolverTrace trace)
        : std::runtime_error(what), trace(std::move(trace)) {}
    SolverTrace trace;
};

/// Symmetric cyclic pentadiagonal matrix A of the frozen-beta curvature
/// quadratic form: (1/2) rho^T A rho == energy_curve with beta sampled at the
/// current vertices. Built from ray-direction dot products
/// u_a . u_b = cos((a-b) * delta_theta).
inline Eigen::MatrixXd curvature_matrix(const EnergyLandscape& ls,
                                        const PolarContour& c) {
    const std::size_t n = c.vertex_count();
    const double dth = c.delta_theta();
    const std::vector<Point> pts = to_cartesian(c);

    std::vector<double> beta(n);
    for (std::size_t i = 0; i < n; ++i)
        beta[i] = ls.sample_beta(pts[i].x, pts[i].y);

    // E = sum_j beta_j |sum_k w_k rho_{j+k} u_{j+k}|^2, w = (1, -2, 1) over
    // offsets k in {-1, 0, 1}. A = 2M where E = rho^T M rho.
    static constexpr double w[3] = {1.0, -2.0, 1.0};
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        for (int ka = -1; ka <= 1; ++ka) {
            for (int kb = -1; kb <= 1; ++kb) {
                const std::size_t a = (j + n + ka) % n;
                const std::size_t b = (j + n + kb) % n;
                A(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
                    2.0 * beta[j] * w[ka + 1] * w[kb + 1] *
                    std::cos((ka - kb) * dth);
            }
        }
    }
    return A;
}

/// Gradient of the frozen-coefficient energy in the radii: data term via the
/// sampled central-difference gradient of D projected on the ray directions,
/// curvature term A*rho, balloon term -kappa/rho_max.
inline std::vector<double> gradient_rho(const EnergyLandscape& ls,
                                        const PolarContour& c) {
    const std::size_t n = c.vertex_count();
    const std::vector<Point> pts = to_cartesian(c);
    const Eigen::MatrixXd A = curvature_matrix(ls, c);
    Eigen::VectorXd rho(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) rho(static_cast<Eigen::Index>(i)) = c.radii()[i];
    const Eigen::VectorXd g_curve = A * rho;

    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double th = c.angle(i);
        const double gd = ls.sample_grad_d_x(pts[i].x, pts[i].y) * std::cos(th) +
                          ls.sample_grad_d_y(pts[i].x, pts[i].y) * std::sin(th);
        const double gb = -ls.sample_kappa(pts[i].x, pts[i].y) / c.rho_max();
        g[i] = gd + g_curve(static_cast<Eigen::Index>(i)) + gb;
    }
    return g;
}

namespace detail {
/// Data + balloon gradient only (the explicit part of the update).
inline Eigen::VectorXd external_gradient(const EnergyLandscape& ls,
                                         const PolarContour& c) {
    const std::size_t n = c.vertex_count();
    const std::vector<Point> pts = to_cartesian(c);
    Eigen::VectorXd g(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double th = c.angle(i);
        const double gd = ls.sample_grad_d_x(pts[i].x, pts[i].y) * std::cos(th) +
                          ls.sample_grad_d_y(pts[i].x, pts[i].y) * std::sin(th);
        const double gb = -ls.sample_kappa(pts[i].x, pts[i].y) / c.rho_max();
        g(static_cast<Eigen::Index>(i)) = gd + gb;
    }
    return g;
}
}  // namespace detail

/// Evolves the contour until max |delta rho| < tol_rho or max_iters.
/// Update per iteration: solve (A + gamma I) rho' = gamma rho - g_ext(rho),
/// then clamp rho' into [rho_floor, rho_max]. With backtracking on, gamma is
/// doubled (halving the step) up to 8 times while the total energy rises; if
/// every candidate still rises, the contour is left in place and the
/// iteration counts as converged.
inline std::pair<PolarContour, SolverTrace> evolve(const EnergyLandscape& ls,
                                                   const PolarContour& init,
                                                   const SolverConfig& cfg) {
    cfg.validate();
    SolverTrace trace;
    PolarContour cur = init;
    const std::size_t n = cur.vertex_count();
    const Eigen::Index ni = static_cast<Eigen::Index>(n);
    const double rho_max = cur.rho_max();
    const double rho_floor = std::min(cfg.rho_floor, rho_max);

    double e_cur = energy_total(ls, cur).total();
    if (!std::isfinite(e_cur))
        throw numerical_failure("non-finite initial energy", std::move(trace));

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        const Eigen::MatrixXd A = curvature_matrix(ls, cur);
        const Eigen::VectorXd g_ext = detail::external_gradient(ls, cur);
        Eigen::VectorXd rho(ni);
        for (std::size_t i = 0; i < n; ++i) rho(static_cast<Eigen::Index>(i)) = cur.radii()[i];

        const int max_halvings = cfg.backtracking ? 8 : 0;
        std::vector<double> best_radii;
        double best_energy = 0.0;
        EnergyBreakdown best_breakdown;
        int best_clamped = 0;
        int halvings_used = 0;
        bool accepted = false;

        for (int k = 0; k <= max_halvings; ++k) {
            const double gamma = cfg.step_gamma * std::ldexp(1.0, k);
            Eigen::MatrixXd lhs = A;
            lhs.diagonal().array() += gamma;
            const Eigen::VectorXd rhs = gamma * rho - g_ext;
            Eigen::VectorXd next = lhs.partialPivLu().solve(rhs);

            int clamped = 0;
            std::vector<double> cand(n);
            for (std::size_t i = 0; i < n; ++i) {
                double v = next(static_cast<Eigen::Index>(i));
                if (!std::isfinite(v))
                    throw numerical_failure("non-finite radius at iteration " +
                                                std::to_string(iter),
                                            std::move(trace));
                if (v < rho_floor) { v = rho_floor; ++clamped; }
                if (v > rho_max) { v = rho_max; ++clamped; }
                cand[i] = v;
            }

            PolarContour trial(cur.center(), cand, rho_max);
            const EnergyBreakdown eb = energy_total(ls, trial);
            const double e_new = eb.total();
            if (!std::isfinite(e_new))
                throw numerical_failure("non-finite energy at iteration " +
                                            std::to_string(iter),
                                        std::move(trace));

            if (!cfg.backtracking || e_new <= e_cur) {
                best_radii = std::move(cand);
                best_energy = e_new;
                best_breakdown = eb;
                best_clamped = clamped;
                halvings_used = k;
                accepted = true;
                break;
            }
            if (k == 0 || e_new < best_energy) {
                best_radii = std::move(cand);
                best_energy = e_new;
                best_breakdown = eb;
                best_clamped = clamped;
                halvings_used = k;
            }
        }

        if (!accepted && best_energy > e_cur) {
            // Every step raised the energy; stay put and stop.
            IterationRecord rec;
            rec.energy = energy_total(ls, cur);
            rec.max_delta_rho = 0.0;
            rec.halvings = max_halvings;
            rec.clamped = 0;
            trace.iterations.push_back(rec);
            trace.converged = true;
            return {cur, std::move(trace)};
        }

        double max_delta = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            max_delta = std::max(max_delta, std::abs(best_radii[i] - cur.radii()[i]));

        cur.set_radii(best_radii);
        e_cur = best_energy;

        IterationRecord rec;
        rec.energy = best_breakdown;
        rec.max_delta_rho = max_delta;
        rec.halvings = halvings_used;
        rec.clamped = best_clamped;
        trace.iterations.push_back(rec);

        if (max_delta < cfg.tol_rho) {
            trace.converged = true;
            return {cur, std::move(trace)};
        }
    }
    return {cur, std::move(trace)};
}

}  // namespace activerays
