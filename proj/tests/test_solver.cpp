#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "activerays/geometry.hpp"
#include "activerays/landscape.hpp"
#include "activerays/oracle.hpp"
#include "activerays/solver.hpp"

using namespace activerays;
using Catch::Approx;

namespace {

std::vector<double> constant_plane(int h, int w, double v) {
    return std::vector<double>(static_cast<std::size_t>(h) * w, v);
}

EnergyLandscape constant_landscape(int h, int w, double d, double beta,
                                   double kappa) {
    return EnergyLandscape(h, w, constant_plane(h, w, d),
                           constant_plane(h, w, beta),
                           constant_plane(h, w, kappa));
}

EnergyLandscape smooth_random_landscape(int h, int w, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> d(static_cast<std::size_t>(h) * w);
    std::vector<double> beta(d.size()), kappa(d.size());
    for (auto& v : d) v = u(rng);
    for (auto& v : beta) v = u(rng);
    for (auto& v : kappa) v = u(rng);
    detail::gaussian_blur_inplace(d, h, w, 2.0);
    detail::gaussian_blur_inplace(beta, h, w, 2.0);
    detail::gaussian_blur_inplace(kappa, h, w, 2.0);
    return EnergyLandscape(h, w, std::move(d), std::move(beta), std::move(kappa));
}

PolarContour random_contour(int h, int w, std::size_t L, std::mt19937& rng) {
    std::uniform_real_distribution<double> uc(0.35, 0.65);
    const Point center{uc(rng) * (w - 1), uc(rng) * (h - 1)};
    const double rho_max = std::min({center.x, center.y, (w - 1) - center.x,
                                     (h - 1) - center.y});
    std::uniform_real_distribution<double> ur(2.0, 0.9 * rho_max);
    std::vector<double> radii(L);
    for (double& r : radii) r = ur(rng);
    return PolarContour(center, radii, rho_max);
}

// Independent oracle: the frozen-coefficient energy as a function of the
// radii, with D linearized around the base contour using the sampled
// central-difference gradient, and beta/kappa pinned at the base vertices.
double frozen_energy(const EnergyLandscape& ls, const PolarContour& base,
                     const std::vector<double>& rho) {
    const std::size_t n = base.vertex_count();
    const std::vector<Point> p0 = to_cartesian(base);
    const double dth = base.delta_theta();

    std::vector<double> gx(n), gy(n), beta(n), kappa(n), d0(n);
    for (std::size_t i = 0; i < n; ++i) {
        gx[i] = ls.sample_grad_d_x(p0[i].x, p0[i].y);
        gy[i] = ls.sample_grad_d_y(p0[i].x, p0[i].y);
        beta[i] = ls.sample_beta(p0[i].x, p0[i].y);
        kappa[i] = ls.sample_kappa(p0[i].x, p0[i].y);
        d0[i] = ls.sample_d(p0[i].x, p0[i].y);
    }

    std::vector<Point> p(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double th = static_cast<double>(i) * dth;
        p[i].x = base.center().x + rho[i] * std::cos(th);
        p[i].y = base.center().y + rho[i] * std::sin(th);
    }

    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        e += d0[i] + gx[i] * (p[i].x - p0[i].x) + gy[i] * (p[i].y - p0[i].y);
    for (std::size_t i = 0; i < n; ++i) {
        const Point& prev = p[(i + n - 1) % n];
        const Point& next = p[(i + 1) % n];
        const double dx = next.x - 2.0 * p[i].x + prev.x;
        const double dy = next.y - 2.0 * p[i].y + prev.y;
        e += beta[i] * (dx * dx + dy * dy);
    }
    for (std::size_t i = 0; i < n; ++i)
        e += kappa[i] * (1.0 - rho[i] / base.rho_max());
    return e;
}

}  // namespace

TEST_CASE("gradient is zero on constant-D flat landscapes") {
    const auto ls = constant_landscape(64, 64, 2.5, 0.0, 0.0);
    const PolarContour c = init_circle(Point{32, 32}, 10.0, 24, 30.0);
    for (double g : gradient_rho(ls, c)) CHECK(g == Approx(0.0).margin(1e-12));
}

TEST_CASE("balloon-only gradient is -kappa/rho_max") {
    const auto ls = constant_landscape(64, 64, 0.0, 0.0, 1.0);
    const PolarContour c = init_circle(Point{32, 32}, 10.0, 24, 30.0);
    for (double g : gradient_rho(ls, c))
        CHECK(g == Approx(-1.0 / 30.0).margin(1e-12));
}

TEST_CASE("gradient matches finite differences of the frozen energy") {
    std::mt19937 rng(100);
    const double h = 1e-4;
    for (int trial = 0; trial < 10; ++trial) {
        const auto ls = smooth_random_landscape(64, 64, rng);
        const PolarContour c = random_contour(64, 64, 60, rng);
        const auto g = gradient_rho(ls, c);

        double max_err = 0.0, max_fd = 0.0;
        for (std::size_t i = 0; i < c.vertex_count(); ++i) {
            std::vector<double> rp = c.radii(), rm = c.radii();
            rp[i] += h;
            rm[i] -= h;
            const double fd =
                (frozen_energy(ls, c, rp) - frozen_energy(ls, c, rm)) / (2.0 * h);
            max_err = std::max(max_err, std::abs(g[i] - fd));
            max_fd = std::max(max_fd, std::abs(fd));
        }
        CHECK(max_err / std::max(max_fd, 1e-12) < 1e-4);
    }
}

TEST_CASE("curvature matrix is the quadratic form of the curve energy") {
    std::mt19937 rng(200);
    for (int trial = 0; trial < 10; ++trial) {
        const auto ls = smooth_random_landscape(64, 64, rng);
        const PolarContour c = random_contour(64, 64, 40, rng);
        const Eigen::MatrixXd A = curvature_matrix(ls, c);

        CHECK(A.isApprox(A.transpose(), 0.0));  // exact symmetry

        Eigen::VectorXd rho(A.rows());
        for (Eigen::Index i = 0; i < A.rows(); ++i) rho(i) = c.radii()[i];
        const double quad = 0.5 * rho.dot(A * rho);
        CHECK(quad == Approx(energy_curve(ls, c)).margin(1e-9));

        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
        CHECK(es.eigenvalues().minCoeff() >= -1e-9);

        // Bandwidth 2 with cyclic wraparound.
        const Eigen::Index n = A.rows();
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                const Eigen::Index d = std::min((i - j + n) % n, (j - i + n) % n);
                if (d > 2) CHECK(A(i, j) == 0.0);
            }
        }
    }
}

TEST_CASE("curvature matrix is zero when beta vanishes") {
    const auto ls = constant_landscape(32, 32, 1.0, 0.0, 1.0);
    const PolarContour c = init_circle(Point{16, 16}, 8.0, 12, 15.0);
    CHECK(curvature_matrix(ls, c).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("evolve on all-zero maps is a fixed point") {
    const auto ls = constant_landscape(64, 64, 0.0, 0.0, 0.0);
    const PolarContour init = init_circle(Point{32, 32}, 10.0, 60, 30.0);
    const auto [final_c, trace] = evolve(ls, init, SolverConfig{});
    REQUIRE(trace.converged);
    CHECK(trace.iterations.size() == 1);
    for (std::size_t i = 0; i < 60; ++i)
        CHECK(final_c.radii()[i] == Approx(10.0).margin(1e-12));
}

TEST_CASE("balloon-only landscape inflates monotonically to rho_max") {
    const auto ls = constant_landscape(64, 64, 0.0, 0.0, 1.0);
    const PolarContour init = init_circle(Point{32, 32}, 5.0, 30, 30.0);
    SolverConfig cfg;
    cfg.step_gamma = 0.05;
    const auto [final_c, trace] = evolve(ls, init, cfg);
    REQUIRE(trace.converged);
    for (double r : final_c.radii()) CHECK(r == Approx(30.0).margin(cfg.tol_rho));
    // Energy decreases monotonically while the radii grow.
    for (std::size_t k = 1; k < trace.iterations.size(); ++k)
        CHECK(trace.iterations[k].energy.total() <=
              trace.iterations[k - 1].energy.total());
}

TEST_CASE("evolve is deterministic") {
    std::mt19937 rng(300);
    const auto ls = smooth_random_landscape(64, 64, rng);
    const PolarContour init = init_circle(Point{32, 32}, 12.0, 60, 31.0);
    SolverConfig cfg;
    cfg.max_iters = 50;
    const auto [c1, t1] = evolve(ls, init, cfg);
    const auto [c2, t2] = evolve(ls, init, cfg);
    REQUIRE(t1.iterations.size() == t2.iterations.size());
    for (std::size_t i = 0; i < 60; ++i) CHECK(c1.radii()[i] == c2.radii()[i]);
    for (std::size_t k = 0; k < t1.iterations.size(); ++k)
        CHECK(t1.iterations[k].energy.total() == t2.iterations[k].energy.total());
}

TEST_CASE("energy is non-increasing across accepted iterations") {
    std::mt19937 rng(400);
    for (int trial = 0; trial < 5; ++trial) {
        const auto ls = smooth_random_landscape(64, 64, rng);
        const PolarContour init = init_circle(Point{32, 32}, 12.0, 60, 31.0);
        SolverConfig cfg;
        cfg.max_iters = 100;
        const auto [c, trace] = evolve(ls, init, cfg);
        for (std::size_t k = 1; k < trace.iterations.size(); ++k)
            CHECK(trace.iterations[k].energy.total() <=
                  trace.iterations[k - 1].energy.total());
    }
}

TEST_CASE("a converged interior solution barely moves under one more step") {
    ShapeSpec shape;
    shape.kind = ShapeSpec::Kind::disk;
    shape.h = shape.w = 64;
    shape.center = Point{31.5, 31.5};
    shape.radius = 18.0;
    const auto ls = synth_landscape(shape, 1.0, 0.2, 0.1, 2.0);

    SolverConfig cfg;
    cfg.tol_rho = 1e-12;
    cfg.max_iters = 5000;
    cfg.rho_floor = 0.5;
    const PolarContour init = init_circle(Point{31.5, 31.5}, 12.0, 40, 30.0);
    const auto [star, trace] = evolve(ls, init, cfg);
    REQUIRE(trace.converged);
    // No clamp active at the solution.
    for (double r : star.radii()) {
        REQUIRE(r > cfg.rho_floor + 1e-6);
        REQUIRE(r < star.rho_max() - 1e-6);
    }
    SolverConfig one = cfg;
    one.max_iters = 1;
    const auto [next, t2] = evolve(ls, star, one);
    for (std::size_t i = 0; i < star.vertex_count(); ++i)
        CHECK(std::abs(next.radii()[i] - star.radii()[i]) < 1e-9);
}

TEST_CASE("evolution commutes with 90-degree grid rotation") {
    // Asymmetric polygon landscape on a square grid.
    const int n = 64;
    ShapeSpec shape;
    shape.kind = ShapeSpec::Kind::polygon;
    shape.h = shape.w = n;
    shape.vertices = {{18, 14}, {48, 20}, {52, 40}, {34, 52}, {14, 42}};
    const auto ls = synth_landscape(shape, 1.0, 0.2, 0.3, 1.0);

    // Rotate every plane by +90 degrees: (x, y) -> (n-1-y, x).
    auto rotate_plane = [n](const std::vector<double>& f) {
        std::vector<double> out(f.size());
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x) {
                const int xr = n - 1 - y, yr = x;
                out[static_cast<std::size_t>(yr) * n + xr] =
                    f[static_cast<std::size_t>(y) * n + x];
            }
        return out;
    };
    const EnergyLandscape ls_rot(n, n, rotate_plane(ls.d()), rotate_plane(ls.beta()),
                                 rotate_plane(ls.kappa()));

    const std::size_t L = 60;  // divisible by 4
    const Point c0{31.5, 31.5};
    const Point c0_rot{n - 1 - c0.y, c0.x};
    SolverConfig cfg;
    cfg.max_iters = 200;
    const auto [f1, t1] = evolve(ls, init_circle(c0, 10.0, L, 30.0), cfg);
    const auto [f2, t2] = evolve(ls_rot, init_circle(c0_rot, 10.0, L, 30.0), cfg);

    for (std::size_t i = 0; i < L; ++i) {
        const std::size_t j = (i + L - L / 4) % L;  // rotated index
        CHECK(f2.radii()[i] == Approx(f1.radii()[j]).margin(1e-3));
    }
}

TEST_CASE("non-finite energy raises numerical_failure") {
    const double huge = 1e308;
    const auto ls = constant_landscape(32, 32, huge, 0.0, 0.0);
    const PolarContour init = init_circle(Point{16, 16}, 8.0, 60, 15.0);
    CHECK_THROWS_AS(evolve(ls, init, SolverConfig{}), numerical_failure);
}

TEST_CASE("solver config validation") {
    SolverConfig cfg;
    cfg.max_iters = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SolverConfig{};
    cfg.step_gamma = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
