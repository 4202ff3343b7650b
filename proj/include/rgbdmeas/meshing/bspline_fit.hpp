#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <utility>
#include <vector>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/point_cloud.hpp"
#include "rgbdmeas/meshing/bspline.hpp"

namespace rgbdmeas {

struct BsplineFitStats {
    // Regularized objective (data SSE + smoothness * bending) after each
    // solve; nonincreasing across re-projection iterations by construction.
    std::vector<double> objective;
    std::vector<double> rms_residual_mm;
    int foldover_cells = 0;
};

namespace detail {

struct SurfaceParams {
    std::vector<double> u, v;
};

// One guarded Gauss-Newton descent of ||S(u,v) - x||^2 over (u,v) in [0,1]^2.
inline void reproject_point(const BsplineSurface& surface, const Vec3& x, double& u, double& v) {
    Vec3 s, su, sv;
    for (int step = 0; step < 5; ++step) {
        surface.evaluate_with_derivatives(u, v, s, su, sv);
        const Vec3 r = s - x;
        Eigen::Vector2d grad(su.dot(r), sv.dot(r));
        Eigen::Matrix2d h;
        h << su.dot(su), su.dot(sv), su.dot(sv), sv.dot(sv);
        h.diagonal().array() += 1e-12;
        Eigen::Vector2d delta = -h.ldlt().solve(grad);
        if (!delta.allFinite()) return;
        const double err = r.squaredNorm();
        bool accepted = false;
        for (int halving = 0; halving < 5; ++halving) {
            const double cu = std::clamp(u + delta.x(), 0.0, 1.0);
            const double cv = std::clamp(v + delta.y(), 0.0, 1.0);
            if ((surface.evaluate(cu, cv) - x).squaredNorm() < err) {
                u = cu;
                v = cv;
                accepted = true;
                break;
            }
            delta *= 0.5;
        }
        if (!accepted) return;
    }
}

// Greville abscissae: averages of degree consecutive interior knots. The
// control grid placed at these parameters reproduces linear functions.
inline std::vector<double> greville_abscissae(const std::vector<double>& knots, int degree,
                                              int n_ctrl) {
    std::vector<double> out(static_cast<std::size_t>(n_ctrl), 0.0);
    for (int i = 0; i < n_ctrl; ++i) {
        double s = 0.0;
        for (int j = 1; j <= degree; ++j) s += knots[static_cast<std::size_t>(i + j)];
        out[static_cast<std::size_t>(i)] = s / degree;
    }
    return out;
}

// Thin-plate bending energy discretized by second differences:
// ||D_uu||^2 + 2 ||D_uv||^2 + ||D_vv||^2, assembled as R^T R. The penalty is
// applied to the displacement of the control grid from its PCA-plane
// initialization, so exactly planar data incurs no penalty at all.
inline Eigen::MatrixXd bending_matrix(int nu, int nv) {
    const int m = nu * nv;
    Eigen::MatrixXd rtr = Eigen::MatrixXd::Zero(m, m);
    auto idx = [nv](int i, int j) { return i * nv + j; };
    auto add_row = [&](const std::vector<std::pair<int, double>>& row) {
        for (const auto& [ia, wa] : row)
            for (const auto& [ib, wb] : row) rtr(ia, ib) += wa * wb;
    };
    for (int i = 1; i + 1 < nu; ++i)
        for (int j = 0; j < nv; ++j)
            add_row({{idx(i - 1, j), 1.0}, {idx(i, j), -2.0}, {idx(i + 1, j), 1.0}});
    for (int i = 0; i < nu; ++i)
        for (int j = 1; j + 1 < nv; ++j)
            add_row({{idx(i, j - 1), 1.0}, {idx(i, j), -2.0}, {idx(i, j + 1), 1.0}});
    const double w = std::sqrt(2.0);
    for (int i = 0; i + 1 < nu; ++i)
        for (int j = 0; j + 1 < nv; ++j)
            add_row({{idx(i, j), w}, {idx(i + 1, j), -w}, {idx(i, j + 1), -w},
                     {idx(i + 1, j + 1), w}});
    return rtr;
}

// Least-squares control points for fixed parameters, regularized toward the
// initialization grid x0. Throws when the normal matrix is numerically
// singular.
inline void solve_controls(BsplineSurface& surface, const PointCloud& cloud,
                           const SurfaceParams& params, double smoothness,
                           const Eigen::MatrixXd& rtr, const Eigen::MatrixXd& x0) {
    const int m = surface.nu * surface.nv;
    Eigen::MatrixXd ata = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd atb = Eigen::MatrixXd::Zero(m, 3);
    std::vector<double> bu, bv;
    std::vector<int> indices;
    std::vector<double> weights;
    const int du = surface.degree_u, dv = surface.degree_v;
    indices.reserve(static_cast<std::size_t>((du + 1) * (dv + 1)));
    weights.reserve(indices.capacity());

    for (std::size_t k = 0; k < cloud.size(); ++k) {
        const double u = params.u[k], v = params.v[k];
        const int su = detail::find_span(surface.knots_u, du, surface.nu, u);
        const int sv = detail::find_span(surface.knots_v, dv, surface.nv, v);
        detail::basis_functions(surface.knots_u, su, u, du, bu);
        detail::basis_functions(surface.knots_v, sv, v, dv, bv);
        indices.clear();
        weights.clear();
        for (int i = 0; i <= du; ++i)
            for (int j = 0; j <= dv; ++j) {
                indices.push_back((su - du + i) * surface.nv + (sv - dv + j));
                weights.push_back(bu[static_cast<std::size_t>(i)] *
                                  bv[static_cast<std::size_t>(j)]);
            }
        for (std::size_t a = 0; a < indices.size(); ++a) {
            atb.row(indices[a]) += weights[a] * cloud.points[k].transpose();
            for (std::size_t b = 0; b < indices.size(); ++b)
                ata(indices[a], indices[b]) += weights[a] * weights[b];
        }
    }

    Eigen::MatrixXd normal = ata;
    if (smoothness > 0.0) {
        normal += smoothness * rtr;
        atb += smoothness * rtr * x0;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal);
    const double max_eig = eig.eigenvalues().maxCoeff();
    const double min_eig = eig.eigenvalues().minCoeff();
    if (!(max_eig > 0.0) || min_eig <= 1e-10 * max_eig)
        throw IncreaseSmoothnessError(
            "fit_bspline_surface: normal system is singular; raise the smoothness weight or "
            "reduce the control grid");
    Eigen::MatrixXd x = eig.eigenvectors() *
                        (eig.eigenvalues().array().inverse().matrix().asDiagonal() *
                         (eig.eigenvectors().transpose() * atb));
    for (int i = 0; i < m; ++i)
        surface.control[static_cast<std::size_t>(i)] = x.row(i).transpose();
}

inline double fit_objective(const BsplineSurface& surface, const PointCloud& cloud,
                            const SurfaceParams& params, double smoothness,
                            const Eigen::MatrixXd& rtr, const Eigen::MatrixXd& x0,
                            double& rms_out) {
    double sse = 0.0;
    for (std::size_t k = 0; k < cloud.size(); ++k)
        sse += (surface.evaluate(params.u[k], params.v[k]) - cloud.points[k]).squaredNorm();
    rms_out = std::sqrt(sse / static_cast<double>(cloud.size()));
    double bending = 0.0;
    if (smoothness > 0.0) {
        const int m = surface.nu * surface.nv;
        Eigen::MatrixXd x(m, 3);
        for (int i = 0; i < m; ++i)
            x.row(i) = surface.control[static_cast<std::size_t>(i)].transpose();
        const Eigen::MatrixXd d = x - x0;
        bending = (d.transpose() * rtr * d).trace();
    }
    return sse + smoothness * bending;
}

}  // namespace detail

// Fits a clamped tensor-product B-spline surface: PCA parameterization,
// regularized linear least squares, then closest-point parameter refinement
// repeated `iterations` times. The trim mask records data support on a
// uniform evaluation grid.
inline BsplineSurface fit_bspline_surface(const PointCloud& cloud,
                                          std::pair<int, int> grid = {16, 16},
                                          std::pair<int, int> degree = {3, 3},
                                          double smoothness = 1e-2, int iterations = 2,
                                          BsplineFitStats* stats = nullptr) {
    const auto [nu, nv] = grid;
    const auto [du, dv] = degree;
    if (du < 1 || dv < 1) throw InputError("fit_bspline_surface: degree must be >= 1");
    if (nu < du + 1 || nv < dv + 1)
        throw InputError("fit_bspline_surface: control grid must be at least degree + 1");
    if (smoothness < 0.0) throw InputError("fit_bspline_surface: smoothness must be >= 0");
    if (iterations < 0) throw InputError("fit_bspline_surface: iterations must be >= 0");
    if (cloud.size() < static_cast<std::size_t>(nu) * static_cast<std::size_t>(nv))
        throw InputError("fit_bspline_surface: fewer points than control points");

    const auto n = cloud.size();
    Vec3 mean = Vec3::Zero();
    for (const Vec3& p : cloud.points) mean += p;
    mean /= static_cast<double>(n);
    Mat3 cov = Mat3::Zero();
    for (const Vec3& p : cloud.points) {
        const Vec3 d = p - mean;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat3> pca(cov);
    const Vec3 axis_u = pca.eigenvectors().col(2);  // largest spread
    const Vec3 axis_v = pca.eigenvectors().col(1);
    const Vec3 axis_n = pca.eigenvectors().col(0);

    detail::SurfaceParams params;
    params.u.resize(n);
    params.v.resize(n);
    std::vector<double> depth(n);
    double a_min = 1e300, a_max = -1e300, b_min = 1e300, b_max = -1e300;
    for (std::size_t k = 0; k < n; ++k) {
        const Vec3 d = cloud.points[k] - mean;
        params.u[k] = d.dot(axis_u);
        params.v[k] = d.dot(axis_v);
        depth[k] = d.dot(axis_n);
        a_min = std::min(a_min, params.u[k]);
        a_max = std::max(a_max, params.u[k]);
        b_min = std::min(b_min, params.v[k]);
        b_max = std::max(b_max, params.v[k]);
    }
    const double a_range = std::max(a_max - a_min, 1e-12);
    const double b_range = std::max(b_max - b_min, 1e-12);
    for (std::size_t k = 0; k < n; ++k) {
        params.u[k] = (params.u[k] - a_min) / a_range;
        params.v[k] = (params.v[k] - b_min) / b_range;
    }

    BsplineSurface surface;
    surface.degree_u = du;
    surface.degree_v = dv;
    surface.nu = nu;
    surface.nv = nv;
    surface.knots_u = detail::clamped_uniform_knots(nu, du);
    surface.knots_v = detail::clamped_uniform_knots(nv, dv);
    surface.control.assign(static_cast<std::size_t>(nu) * static_cast<std::size_t>(nv),
                           Vec3::Zero());

    // Initialization on the PCA plane at Greville parameters; by linear
    // precision the initial surface maps (u,v) affinely onto the data's
    // bounding rectangle in the plane.
    const std::vector<double> grev_u = detail::greville_abscissae(surface.knots_u, du, nu);
    const std::vector<double> grev_v = detail::greville_abscissae(surface.knots_v, dv, nv);
    Eigen::MatrixXd x0(nu * nv, 3);
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            const Vec3 p = mean + axis_u * (a_min + grev_u[static_cast<std::size_t>(i)] * a_range) +
                           axis_v * (b_min + grev_v[static_cast<std::size_t>(j)] * b_range);
            x0.row(i * nv + j) = p.transpose();
            surface.control[static_cast<std::size_t>(i * nv + j)] = p;
        }

    const Eigen::MatrixXd rtr = detail::bending_matrix(nu, nv);
    auto record = [&]() {
        if (!stats) return;
        double rms = 0.0;
        stats->objective.push_back(
            detail::fit_objective(surface, cloud, params, smoothness, rtr, x0, rms));
        stats->rms_residual_mm.push_back(rms);
    };

    detail::solve_controls(surface, cloud, params, smoothness, rtr, x0);
    record();
    for (int it = 0; it < iterations; ++it) {
        for (std::size_t k = 0; k < n; ++k)
            detail::reproject_point(surface, cloud.points[k], params.u[k], params.v[k]);
        detail::solve_controls(surface, cloud, params, smoothness, rtr, x0);
        record();
    }

    // Trim and sanity statistics live on a uniform evaluation grid whose
    // resolution tracks the data density, so a full cell holds several points.
    const int trim_res = std::min(
        64, std::max(4, static_cast<int>(std::floor(std::sqrt(static_cast<double>(n)) / 2.0))));
    const int trim_nu = trim_res;
    const int trim_nv = trim_res;
    const auto n_cells = static_cast<std::size_t>(trim_nu) * static_cast<std::size_t>(trim_nv);
    std::vector<double> cell_min(n_cells, 1e300);
    std::vector<double> cell_max(n_cells, -1e300);
    std::vector<int> cell_count(n_cells, 0);
    for (std::size_t k = 0; k < n; ++k) {
        const int cu = BsplineSurface::uniform_cell(params.u[k], trim_nu);
        const int cv = BsplineSurface::uniform_cell(params.v[k], trim_nv);
        const auto c = static_cast<std::size_t>(cu) * static_cast<std::size_t>(trim_nv) +
                       static_cast<std::size_t>(cv);
        cell_min[c] = std::min(cell_min[c], depth[k]);
        cell_max[c] = std::max(cell_max[c], depth[k]);
        ++cell_count[c];
    }

    // Height-field sanity: a cell whose depth spread dwarfs the median spread
    // indicates fold-over; the fit still proceeds.
    std::vector<double> spreads;
    for (std::size_t c = 0; c < n_cells; ++c)
        if (cell_count[c] >= 2) spreads.push_back(cell_max[c] - cell_min[c]);
    if (!spreads.empty()) {
        std::vector<double> sorted = spreads;
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2),
                         sorted.end());
        const double median = sorted[sorted.size() / 2];
        int foldover = 0;
        for (double s : spreads)
            if (median > 0.0 && s > 10.0 * median) ++foldover;
        if (stats) stats->foldover_cells = foldover;
        if (foldover > 0)
            std::cerr << "fit_bspline_surface: fold-over warning, " << foldover
                      << " parameter cell(s) with depth spread > 10x median\n";
    }

    // A cell counts as supported when it holds at least half the median count
    // of the occupied cells; boundary cells covering less than half their area
    // then drop out, which keeps the trimmed area an unbiased estimate of the
    // data footprint.
    std::vector<int> occupied;
    for (std::size_t c = 0; c < n_cells; ++c)
        if (cell_count[c] > 0) occupied.push_back(cell_count[c]);
    int threshold = 1;
    if (!occupied.empty()) {
        std::nth_element(occupied.begin(), occupied.begin() + static_cast<long>(occupied.size() / 2),
                         occupied.end());
        threshold = std::max(1, occupied[occupied.size() / 2] / 2);
    }
    surface.trim_nu = trim_nu;
    surface.trim_nv = trim_nv;
    surface.trim_mask.assign(n_cells, 0);
    for (std::size_t c = 0; c < n_cells; ++c)
        if (cell_count[c] >= threshold) surface.trim_mask[c] = 1;

    surface.validate();
    return surface;
}

}  // namespace rgbdmeas
