#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/transform.hpp"

namespace rgbdmeas {

namespace detail {

// Clamped uniform knot vector: degree+1 repeats at each end, uniform interior.
inline std::vector<double> clamped_uniform_knots(int n_ctrl, int degree) {
    if (n_ctrl < degree + 1) throw InputError("clamped_uniform_knots: need n_ctrl >= degree + 1");
    const int n_knots = n_ctrl + degree + 1;
    std::vector<double> knots(static_cast<std::size_t>(n_knots));
    const int n_spans = n_ctrl - degree;  // interior spans between the clamps
    for (int i = 0; i < n_knots; ++i) {
        if (i <= degree)
            knots[static_cast<std::size_t>(i)] = 0.0;
        else if (i >= n_ctrl)
            knots[static_cast<std::size_t>(i)] = 1.0;
        else
            knots[static_cast<std::size_t>(i)] = static_cast<double>(i - degree) / n_spans;
    }
    return knots;
}

// Knot span index such that knots[span] <= u < knots[span+1], with the top
// clamp mapped into the last nonempty span.
inline int find_span(const std::vector<double>& knots, int degree, int n_ctrl, double u) {
    if (u >= knots[static_cast<std::size_t>(n_ctrl)]) return n_ctrl - 1;
    if (u <= knots[static_cast<std::size_t>(degree)]) return degree;
    int lo = degree, hi = n_ctrl;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (u < knots[static_cast<std::size_t>(mid)])
            hi = mid;
        else
            lo = mid;
    }
    return lo;
}

// The degree+1 basis functions that are nonzero on the span, by the standard
// triangular recurrence. out[j] = N_{span-degree+j, degree}(u).
inline void basis_functions(const std::vector<double>& knots, int span, double u, int degree,
                            std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(degree) + 1, 0.0);
    std::vector<double> left(static_cast<std::size_t>(degree) + 1),
        right(static_cast<std::size_t>(degree) + 1);
    out[0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        left[static_cast<std::size_t>(j)] = u - knots[static_cast<std::size_t>(span + 1 - j)];
        right[static_cast<std::size_t>(j)] = knots[static_cast<std::size_t>(span + j)] - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double denom = right[static_cast<std::size_t>(r + 1)] +
                                 left[static_cast<std::size_t>(j - r)];
            const double temp = denom != 0.0 ? out[static_cast<std::size_t>(r)] / denom : 0.0;
            out[static_cast<std::size_t>(r)] =
                saved + right[static_cast<std::size_t>(r + 1)] * temp;
            saved = left[static_cast<std::size_t>(j - r)] * temp;
        }
        out[static_cast<std::size_t>(j)] = saved;
    }
}

// Basis functions and derivatives up to n_ders. ders[d][j] is the d-th
// derivative of the j-th nonzero basis function.
inline void basis_function_derivatives(const std::vector<double>& knots, int span, double u,
                                       int degree, int n_ders,
                                       std::vector<std::vector<double>>& ders) {
    const auto p = static_cast<std::size_t>(degree);
    std::vector<std::vector<double>> ndu(p + 1, std::vector<double>(p + 1, 0.0));
    std::vector<double> left(p + 1), right(p + 1);
    ndu[0][0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        left[static_cast<std::size_t>(j)] = u - knots[static_cast<std::size_t>(span + 1 - j)];
        right[static_cast<std::size_t>(j)] = knots[static_cast<std::size_t>(span + j)] - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)] =
                right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)];
            const double temp =
                ndu[static_cast<std::size_t>(r)][static_cast<std::size_t>(j - 1)] /
                ndu[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)];
            ndu[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] =
                saved + right[static_cast<std::size_t>(r + 1)] * temp;
            saved = left[static_cast<std::size_t>(j - r)] * temp;
        }
        ndu[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] = saved;
    }

    const int nd = std::min(n_ders, degree);
    ders.assign(static_cast<std::size_t>(n_ders) + 1, std::vector<double>(p + 1, 0.0));
    for (std::size_t j = 0; j <= p; ++j) ders[0][j] = ndu[j][p];

    std::vector<std::vector<double>> a(2, std::vector<double>(p + 1, 0.0));
    for (int r = 0; r <= degree; ++r) {
        int s1 = 0, s2 = 1;
        a[0][0] = 1.0;
        for (int k = 1; k <= nd; ++k) {
            double d = 0.0;
            const int rk = r - k;
            const int pk = degree - k;
            if (r >= k) {
                a[static_cast<std::size_t>(s2)][0] =
                    a[static_cast<std::size_t>(s1)][0] /
                    ndu[static_cast<std::size_t>(pk + 1)][static_cast<std::size_t>(rk)];
                d = a[static_cast<std::size_t>(s2)][0] *
                    ndu[static_cast<std::size_t>(rk)][static_cast<std::size_t>(pk)];
            }
            const int j1 = rk >= -1 ? 1 : -rk;
            const int j2 = r - 1 <= pk ? k - 1 : degree - r;
            for (int j = j1; j <= j2; ++j) {
                a[static_cast<std::size_t>(s2)][static_cast<std::size_t>(j)] =
                    (a[static_cast<std::size_t>(s1)][static_cast<std::size_t>(j)] -
                     a[static_cast<std::size_t>(s1)][static_cast<std::size_t>(j - 1)]) /
                    ndu[static_cast<std::size_t>(pk + 1)][static_cast<std::size_t>(rk + j)];
                d += a[static_cast<std::size_t>(s2)][static_cast<std::size_t>(j)] *
                     ndu[static_cast<std::size_t>(rk + j)][static_cast<std::size_t>(pk)];
            }
            if (r <= pk) {
                a[static_cast<std::size_t>(s2)][static_cast<std::size_t>(k)] =
                    -a[static_cast<std::size_t>(s1)][static_cast<std::size_t>(k - 1)] /
                    ndu[static_cast<std::size_t>(pk + 1)][static_cast<std::size_t>(r)];
                d += a[static_cast<std::size_t>(s2)][static_cast<std::size_t>(k)] *
                     ndu[static_cast<std::size_t>(r)][static_cast<std::size_t>(pk)];
            }
            ders[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)] = d;
            std::swap(s1, s2);
        }
    }
    double factor = degree;
    for (int k = 1; k <= nd; ++k) {
        for (std::size_t j = 0; j <= p; ++j) ders[static_cast<std::size_t>(k)][j] *= factor;
        factor *= degree - k;
    }
}

}  // namespace detail

// Tensor-product B-spline surface over [0,1]^2 with clamped knot vectors and
// a data-support trim mask on a uniform evaluation grid. Control points are
// stored row-major: control[i * nv + j] pairs basis i along u with j along v.
struct BsplineSurface {
    int degree_u = 3;
    int degree_v = 3;
    std::vector<double> knots_u;
    std::vector<double> knots_v;
    int nu = 0;  // control count along u; nu == knots_u.size() - degree_u - 1
    int nv = 0;
    std::vector<Vec3> control;
    // trim_mask[cu * trim_nv + cv] covers the uniform parameter cell
    // [cu/trim_nu, (cu+1)/trim_nu) x [cv/trim_nv, (cv+1)/trim_nv).
    int trim_nu = 0;
    int trim_nv = 0;
    std::vector<std::uint8_t> trim_mask;

    void validate() const {
        if (degree_u < 1 || degree_v < 1) throw InputError("BsplineSurface: degree must be >= 1");
        if (nu != static_cast<int>(knots_u.size()) - degree_u - 1 ||
            nv != static_cast<int>(knots_v.size()) - degree_v - 1)
            throw InputError("BsplineSurface: knot count does not match control count");
        if (nu < degree_u + 1 || nv < degree_v + 1)
            throw InputError("BsplineSurface: too few control points for the degree");
        if (control.size() != static_cast<std::size_t>(nu) * static_cast<std::size_t>(nv))
            throw InputError("BsplineSurface: control grid size mismatch");
        if (!std::is_sorted(knots_u.begin(), knots_u.end()) ||
            !std::is_sorted(knots_v.begin(), knots_v.end()))
            throw InputError("BsplineSurface: knots must be nondecreasing");
        for (int i = 0; i <= degree_u; ++i) {
            if (knots_u[static_cast<std::size_t>(i)] != knots_u.front() ||
                knots_u[knots_u.size() - 1 - static_cast<std::size_t>(i)] != knots_u.back())
                throw InputError("BsplineSurface: knots_u not clamped");
        }
        for (int i = 0; i <= degree_v; ++i) {
            if (knots_v[static_cast<std::size_t>(i)] != knots_v.front() ||
                knots_v[knots_v.size() - 1 - static_cast<std::size_t>(i)] != knots_v.back())
                throw InputError("BsplineSurface: knots_v not clamped");
        }
        if (!trim_mask.empty() &&
            trim_mask.size() != static_cast<std::size_t>(trim_nu) * static_cast<std::size_t>(trim_nv))
            throw InputError("BsplineSurface: trim mask size mismatch");
    }

    Vec3 evaluate(double u, double v) const {
        u = std::clamp(u, 0.0, 1.0);
        v = std::clamp(v, 0.0, 1.0);
        const int su = detail::find_span(knots_u, degree_u, nu, u);
        const int sv = detail::find_span(knots_v, degree_v, nv, v);
        std::vector<double> bu, bv;
        detail::basis_functions(knots_u, su, u, degree_u, bu);
        detail::basis_functions(knots_v, sv, v, degree_v, bv);
        Vec3 out = Vec3::Zero();
        for (int i = 0; i <= degree_u; ++i) {
            const int ci = su - degree_u + i;
            for (int j = 0; j <= degree_v; ++j) {
                const int cj = sv - degree_v + j;
                out += bu[static_cast<std::size_t>(i)] * bv[static_cast<std::size_t>(j)] *
                       control[static_cast<std::size_t>(ci) * static_cast<std::size_t>(nv) +
                               static_cast<std::size_t>(cj)];
            }
        }
        return out;
    }

    // Point plus first partial derivatives with respect to u and v.
    void evaluate_with_derivatives(double u, double v, Vec3& point, Vec3& du, Vec3& dv) const {
        u = std::clamp(u, 0.0, 1.0);
        v = std::clamp(v, 0.0, 1.0);
        const int su = detail::find_span(knots_u, degree_u, nu, u);
        const int sv = detail::find_span(knots_v, degree_v, nv, v);
        std::vector<std::vector<double>> bu, bv;
        detail::basis_function_derivatives(knots_u, su, u, degree_u, 1, bu);
        detail::basis_function_derivatives(knots_v, sv, v, degree_v, 1, bv);
        point = du = dv = Vec3::Zero();
        for (int i = 0; i <= degree_u; ++i) {
            const int ci = su - degree_u + i;
            for (int j = 0; j <= degree_v; ++j) {
                const int cj = sv - degree_v + j;
                const Vec3& p = control[static_cast<std::size_t>(ci) * static_cast<std::size_t>(nv) +
                                        static_cast<std::size_t>(cj)];
                point += bu[0][static_cast<std::size_t>(i)] * bv[0][static_cast<std::size_t>(j)] * p;
                du += bu[1][static_cast<std::size_t>(i)] * bv[0][static_cast<std::size_t>(j)] * p;
                dv += bu[0][static_cast<std::size_t>(i)] * bv[1][static_cast<std::size_t>(j)] * p;
            }
        }
    }

    static int uniform_cell(double t, int cells) {
        const int c = static_cast<int>(std::clamp(t, 0.0, 1.0) * cells);
        return std::min(c, cells - 1);
    }

    // An empty trim mask means the whole parameter square is supported.
    bool cell_supported(double u, double v) const {
        if (trim_mask.empty()) return true;
        const int cu = uniform_cell(u, trim_nu);
        const int cv = uniform_cell(v, trim_nv);
        return trim_mask[static_cast<std::size_t>(cu) * static_cast<std::size_t>(trim_nv) +
                         static_cast<std::size_t>(cv)] != 0;
    }
};

}  // namespace rgbdmeas
