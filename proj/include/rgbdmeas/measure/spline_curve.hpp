#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/transform.hpp"
#include "rgbdmeas/labeling/boundary.hpp"

namespace rgbdmeas {

namespace detail {

// Cyclic tridiagonal solve via Sherman-Morrison over the Thomas algorithm.
// Row i reads sub[i]*x[i-1] + diag[i]*x[i] + sup[i]*x[i+1] = rhs[i] with
// wrap-around indices. The spline system is strictly diagonally dominant,
// which both solves rely on.
inline Eigen::VectorXd solve_cyclic_tridiagonal(const Eigen::VectorXd& sub,
                                                const Eigen::VectorXd& diag,
                                                const Eigen::VectorXd& sup,
                                                const Eigen::VectorXd& rhs) {
    const int n = static_cast<int>(diag.size());
    const double gamma = -diag(0);
    Eigen::VectorXd mod_diag = diag;
    mod_diag(0) = diag(0) - gamma;
    mod_diag(n - 1) = diag(n - 1) - sub(0) * sup(n - 1) / gamma;

    const auto thomas = [&](const Eigen::VectorXd& d) {
        Eigen::VectorXd c(n), x(n);
        c(0) = sup(0) / mod_diag(0);
        x(0) = d(0) / mod_diag(0);
        for (int i = 1; i < n; ++i) {
            const double denom = mod_diag(i) - sub(i) * c(i - 1);
            c(i) = i < n - 1 ? sup(i) / denom : 0.0;
            x(i) = (d(i) - sub(i) * x(i - 1)) / denom;
        }
        for (int i = n - 2; i >= 0; --i) x(i) -= c(i) * x(i + 1);
        return x;
    };

    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    u(0) = gamma;
    u(n - 1) = sup(n - 1);
    const Eigen::VectorXd y = thomas(rhs);
    const Eigen::VectorXd z = thomas(u);
    const double vy = y(0) + sub(0) / gamma * y(n - 1);
    const double vz = z(0) + sub(0) / gamma * z(n - 1);
    return y - z * (vy / (1.0 + vz));
}

}  // namespace detail

// Closed C2 cubic spline interpolating a loop of 3D points with chord-length
// parameterization. Second derivatives come from the periodic tridiagonal
// system; evaluation uses the standard two-point Hermite-style form.
class PeriodicCubicSpline {
public:
    explicit PeriodicCubicSpline(const std::vector<Vec3>& points) : points_(points) {
        const int n = static_cast<int>(points_.size());
        if (n < 3) throw InputError("PeriodicCubicSpline: need at least 3 points");
        chords_.resize(static_cast<std::size_t>(n));
        knots_.resize(static_cast<std::size_t>(n) + 1);
        knots_[0] = 0.0;
        for (int i = 0; i < n; ++i) {
            chords_[static_cast<std::size_t>(i)] =
                (points_[static_cast<std::size_t>((i + 1) % n)] - points_[static_cast<std::size_t>(i)])
                    .norm();
            if (chords_[static_cast<std::size_t>(i)] == 0.0)
                throw InputError("PeriodicCubicSpline: repeated consecutive point");
            knots_[static_cast<std::size_t>(i) + 1] =
                knots_[static_cast<std::size_t>(i)] + chords_[static_cast<std::size_t>(i)];
        }

        Eigen::VectorXd sub(n), diag(n), sup(n);
        Eigen::MatrixXd rhs(n, 3);
        for (int i = 0; i < n; ++i) {
            const double h_prev = chords_[static_cast<std::size_t>((i + n - 1) % n)];
            const double h_next = chords_[static_cast<std::size_t>(i)];
            sub(i) = h_prev / 6.0;
            diag(i) = (h_prev + h_next) / 3.0;
            sup(i) = h_next / 6.0;
            const Vec3 fwd = (points_[static_cast<std::size_t>((i + 1) % n)] -
                              points_[static_cast<std::size_t>(i)]) /
                             h_next;
            const Vec3 bwd = (points_[static_cast<std::size_t>(i)] -
                              points_[static_cast<std::size_t>((i + n - 1) % n)]) /
                             h_prev;
            rhs.row(i) = (fwd - bwd).transpose();
        }
        second_.resize(static_cast<std::size_t>(n));
        for (int c = 0; c < 3; ++c) {
            const Eigen::VectorXd m = detail::solve_cyclic_tridiagonal(sub, diag, sup, rhs.col(c));
            for (int i = 0; i < n; ++i) second_[static_cast<std::size_t>(i)][c] = m(i);
        }
    }

    double total_parameter() const { return knots_.back(); }

    Vec3 evaluate(double t) const {
        const auto [i, s, h] = locate(t);
        const Vec3& p0 = points_[static_cast<std::size_t>(i)];
        const Vec3& p1 = points_[(static_cast<std::size_t>(i) + 1) % points_.size()];
        const Vec3& m0 = second_[static_cast<std::size_t>(i)];
        const Vec3& m1 = second_[(static_cast<std::size_t>(i) + 1) % points_.size()];
        const double a = h - s;
        return m0 * (a * a * a) / (6.0 * h) + m1 * (s * s * s) / (6.0 * h) +
               (p0 - m0 * (h * h) / 6.0) * (a / h) + (p1 - m1 * (h * h) / 6.0) * (s / h);
    }

    Vec3 derivative(double t) const {
        const auto [i, s, h] = locate(t);
        const Vec3& p0 = points_[static_cast<std::size_t>(i)];
        const Vec3& p1 = points_[(static_cast<std::size_t>(i) + 1) % points_.size()];
        const Vec3& m0 = second_[static_cast<std::size_t>(i)];
        const Vec3& m1 = second_[(static_cast<std::size_t>(i) + 1) % points_.size()];
        const double a = h - s;
        return -m0 * (a * a) / (2.0 * h) + m1 * (s * s) / (2.0 * h) + (p1 - p0) / h -
               (m1 - m0) * h / 6.0;
    }

    // Arc length by adaptive 5-point Gauss-Legendre. Every knot span starts
    // with panels_per_span panels; each panel bisects until the halved
    // estimate agrees to rel_tol.
    double arc_length(int panels_per_span, double rel_tol) const {
        if (panels_per_span < 1)
            throw InputError("PeriodicCubicSpline: panels_per_span must be positive");
        if (!(rel_tol > 0.0)) throw InputError("PeriodicCubicSpline: rel_tol must be positive");
        double total = 0.0;
        const int n = static_cast<int>(points_.size());
        for (int i = 0; i < n; ++i) {
            const double a = knots_[static_cast<std::size_t>(i)];
            const double b = knots_[static_cast<std::size_t>(i) + 1];
            for (int p = 0; p < panels_per_span; ++p) {
                const double lo = a + (b - a) * p / panels_per_span;
                const double hi = a + (b - a) * (p + 1) / panels_per_span;
                total += adaptive_panel(lo, hi, rel_tol, 0);
            }
        }
        return total;
    }

private:
    std::tuple<int, double, double> locate(double t) const {
        const double period = knots_.back();
        double w = std::fmod(t, period);
        if (w < 0.0) w += period;
        const auto it = std::upper_bound(knots_.begin(), knots_.end(), w);
        int i = static_cast<int>(it - knots_.begin()) - 1;
        i = std::clamp(i, 0, static_cast<int>(points_.size()) - 1);
        return {i, w - knots_[static_cast<std::size_t>(i)], chords_[static_cast<std::size_t>(i)]};
    }

    double speed_integral(double lo, double hi) const {
        static constexpr double kNode[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                            0.5384693101056831, 0.9061798459386640};
        static constexpr double kWeight[5] = {0.2369268850561891, 0.4786286704993665,
                                              0.5688888888888889, 0.4786286704993665,
                                              0.2369268850561891};
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        double sum = 0.0;
        for (int k = 0; k < 5; ++k) sum += kWeight[k] * derivative(mid + half * kNode[k]).norm();
        return sum * half;
    }

    double adaptive_panel(double lo, double hi, double rel_tol, int depth) const {
        const double whole = speed_integral(lo, hi);
        const double mid = 0.5 * (lo + hi);
        const double halves = speed_integral(lo, mid) + speed_integral(mid, hi);
        if (depth >= 28 || std::abs(halves - whole) <= rel_tol * std::abs(halves)) return halves;
        return adaptive_panel(lo, mid, rel_tol, depth + 1) +
               adaptive_panel(mid, hi, rel_tol, depth + 1);
    }

    std::vector<Vec3> points_;
    std::vector<double> chords_;
    std::vector<double> knots_;
    std::vector<Vec3> second_;
};

// Arc length of the closed cubic spline through the loop vertices. The
// sample budget sets the initial quadrature resolution; refinement then
// converges each panel to a relative 1e-6.
inline double perimeter(const BoundaryLoop& loop, long samples) {
    loop.validate();
    const long count = static_cast<long>(loop.size());
    if (samples < 10 * count)
        throw InputError("perimeter: samples must be at least 10 times the loop vertex count");
    const PeriodicCubicSpline spline(loop.vertices);
    const int panels = static_cast<int>((samples + count - 1) / count);
    return spline.arc_length(panels, 1e-6);
}

}  // namespace rgbdmeas
