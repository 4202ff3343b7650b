#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>

#include "rgbdmeas/core/transform.hpp"

namespace rgbdmeas {
namespace predicates {

// Filtered floating-point predicates with an exact rational fallback. The
// double path computes the determinant together with a forward error bound;
// only when the sign is ambiguous does the rational path run.

using Rational = boost::multiprecision::cpp_rational;

namespace detail {

constexpr double kEps = 1.1102230246251565e-16;  // 2^-53
constexpr double kOrientBound = (7.0 + 56.0 * kEps) * kEps;
constexpr double kInsphereBound = (16.0 + 224.0 * kEps) * kEps;

inline int sign_of(const Rational& r) {
    if (r > 0) return 1;
    if (r < 0) return -1;
    return 0;
}

inline Rational orient3d_exact(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    const Rational adx = Rational(a.x()) - Rational(d.x());
    const Rational ady = Rational(a.y()) - Rational(d.y());
    const Rational adz = Rational(a.z()) - Rational(d.z());
    const Rational bdx = Rational(b.x()) - Rational(d.x());
    const Rational bdy = Rational(b.y()) - Rational(d.y());
    const Rational bdz = Rational(b.z()) - Rational(d.z());
    const Rational cdx = Rational(c.x()) - Rational(d.x());
    const Rational cdy = Rational(c.y()) - Rational(d.y());
    const Rational cdz = Rational(c.z()) - Rational(d.z());
    return adx * (bdy * cdz - bdz * cdy) - ady * (bdx * cdz - bdz * cdx) +
           adz * (bdx * cdy - bdy * cdx);
}

inline Rational insphere_exact(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                               const Vec3& e) {
    Rational m[4][4];
    const Vec3* pts[4] = {&a, &b, &c, &d};
    for (int row = 0; row < 4; ++row) {
        const Rational ex = Rational(pts[row]->x()) - Rational(e.x());
        const Rational ey = Rational(pts[row]->y()) - Rational(e.y());
        const Rational ez = Rational(pts[row]->z()) - Rational(e.z());
        m[row][0] = ex;
        m[row][1] = ey;
        m[row][2] = ez;
        m[row][3] = ex * ex + ey * ey + ez * ez;
    }
    // 4x4 determinant by cofactor expansion over 3x3 minors.
    auto det3 = [&](int r0, int r1, int r2, int c0, int c1, int c2) {
        return m[r0][c0] * (m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]) -
               m[r0][c1] * (m[r1][c0] * m[r2][c2] - m[r1][c2] * m[r2][c0]) +
               m[r0][c2] * (m[r1][c0] * m[r2][c1] - m[r1][c1] * m[r2][c0]);
    };
    return m[0][0] * det3(1, 2, 3, 1, 2, 3) - m[0][1] * det3(1, 2, 3, 0, 2, 3) +
           m[0][2] * det3(1, 2, 3, 0, 1, 3) - m[0][3] * det3(1, 2, 3, 0, 1, 2);
}

}  // namespace detail

// Sign of det [a-d; b-d; c-d]: positive when d lies on the negative side of
// the plane through a, b, c winding counterclockwise (seen from the positive
// side the normal (b-a)x(c-a) points away from d).
inline int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    const double adx = a.x() - d.x(), ady = a.y() - d.y(), adz = a.z() - d.z();
    const double bdx = b.x() - d.x(), bdy = b.y() - d.y(), bdz = b.z() - d.z();
    const double cdx = c.x() - d.x(), cdy = c.y() - d.y(), cdz = c.z() - d.z();

    const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    const double cdxady = cdx * ady, adxcdy = adx * cdy;
    const double adxbdy = adx * bdy, bdxady = bdx * ady;

    const double det = adz * (bdxcdy - cdxbdy) + bdz * (cdxady - adxcdy) + cdz * (adxbdy - bdxady);
    const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * std::abs(adz) +
                             (std::abs(cdxady) + std::abs(adxcdy)) * std::abs(bdz) +
                             (std::abs(adxbdy) + std::abs(bdxady)) * std::abs(cdz);
    const double errbound = detail::kOrientBound * permanent;
    if (det > errbound) return 1;
    if (det < -errbound) return -1;
    return detail::sign_of(detail::orient3d_exact(a, b, c, d));
}

// Sign of the lifted 4x4 determinant. For a tetrahedron with
// orient3d(a,b,c,d) > 0, a positive return means e lies strictly inside the
// circumsphere of (a,b,c,d).
inline int insphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e) {
    const double aex = a.x() - e.x(), aey = a.y() - e.y(), aez = a.z() - e.z();
    const double bex = b.x() - e.x(), bey = b.y() - e.y(), bez = b.z() - e.z();
    const double cex = c.x() - e.x(), cey = c.y() - e.y(), cez = c.z() - e.z();
    const double dex = d.x() - e.x(), dey = d.y() - e.y(), dez = d.z() - e.z();

    const double aexbey = aex * bey, bexaey = bex * aey;
    const double ab = aexbey - bexaey;
    const double bexcey = bex * cey, cexbey = cex * bey;
    const double bc = bexcey - cexbey;
    const double cexdey = cex * dey, dexcey = dex * cey;
    const double cd = cexdey - dexcey;
    const double dexaey = dex * aey, aexdey = aex * dey;
    const double da = dexaey - aexdey;
    const double aexcey = aex * cey, cexaey = cex * aey;
    const double ac = aexcey - cexaey;
    const double bexdey = bex * dey, dexbey = dex * bey;
    const double bd = bexdey - dexbey;

    const double abc = aez * bc - bez * ac + cez * ab;
    const double bcd = bez * cd - cez * bd + dez * bc;
    const double cda = cez * da + dez * ac + aez * cd;
    const double dab = dez * ab + aez * bd + bez * da;

    const double alift = aex * aex + aey * aey + aez * aez;
    const double blift = bex * bex + bey * bey + bez * bez;
    const double clift = cex * cex + cey * cey + cez * cez;
    const double dlift = dex * dex + dey * dey + dez * dez;

    const double det = (dlift * abc - clift * dab) + (blift * cda - alift * bcd);

    const double aezplus = std::abs(aez), bezplus = std::abs(bez);
    const double cezplus = std::abs(cez), dezplus = std::abs(dez);
    const double aexbeyplus = std::abs(aexbey), bexaeyplus = std::abs(bexaey);
    const double bexceyplus = std::abs(bexcey), cexbeyplus = std::abs(cexbey);
    const double cexdeyplus = std::abs(cexdey), dexceyplus = std::abs(dexcey);
    const double dexaeyplus = std::abs(dexaey), aexdeyplus = std::abs(aexdey);
    const double aexceyplus = std::abs(aexcey), cexaeyplus = std::abs(cexaey);
    const double bexdeyplus = std::abs(bexdey), dexbeyplus = std::abs(dexbey);
    const double permanent =
        ((cexdeyplus + dexceyplus) * bezplus + (dexbeyplus + bexdeyplus) * cezplus +
         (bexceyplus + cexbeyplus) * dezplus) *
            alift +
        ((dexaeyplus + aexdeyplus) * cezplus + (aexceyplus + cexaeyplus) * dezplus +
         (cexdeyplus + dexceyplus) * aezplus) *
            blift +
        ((aexbeyplus + bexaeyplus) * dezplus + (bexdeyplus + dexbeyplus) * aezplus +
         (dexaeyplus + aexdeyplus) * bezplus) *
            clift +
        ((bexceyplus + cexbeyplus) * aezplus + (cexaeyplus + aexceyplus) * bezplus +
         (aexbeyplus + bexaeyplus) * cezplus) *
            dlift;
    const double errbound = detail::kInsphereBound * permanent;
    if (det > errbound) return 1;
    if (det < -errbound) return -1;
    return detail::sign_of(detail::insphere_exact(a, b, c, d, e));
}

}  // namespace predicates
}  // namespace rgbdmeas
