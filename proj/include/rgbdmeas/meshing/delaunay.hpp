#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/rng.hpp"
#include "rgbdmeas/meshing/predicates.hpp"

namespace rgbdmeas {

// Tetrahedron in a triangulation. Vertices keep positive orientation
// (orient3d(v0,v1,v2,v3) > 0); neighbor[i] faces the tet across the face
// opposite v[i], -1 at the boundary.
struct DelaunayTet {
    std::array<int, 4> v{-1, -1, -1, -1};
    std::array<int, 4> neighbor{-1, -1, -1, -1};
    bool alive = false;
};

// Face opposite corner i, wound so its normal points away from v[i] when
// the tet is positively oriented.
inline std::array<int, 3> tet_face_opposite(const DelaunayTet& t, int i) {
    switch (i) {
        case 0: return {t.v[1], t.v[3], t.v[2]};
        case 1: return {t.v[0], t.v[2], t.v[3]};
        case 2: return {t.v[0], t.v[3], t.v[1]};
        default: return {t.v[0], t.v[1], t.v[2]};
    }
}

// Incremental Bowyer-Watson Delaunay tetrahedralization with filtered exact
// predicates. Real input points come first; four enclosing super vertices
// are appended and every tet touching them is flagged as artificial.
class DelaunayTriangulation {
  public:
    explicit DelaunayTriangulation(const std::vector<Vec3>& input) : points_(input) {
        if (points_.size() < 4)
            throw InputError("DelaunayTriangulation: need at least 4 points");
        n_real_ = static_cast<int>(points_.size());
        build();
    }

    const std::vector<Vec3>& points() const { return points_; }
    const std::vector<DelaunayTet>& tets() const { return tets_; }
    int real_point_count() const { return n_real_; }

    bool is_real_tet(const DelaunayTet& t) const {
        return t.alive && t.v[0] < n_real_ && t.v[1] < n_real_ && t.v[2] < n_real_ &&
               t.v[3] < n_real_;
    }

    // Circumsphere center and radius; radius is +inf for degenerate tets.
    std::pair<Vec3, double> circumsphere(const DelaunayTet& t) const {
        const Vec3& a = points_[static_cast<std::size_t>(t.v[0])];
        Mat3 m;
        Vec3 rhs;
        for (int i = 0; i < 3; ++i) {
            const Vec3 d = points_[static_cast<std::size_t>(t.v[i + 1])] - a;
            m.row(i) = 2.0 * d.transpose();
            rhs[i] = d.squaredNorm() +
                     2.0 * d.dot(a);  // expands |p|^2 - |a|^2 with p = a + d
        }
        const double det = m.determinant();
        const double scale = m.cwiseAbs().maxCoeff();
        if (std::abs(det) < 1e-12 * scale * scale * scale)
            return {Vec3::Zero(), std::numeric_limits<double>::infinity()};
        const Vec3 center = m.partialPivLu().solve(rhs);
        return {center, (center - a).norm()};
    }

  private:
    std::vector<Vec3> points_;
    std::vector<DelaunayTet> tets_;
    int n_real_ = 0;
    int hint_ = 0;
    Rng walk_rng_{0x9e3779b97f4a7c15ULL};
    std::vector<std::uint32_t> visit_stamp_;
    std::uint32_t stamp_ = 0;

    const Vec3& pt(int i) const { return points_[static_cast<std::size_t>(i)]; }

    static std::array<int, 3> face_opposite(const DelaunayTet& t, int i) {
        return tet_face_opposite(t, i);
    }

    void build() {
        Vec3 lo = points_[0], hi = points_[0];
        for (const Vec3& p : points_) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        const Vec3 center = 0.5 * (lo + hi);
        const double radius = std::max(0.5 * (hi - lo).norm(), 1.0);
        // Far enough that no small-circumradius tet can reach these vertices.
        const double scale = 1e6 * radius;
        const int s0 = n_real_;
        points_.emplace_back(center + scale * Vec3(1, 1, 1).normalized());
        points_.emplace_back(center + scale * Vec3(-1, -1, 1).normalized());
        points_.emplace_back(center + scale * Vec3(-1, 1, -1).normalized());
        points_.emplace_back(center + scale * Vec3(1, -1, -1).normalized());

        DelaunayTet root;
        root.v = {s0, s0 + 1, s0 + 2, s0 + 3};
        root.alive = true;
        if (predicates::orient3d(pt(root.v[0]), pt(root.v[1]), pt(root.v[2]), pt(root.v[3])) < 0)
            std::swap(root.v[2], root.v[3]);
        tets_.push_back(root);
        hint_ = 0;

        std::vector<int> order(static_cast<std::size_t>(n_real_));
        std::iota(order.begin(), order.end(), 0);
        Rng shuffle_rng(12345);
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.uniform_int(0, static_cast<int>(i) - 1)]);

        for (int idx : order) insert(idx);
    }

    bool point_in_tet_vertices(int p, const DelaunayTet& t) const {
        for (int i = 0; i < 4; ++i)
            if (pt(t.v[i]) == pt(p)) return true;
        return false;
    }

    // Stochastic visibility walk from the hint tet; falls back to a linear
    // scan if the walk exceeds its step budget.
    int locate(int p) {
        int current = hint_;
        if (current < 0 || current >= static_cast<int>(tets_.size()) ||
        !tets_[static_cast<std::size_t>(current)].alive) {
            current = -1;
            for (std::size_t i = tets_.size(); i > 0; --i)
                if (tets_[i - 1].alive) {
                    current = static_cast<int>(i - 1);
                    break;
                }
        }
        const int max_steps = 4 * static_cast<int>(tets_.size()) + 64;
        for (int step = 0; step < max_steps; ++step) {
            const DelaunayTet& t = tets_[static_cast<std::size_t>(current)];
            const int offset = static_cast<int>(walk_rng_.next() & 3);
            int next = -1;
            for (int k = 0; k < 4; ++k) {
                const int i = (k + offset) & 3;
                const auto f = face_opposite(t, i);
                // Outward face normal: p beyond this face means the adjacent
                // tet is closer to p.
                if (predicates::orient3d(pt(f[0]), pt(f[1]), pt(f[2]), pt(p)) < 0) {
                    next = t.neighbor[static_cast<std::size_t>(i)];
                    if (next >= 0) break;
                    next = -1;
                }
            }
            if (next < 0) return current;  // no face separates p: inside or on boundary
            current = next;
        }
        for (std::size_t i = 0; i < tets_.size(); ++i) {
            if (!tets_[i].alive) continue;
            const DelaunayTet& t = tets_[i];
            bool inside = true;
            for (int k = 0; k < 4 && inside; ++k) {
                const auto f = face_opposite(t, k);
                if (predicates::orient3d(pt(f[0]), pt(f[1]), pt(f[2]), pt(p)) < 0) inside = false;
            }
            if (inside) return static_cast<int>(i);
        }
        throw InputError("DelaunayTriangulation: point location failed");
    }

    bool in_circumsphere(const DelaunayTet& t, int p) const {
        return predicates::insphere(pt(t.v[0]), pt(t.v[1]), pt(t.v[2]), pt(t.v[3]), pt(p)) > 0;
    }

    void insert(int p) {
        const int start = locate(p);
        if (point_in_tet_vertices(p, tets_[static_cast<std::size_t>(start)])) return;  // duplicate

        // Cavity: tets whose circumsphere strictly contains p, grown from the
        // containing tet (always included), then widened until every boundary
        // face strictly faces p so no degenerate tet is created.
        ++stamp_;
        visit_stamp_.resize(tets_.size(), 0);
        std::vector<int> cavity;
        std::vector<char> in_cavity(tets_.size(), 0);
        std::vector<int> queue = {start};
        visit_stamp_[static_cast<std::size_t>(start)] = stamp_;
        in_cavity[static_cast<std::size_t>(start)] = 1;
        cavity.push_back(start);
        while (!queue.empty()) {
            const int cur = queue.back();
            queue.pop_back();
            for (int i = 0; i < 4; ++i) {
                const int nb = tets_[static_cast<std::size_t>(cur)].neighbor[static_cast<std::size_t>(i)];
                if (nb < 0 || visit_stamp_[static_cast<std::size_t>(nb)] == stamp_) continue;
                visit_stamp_[static_cast<std::size_t>(nb)] = stamp_;
                if (in_circumsphere(tets_[static_cast<std::size_t>(nb)], p)) {
                    in_cavity[static_cast<std::size_t>(nb)] = 1;
                    cavity.push_back(nb);
                    queue.push_back(nb);
                }
            }
        }

        // Widen while some boundary face is coplanar with p.
        bool grew = true;
        while (grew) {
            grew = false;
            for (std::size_t ci = 0; ci < cavity.size() && !grew; ++ci) {
                const int cur = cavity[ci];
                for (int i = 0; i < 4; ++i) {
                    const int nb =
                        tets_[static_cast<std::size_t>(cur)].neighbor[static_cast<std::size_t>(i)];
                    if (nb >= 0 && in_cavity[static_cast<std::size_t>(nb)]) continue;
                    const auto f = face_opposite(tets_[static_cast<std::size_t>(cur)], i);
                    if (predicates::orient3d(pt(f[0]), pt(f[1]), pt(f[2]), pt(p)) <= 0) {
                        if (nb < 0)
                            throw InputError(
                                "DelaunayTriangulation: point outside the enclosing tetrahedron");
                        in_cavity[static_cast<std::size_t>(nb)] = 1;
                        cavity.push_back(nb);
                        grew = true;
                        break;
                    }
                }
            }
        }

        // Collect boundary faces before killing the cavity.
        struct BoundaryFace {
            std::array<int, 3> verts;  // wound away from the cavity interior
            int outside;               // neighbor tet beyond the face, -1 at hull
        };
        std::vector<BoundaryFace> boundary;
        for (int cur : cavity) {
            const DelaunayTet& t = tets_[static_cast<std::size_t>(cur)];
            for (int i = 0; i < 4; ++i) {
                const int nb = t.neighbor[static_cast<std::size_t>(i)];
                if (nb >= 0 && in_cavity[static_cast<std::size_t>(nb)]) continue;
                boundary.push_back({face_opposite(t, i), nb});
            }
        }
        for (int cur : cavity) tets_[static_cast<std::size_t>(cur)].alive = false;

        // One new tet per boundary face; internal faces pair up via the edge
        // of the face they share (both miss p and one boundary vertex).
        std::map<std::pair<int, int>, std::pair<int, int>> half_face;  // edge -> (tet, corner)
        int first_new = -1;
        for (const BoundaryFace& bf : boundary) {
            DelaunayTet nt;
            // The boundary face is wound away from the cavity and the cavity
            // growth guarantees orient3d(f0,f1,f2,p) > 0, so listing p first
            // requires swapping two face vertices to stay positively oriented.
            nt.v = {p, bf.verts[0], bf.verts[2], bf.verts[1]};
            nt.alive = true;
            const int nt_idx = static_cast<int>(tets_.size());
            nt.neighbor[0] = bf.outside;
            tets_.push_back(nt);
            visit_stamp_.push_back(0);
            in_cavity.push_back(0);
            if (first_new < 0) first_new = nt_idx;

            if (bf.outside >= 0) {
                DelaunayTet& out = tets_[static_cast<std::size_t>(bf.outside)];
                for (int i = 0; i < 4; ++i) {
                    // The shared face is the one matching bf.verts as a set.
                    const auto of = face_opposite(out, i);
                    const bool same =
                        (of[0] == bf.verts[0] || of[0] == bf.verts[1] || of[0] == bf.verts[2]) &&
                        (of[1] == bf.verts[0] || of[1] == bf.verts[1] || of[1] == bf.verts[2]) &&
                        (of[2] == bf.verts[0] || of[2] == bf.verts[1] || of[2] == bf.verts[2]);
                    if (same) {
                        out.neighbor[static_cast<std::size_t>(i)] = nt_idx;
                        break;
                    }
                }
            }

            // Faces of the new tet containing p: opposite corners 1..3.
            for (int corner = 1; corner < 4; ++corner) {
                int e0 = -1, e1 = -1;
                for (int j = 1; j < 4; ++j) {
                    if (j == corner) continue;
                    (e0 < 0 ? e0 : e1) = tets_.back().v[static_cast<std::size_t>(j)];
                }
                const auto key = std::minmax(e0, e1);
                auto it = half_face.find(key);
                if (it == half_face.end()) {
                    half_face[key] = {nt_idx, corner};
                } else {
                    const auto [other_tet, other_corner] = it->second;
                    tets_[static_cast<std::size_t>(nt_idx)]
                        .neighbor[static_cast<std::size_t>(corner)] = other_tet;
                    tets_[static_cast<std::size_t>(other_tet)]
                        .neighbor[static_cast<std::size_t>(other_corner)] = nt_idx;
                    half_face.erase(it);
                }
            }
        }
        hint_ = first_new;
    }
};

}  // namespace rgbdmeas
