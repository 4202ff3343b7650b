#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/transform.hpp"

namespace rgbdmeas {

// Index + squared distance of one search hit.
struct KdHit {
    int index = -1;
    double sq_dist = std::numeric_limits<double>::infinity();
};

// Static 3D kd-tree (median split on the widest extent). The tree is
// immutable after construction and safe to query from multiple threads.
//
// Distances are plain (q - p).squaredNorm(), the same expression a
// brute-force scan would use, so results agree bitwise with an exhaustive
// search whenever the nearest distance is unique.
class KdTree3 {
public:
    KdTree3() = default;

    explicit KdTree3(std::vector<Vec3> points) : points_(std::move(points)) {
        if (points_.empty()) throw InputError("KdTree3: empty point set");
        order_.resize(points_.size());
        std::iota(order_.begin(), order_.end(), 0);
        nodes_.reserve(2 * points_.size());
        root_ = build(0, static_cast<int>(points_.size()));
    }

    size_t size() const { return points_.size(); }
    const std::vector<Vec3>& points() const { return points_; }

    KdHit nearest(const Vec3& query) const {
        KdHit best;
        search_one(root_, query, best);
        return best;
    }

    // k nearest hits ordered by increasing squared distance.
    std::vector<KdHit> knn(const Vec3& query, int k) const {
        if (k < 1) throw InputError("KdTree3::knn: k must be >= 1");
        k = std::min<int>(k, static_cast<int>(points_.size()));
        std::priority_queue<std::pair<double, int>> heap;  // max-heap on sq_dist
        search_k(root_, query, k, heap);
        std::vector<KdHit> hits(heap.size());
        for (int i = static_cast<int>(heap.size()) - 1; i >= 0; --i) {
            hits[i] = {heap.top().second, heap.top().first};
            heap.pop();
        }
        return hits;
    }

private:
    struct Node {
        int axis = 0;
        double split = 0.0;
        int left = -1;
        int right = -1;
        int begin = 0;  // leaf payload range in order_
        int end = 0;
    };

    static constexpr int kLeafSize = 12;

    int build(int begin, int end) {
        Node node;
        if (end - begin <= kLeafSize) {
            node.begin = begin;
            node.end = end;
            nodes_.push_back(node);
            return static_cast<int>(nodes_.size()) - 1;
        }
        Vec3 lo = points_[order_[begin]], hi = lo;
        for (int i = begin + 1; i < end; ++i) {
            lo = lo.cwiseMin(points_[order_[i]]);
            hi = hi.cwiseMax(points_[order_[i]]);
        }
        int axis = 0;
        (hi - lo).maxCoeff(&axis);
        const int mid = (begin + end) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](int a, int b) { return points_[a][axis] < points_[b][axis]; });
        node.axis = axis;
        node.split = points_[order_[mid]][axis];
        nodes_.push_back(node);
        const int self = static_cast<int>(nodes_.size()) - 1;
        const int left = build(begin, mid);
        const int right = build(mid, end);
        nodes_[self].left = left;
        nodes_[self].right = right;
        return self;
    }

    bool is_leaf(const Node& n) const { return n.left < 0; }

    void search_one(int node_id, const Vec3& q, KdHit& best) const {
        const Node& node = nodes_[node_id];
        if (is_leaf(node)) {
            for (int i = node.begin; i < node.end; ++i) {
                const int idx = order_[i];
                const double d = (q - points_[idx]).squaredNorm();
                if (d < best.sq_dist) best = {idx, d};
            }
            return;
        }
        const double delta = q[node.axis] - node.split;
        const int near = delta < 0.0 ? node.left : node.right;
        const int far = delta < 0.0 ? node.right : node.left;
        search_one(near, q, best);
        if (delta * delta < best.sq_dist) search_one(far, q, best);
    }

    void search_k(int node_id, const Vec3& q, int k,
                  std::priority_queue<std::pair<double, int>>& heap) const {
        const Node& node = nodes_[node_id];
        if (is_leaf(node)) {
            for (int i = node.begin; i < node.end; ++i) {
                const int idx = order_[i];
                const double d = (q - points_[idx]).squaredNorm();
                if (static_cast<int>(heap.size()) < k) {
                    heap.emplace(d, idx);
                } else if (d < heap.top().first) {
                    heap.pop();
                    heap.emplace(d, idx);
                }
            }
            return;
        }
        const double delta = q[node.axis] - node.split;
        const int near = delta < 0.0 ? node.left : node.right;
        const int far = delta < 0.0 ? node.right : node.left;
        search_k(near, q, k, heap);
        if (static_cast<int>(heap.size()) < k || delta * delta < heap.top().first)
            search_k(far, q, k, heap);
    }

    std::vector<Vec3> points_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

}  // namespace rgbdmeas
