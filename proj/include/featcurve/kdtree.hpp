#pragma once

#include <algorithm>
#include <numeric>
#include <queue>
#include <vector>

#include "featcurve/core.hpp"

namespace featcurve {

// Static 3-d tree over a point array. Nearest/k-nearest/radius queries return
// squared distances; callers take sqrt so accelerated and brute-force paths
// produce bit-identical values.
class KdTree3 {
  public:
    KdTree3() = default;

    explicit KdTree3(const std::vector<Point3>& pts) : pts_(&pts) {
        index_.resize(pts.size());
        std::iota(index_.begin(), index_.end(), 0);
        nodes_.reserve(pts.size());
        if (!pts.empty()) root_ = build(0, static_cast<int>(pts.size()));
    }

    bool empty() const { return !pts_ || pts_->empty(); }

    // index of nearest point and its squared distance
    std::pair<int, double> nearest(const Point3& q) const {
        int best = -1;
        double best_d2 = std::numeric_limits<double>::max();
        search(root_, q, best, best_d2);
        return {best, best_d2};
    }

    double nearest_dist2(const Point3& q) const { return nearest(q).second; }

    // k nearest, ordered by ascending squared distance (ties by index)
    std::vector<std::pair<double, int>> knn(const Point3& q, int k) const {
        std::priority_queue<std::pair<double, int>> heap;  // max-heap on (d2, idx)
        knn_search(root_, q, k, heap);
        std::vector<std::pair<double, int>> out(heap.size());
        for (std::size_t i = out.size(); i-- > 0;) {
            out[i] = heap.top();
            heap.pop();
        }
        return out;
    }

    // all indices with dist2 <= r2, ascending index order
    std::vector<int> radius(const Point3& q, double r) const {
        std::vector<int> out;
        radius_search(root_, q, r * r, out);
        std::sort(out.begin(), out.end());
        return out;
    }

  private:
    struct Node {
        int index;
        int left = -1, right = -1;
        int axis;
    };

    const std::vector<Point3>* pts_ = nullptr;
    std::vector<int> index_;
    std::vector<Node> nodes_;
    int root_ = -1;

    static double coord(const Point3& p, int axis) {
        return axis == 0 ? p.x : (axis == 1 ? p.y : p.z);
    }

    int build(int lo, int hi) {
        if (lo >= hi) return -1;
        Aabb box;
        for (int i = lo; i < hi; ++i) box.expand((*pts_)[index_[i]]);
        const Vec3 ext = box.hi - box.lo;
        int axis = 0;
        if (ext.y > ext.x) axis = 1;
        if (coord(ext, 2) > coord(ext, axis)) axis = 2;

        const int mid = (lo + hi) / 2;
        std::nth_element(index_.begin() + lo, index_.begin() + mid, index_.begin() + hi,
                         [&](int a, int b) {
                             const double ca = coord((*pts_)[a], axis), cb = coord((*pts_)[b], axis);
                             return ca < cb || (ca == cb && a < b);
                         });
        const int node_id = static_cast<int>(nodes_.size());
        nodes_.push_back({index_[mid], -1, -1, axis});
        const int l = build(lo, mid);
        const int r = build(mid + 1, hi);
        nodes_[node_id].left = l;
        nodes_[node_id].right = r;
        return node_id;
    }

    void search(int node_id, const Point3& q, int& best, double& best_d2) const {
        if (node_id < 0) return;
        const Node& n = nodes_[node_id];
        const Point3& p = (*pts_)[n.index];
        const double d2 = dist2(q, p);
        if (d2 < best_d2 || (d2 == best_d2 && n.index < best)) {
            best_d2 = d2;
            best = n.index;
        }
        const double delta = coord(q, n.axis) - coord(p, n.axis);
        const int near = delta < 0.0 ? n.left : n.right;
        const int far = delta < 0.0 ? n.right : n.left;
        search(near, q, best, best_d2);
        if (delta * delta <= best_d2) search(far, q, best, best_d2);
    }

    void knn_search(int node_id, const Point3& q, int k,
                    std::priority_queue<std::pair<double, int>>& heap) const {
        if (node_id < 0) return;
        const Node& n = nodes_[node_id];
        const Point3& p = (*pts_)[n.index];
        const double d2 = dist2(q, p);
        if (static_cast<int>(heap.size()) < k) {
            heap.push({d2, n.index});
        } else if (d2 < heap.top().first ||
                   (d2 == heap.top().first && n.index < heap.top().second)) {
            heap.pop();
            heap.push({d2, n.index});
        }
        const double delta = coord(q, n.axis) - coord(p, n.axis);
        const int near = delta < 0.0 ? n.left : n.right;
        const int far = delta < 0.0 ? n.right : n.left;
        knn_search(near, q, k, heap);
        if (static_cast<int>(heap.size()) < k || delta * delta <= heap.top().first)
            knn_search(far, q, k, heap);
    }

    void radius_search(int node_id, const Point3& q, double r2, std::vector<int>& out) const {
        if (node_id < 0) return;
        const Node& n = nodes_[node_id];
        const Point3& p = (*pts_)[n.index];
        if (dist2(q, p) <= r2) out.push_back(n.index);
        const double delta = coord(q, n.axis) - coord(p, n.axis);
        const int near = delta < 0.0 ? n.left : n.right;
        const int far = delta < 0.0 ? n.right : n.left;
        radius_search(near, q, r2, out);
        if (delta * delta <= r2) radius_search(far, q, r2, out);
    }
};

// Median nearest-neighbor spacing; the scale used for edge bands and noise.
inline double median_nn_spacing(const std::vector<Point3>& pts) {
    if (pts.size() < 2) return 0.0;
    KdTree3 tree(pts);
    std::vector<double> d;
    d.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        auto nn = tree.knn(pts[i], 2);  // self + nearest
        d.push_back(std::sqrt(nn.back().first));
    }
    std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
    return d[d.size() / 2];
}

}  // namespace featcurve
