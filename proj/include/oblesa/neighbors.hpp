#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "oblesa/core.hpp"

namespace oblesa::esa {

/// k-nearest-neighbor index over a fixed point set.
///
/// Exact mode answers queries with a kd-tree. Approximate mode projects the
/// points onto a seeded random Gaussian basis, finds an enlarged candidate
/// set in the projected space, and reranks candidates by true distance.
/// Auto picks exact up to 10 dimensions and approximate above. Either mode
/// is deterministic for a given (points, mode, seed).
///
/// Distance ties are broken by point index, so the returned set is unique.
class NeighborIndex {
public:
    enum class Mode { Auto, Exact, Approximate };

    explicit NeighborIndex(std::vector<Vector> points, Mode mode = Mode::Auto,
                           std::uint64_t seed = 0)
        : points_(std::move(points)) {
        if (points_.empty())
            throw std::invalid_argument("NeighborIndex: empty point set");
        dim_ = points_[0].size();
        if (dim_ == 0) throw std::invalid_argument("NeighborIndex: zero-dimensional points");
        for (const auto& p : points_)
            if (p.size() != dim_)
                throw std::invalid_argument("NeighborIndex: inconsistent point dimensions");

        exact_ = (mode == Mode::Exact) || (mode == Mode::Auto && dim_ <= 10);
        if (exact_) {
            tree_points_ = &points_;
            tree_dim_ = dim_;
        } else {
            projected_dim_ = std::min<std::size_t>(dim_, 10);
            build_projection(seed);
            projected_.resize(points_.size());
            for (std::size_t i = 0; i < points_.size(); ++i)
                projected_[i] = project(points_[i]);
            tree_points_ = &projected_;
            tree_dim_ = projected_dim_;
        }
        build_tree();
    }

    std::size_t size() const { return points_.size(); }
    std::size_t dim() const { return dim_; }
    bool exact() const { return exact_; }
    const Vector& point(std::size_t i) const { return points_[i]; }

    /// Indices of (up to) k distinct points, ordered by (distance, index).
    std::vector<std::size_t> query(const Vector& q, std::size_t k) const {
        std::vector<std::size_t> out;
        query(q, k, out);
        return out;
    }

    void query(const Vector& q, std::size_t k, std::vector<std::size_t>& out) const {
        if (q.size() != dim_)
            throw std::invalid_argument("NeighborIndex::query: dimension mismatch");
        if (k == 0) throw std::invalid_argument("NeighborIndex::query: k must be positive");
        k = std::min(k, points_.size());

        if (exact_) {
            Heap heap(k);
            tree_search(q, 0, heap);
            heap.extract_sorted(out);
            return;
        }

        // Candidate pass in the projected space, rerank by true distance.
        const std::size_t m = std::min(points_.size(), std::max(8 * k, k + 32));
        const Vector pq = project(q);
        Heap candidate_heap(m);
        tree_search(pq, 0, candidate_heap);
        std::vector<std::size_t> candidates;
        candidate_heap.extract_sorted(candidates);

        Heap heap(k);
        for (std::size_t idx : candidates)
            heap.offer(squared_distance(q, points_[idx]), idx);
        heap.extract_sorted(out);
    }

private:
    // Bounded max-heap over (squared distance, index) with lexicographic
    // ordering; keeps the k smallest pairs.
    class Heap {
    public:
        explicit Heap(std::size_t k) : k_(k) { items_.reserve(k); }

        void offer(double dist2, std::size_t idx) {
            const std::pair<double, std::size_t> item{dist2, idx};
            if (items_.size() < k_) {
                items_.push_back(item);
                std::push_heap(items_.begin(), items_.end());
            } else if (item < items_.front()) {
                std::pop_heap(items_.begin(), items_.end());
                items_.back() = item;
                std::push_heap(items_.begin(), items_.end());
            }
        }

        bool full() const { return items_.size() == k_; }
        double worst() const { return items_.front().first; }
        std::size_t worst_index() const { return items_.front().second; }

        void extract_sorted(std::vector<std::size_t>& out) {
            std::sort(items_.begin(), items_.end());
            out.clear();
            out.reserve(items_.size());
            for (const auto& [d2, idx] : items_) out.push_back(idx);
        }

    private:
        std::size_t k_;
        std::vector<std::pair<double, std::size_t>> items_;
    };

    struct Node {
        int left = -1;
        int right = -1;
        int axis = -1;
        double threshold = 0.0;
        std::uint32_t begin = 0;
        std::uint32_t end = 0; // leaf range into order_ when axis < 0
    };

    static constexpr std::size_t kLeafSize = 16;

    void build_tree() {
        order_.resize(tree_points_->size());
        for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
        nodes_.clear();
        build_node(0, order_.size());
    }

    int build_node(std::size_t begin, std::size_t end) {
        const int node_id = static_cast<int>(nodes_.size());
        nodes_.push_back(Node{});
        if (end - begin <= kLeafSize) {
            nodes_[node_id].begin = static_cast<std::uint32_t>(begin);
            nodes_[node_id].end = static_cast<std::uint32_t>(end);
            return node_id;
        }
        // Split on the widest axis at the median.
        std::size_t axis = 0;
        double widest = -1.0;
        for (std::size_t a = 0; a < tree_dim_; ++a) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -std::numeric_limits<double>::infinity();
            for (std::size_t i = begin; i < end; ++i) {
                const double v = (*tree_points_)[order_[i]][a];
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (hi - lo > widest) {
                widest = hi - lo;
                axis = a;
            }
        }
        const std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                         order_.begin() + static_cast<std::ptrdiff_t>(mid),
                         order_.begin() + static_cast<std::ptrdiff_t>(end),
                         [&](std::size_t a, std::size_t b) {
                             const double va = (*tree_points_)[a][axis];
                             const double vb = (*tree_points_)[b][axis];
                             return va != vb ? va < vb : a < b;
                         });
        nodes_[node_id].axis = static_cast<int>(axis);
        nodes_[node_id].threshold = (*tree_points_)[order_[mid]][axis];
        const int left = build_node(begin, mid);
        const int right = build_node(mid, end);
        nodes_[node_id].left = left;
        nodes_[node_id].right = right;
        return node_id;
    }

    void tree_search(const Vector& q, int node_id, Heap& heap) const {
        const Node& node = nodes_[static_cast<std::size_t>(node_id)];
        if (node.axis < 0) {
            for (std::uint32_t i = node.begin; i < node.end; ++i) {
                const std::size_t idx = order_[i];
                heap.offer(squared_distance(q, (*tree_points_)[idx]), idx);
            }
            return;
        }
        const double delta = q[static_cast<std::size_t>(node.axis)] - node.threshold;
        const int near = delta < 0.0 ? node.left : node.right;
        const int far = delta < 0.0 ? node.right : node.left;
        tree_search(q, near, heap);
        if (!heap.full() || delta * delta <= heap.worst()) tree_search(q, far, heap);
    }

    void build_projection(std::uint64_t seed) {
        RandomSource rng(RandomSource::mix_seed(fnv1a64("oblesa.projection"), seed));
        projection_.assign(projected_dim_ * dim_, 0.0);
        const double scale = 1.0 / std::sqrt(static_cast<double>(projected_dim_));
        for (double& w : projection_) {
            // Box-Muller from the owned stream; no library distributions.
            const double u1 = 1.0 - rng.uniform();
            const double u2 = rng.uniform();
            w = scale * std::sqrt(-2.0 * std::log(u1)) *
                std::cos(2.0 * std::numbers::pi * u2);
        }
    }

    Vector project(const Vector& x) const {
        Vector out(projected_dim_, 0.0);
        for (std::size_t r = 0; r < projected_dim_; ++r) {
            const double* row = projection_.data() + r * dim_;
            double s = 0.0;
            for (std::size_t c = 0; c < dim_; ++c) s += row[c] * x[c];
            out[r] = s;
        }
        return out;
    }

    std::vector<Vector> points_;
    std::size_t dim_ = 0;
    bool exact_ = true;

    std::size_t projected_dim_ = 0;
    std::vector<double> projection_; // row-major projected_dim_ x dim_
    std::vector<Vector> projected_;

    const std::vector<Vector>* tree_points_ = nullptr;
    std::size_t tree_dim_ = 0;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
};

} // namespace oblesa::esa
