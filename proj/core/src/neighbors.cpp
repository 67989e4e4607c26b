#include "ltsa/neighbors.hpp"

#include <algorithm>
#include <queue>

namespace ltsa {

namespace {

struct Candidate {
    double d2;
    Index idx;
    bool operator<(const Candidate& o) const {
        return d2 < o.d2 || (d2 == o.d2 && idx < o.idx);
    }
};

// Bounded worst-first heap of the k best (d2, idx) candidates.
class CandidateHeap {
public:
    explicit CandidateHeap(Index k) : k_(k) { heap_.reserve(k); }

    bool full() const { return static_cast<Index>(heap_.size()) == k_; }
    const Candidate& worst() const { return heap_.front(); }

    void offer(const Candidate& c) {
        if (!full()) {
            heap_.push_back(c);
            std::push_heap(heap_.begin(), heap_.end());
        } else if (c < heap_.front()) {
            std::pop_heap(heap_.begin(), heap_.end());
            heap_.back() = c;
            std::push_heap(heap_.begin(), heap_.end());
        }
    }

    std::vector<Index> sorted_indices() {
        std::sort(heap_.begin(), heap_.end());
        std::vector<Index> out(heap_.size());
        for (std::size_t i = 0; i < heap_.size(); ++i) out[i] = heap_[i].idx;
        return out;
    }

private:
    Index k_;
    std::vector<Candidate> heap_;
};

void check_k(Index k, Index N) {
    if (k < 1) throw InvalidArgument("k must be at least 1");
    if (k > N) throw InvalidArgument("k exceeds the number of points");
}

}  // namespace

KdTree::KdTree(Matrix points, const NeighborOptions& opts)
    : points_(std::move(points)), opts_(opts) {
    const Index n = points_.cols();
    if (n < 1) throw InvalidArgument("KdTree requires at least one point");
    brute_ = points_.rows() > opts_.tree_dim_threshold;
    if (brute_) return;
    order_.resize(n);
    for (Index i = 0; i < n; ++i) order_[i] = i;
    nodes_.reserve(2 * n / std::max<Index>(opts_.leaf_size, 1) + 2);
    root_ = build(0, n);
}

Index KdTree::build(Index begin, Index end) {
    const Index node_id = static_cast<Index>(nodes_.size());
    nodes_.emplace_back();
    if (end - begin <= opts_.leaf_size) {
        nodes_[node_id].begin = begin;
        nodes_[node_id].end = end;
        return node_id;
    }
    // Split on the axis with the widest spread in this subset.
    Index axis = 0;
    double best_spread = -1.0;
    for (Index a = 0; a < points_.rows(); ++a) {
        double lo = points_(a, order_[begin]), hi = lo;
        for (Index i = begin + 1; i < end; ++i) {
            const double v = points_(a, order_[i]);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > best_spread) {
            best_spread = hi - lo;
            axis = a;
        }
    }
    const Index mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](Index a, Index b) {
                         const double va = points_(axis, a), vb = points_(axis, b);
                         return va < vb || (va == vb && a < b);
                     });
    nodes_[node_id].axis = axis;
    nodes_[node_id].threshold = points_(axis, order_[mid]);
    const Index left = build(begin, mid);
    const Index right = build(mid, end);
    nodes_[node_id].left = left;
    nodes_[node_id].right = right;
    return node_id;
}

std::vector<Index> KdTree::knearest(const Vector& q, Index k, Index exclude) const {
    const Index n = points_.cols();
    const Index avail = n - (exclude >= 0 && exclude < n ? 1 : 0);
    check_k(k, avail);
    CandidateHeap heap(k);

    if (brute_) {
        for (Index j = 0; j < n; ++j) {
            if (j == exclude) continue;
            heap.offer({sq_dist(q.data(), points_.col(j).data(), points_.rows()), j});
        }
        return heap.sorted_indices();
    }

    // Iterative depth-first descent, near side first; the far side is visited
    // unless the splitting plane provably cannot beat the current worst
    // candidate (strict inequality: equal distances may still win on index).
    std::vector<Index> stack;
    stack.push_back(root_);
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        if (node.axis < 0) {
            for (Index i = node.begin; i < node.end; ++i) {
                const Index j = order_[i];
                if (j == exclude) continue;
                heap.offer({sq_dist(q.data(), points_.col(j).data(), points_.rows()), j});
            }
            continue;
        }
        const double delta = q[node.axis] - node.threshold;
        const Index near = delta < 0.0 ? node.left : node.right;
        const Index far = delta < 0.0 ? node.right : node.left;
        if (!heap.full() || !(delta * delta > heap.worst().d2)) stack.push_back(far);
        stack.push_back(near);
    }
    return heap.sorted_indices();
}

Index KdTree::nearest(const Vector& q) const { return knearest(q, 1)[0]; }

NeighborhoodIndex knn_bruteforce(const DataMatrix& X, Index k) {
    check_k(k, X.N());
    const Index n = X.N(), m = X.m();
    NeighborhoodIndex out;
    out.k = k;
    out.sets.resize(n);
    for (Index i = 0; i < n; ++i) {
        CandidateHeap heap(k - 1);
        for (Index j = 0; j < n; ++j) {
            if (j == i) continue;
            if (k > 1)
                heap.offer({sq_dist(X.values.col(i).data(), X.values.col(j).data(), m), j});
        }
        auto& row = out.sets[i];
        row.reserve(k);
        row.push_back(i);
        if (k > 1) {
            auto rest = heap.sorted_indices();
            row.insert(row.end(), rest.begin(), rest.end());
        }
    }
    return out;
}

NeighborhoodIndex knn_tree(const DataMatrix& X, Index k, const NeighborOptions& opts) {
    check_k(k, X.N());
    const Index n = X.N();
    KdTree tree(X.values, opts);
    NeighborhoodIndex out;
    out.k = k;
    out.sets.resize(n);
    for (Index i = 0; i < n; ++i) {
        auto& row = out.sets[i];
        row.reserve(k);
        row.push_back(i);
        if (k > 1) {
            auto rest = tree.knearest(X.values.col(i), k - 1, i);
            row.insert(row.end(), rest.begin(), rest.end());
        }
    }
    return out;
}

}  // namespace ltsa
