#pragma once

#include "ltsa/types.hpp"

#include <vector>

namespace ltsa {

/// Squared Euclidean distance, plain sequential summation. Both neighbor
/// search strategies go through this one kernel so their comparisons see
/// bitwise-identical values.
inline double sq_dist(const double* a, const double* b, Index m) {
    double s = 0.0;
    for (Index c = 0; c < m; ++c) {
        const double d = a[c] - b[c];
        s += d * d;
    }
    return s;
}

/// Self-inclusive k-nearest-neighbor sets. Row i starts with i itself,
/// followed by the k-1 nearest other points ordered by squared distance,
/// ties broken by ascending index. Indices are 0-based.
struct NeighborhoodIndex {
    Index k = 0;
    std::vector<std::vector<Index>> sets;  // N rows of length k

    Index size() const { return static_cast<Index>(sets.size()); }
};

struct NeighborOptions {
    /// knn_tree falls back to brute force when the input dimension exceeds
    /// this (space partitioning stops pruning in high dimensions).
    Index tree_dim_threshold = 15;
    Index leaf_size = 16;
};

/// Exact kd-tree over the columns of a point matrix. Queries reproduce the
/// brute-force (squared distance, index) ordering exactly; comparisons are
/// plain floating-point comparisons on sq_dist values.
class KdTree {
public:
    explicit KdTree(Matrix points, const NeighborOptions& opts = {});

    /// Index of the nearest column to q, ties broken by smaller index.
    Index nearest(const Vector& q) const;

    /// The k nearest columns to q in (squared distance, index) order.
    /// `exclude` skips one column (used for self-exclusive neighbor rows).
    std::vector<Index> knearest(const Vector& q, Index k, Index exclude = -1) const;

    Index size() const { return points_.cols(); }

private:
    struct Node {
        Index axis = -1;       // -1 marks a leaf
        double threshold = 0;
        Index left = -1, right = -1;
        Index begin = 0, end = 0;  // leaf range into order_
    };

    Index build(Index begin, Index end);

    Matrix points_;  // m x N
    NeighborOptions opts_;
    bool brute_ = false;
    std::vector<Index> order_;
    std::vector<Node> nodes_;
    Index root_ = -1;
};

/// Row i holds i first, then the k-1 nearest other points by full-precision
/// squared distance, ties by ascending index.
NeighborhoodIndex knn_bruteforce(const DataMatrix& X, Index k);

/// Same contract and same results as knn_bruteforce, computed through a
/// kd-tree (or brute force above the dimension threshold).
NeighborhoodIndex knn_tree(const DataMatrix& X, Index k, const NeighborOptions& opts = {});

}  // namespace ltsa
