#pragma once

#include "ltsa/align.hpp"
#include "ltsa/ground_truth.hpp"
#include "ltsa/neighbors.hpp"
#include "ltsa/tangent.hpp"
#include "ltsa/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace ltsa {

/// Least-squares alignment L minimizing ||L * coords - t_centered||_F, the
/// d x d map from local tangent coordinates to centered feature coordinates.
/// Solved through an orthogonal decomposition; no pseudoinverse is formed.
Matrix optimal_alignment(const Matrix& coords, const Matrix& t_centered);

struct ReconstructionRecord {
    Vector center_x;    // neighborhood mean in input space
    Vector center_tau;  // mean of the embedded neighborhood coordinates
    Matrix basis;       // m x d tangent basis Q_i
    Matrix L;           // d x d local alignment
    Matrix L_inv;
    double cond = 0.0;  // condition number of L
    bool usable = true; // false when L is numerically singular
    // Center-point quantities kept for the error decomposition.
    Vector theta_self;  // Q_i^T (x_i - center_x)
    double xi_norm = 0.0;  // ||(I - QQ^T)(x_i - center_x)||
};

/// The feature-to-input map g(tau) = center_x + Q L^{-1} (tau - center_tau)
/// evaluated at the record of the nearest embedded coordinate.
class ReconstructionMap {
public:
    ReconstructionMap() = default;
    ReconstructionMap(std::vector<ReconstructionRecord> records, Matrix feature_points);

    const std::vector<ReconstructionRecord>& records() const { return records_; }
    const Matrix& feature_points() const { return feature_points_; }
    Index input_dim() const { return records_.empty() ? 0 : records_.front().center_x.size(); }
    int feature_dim() const { return static_cast<int>(feature_points_.rows()); }

    /// Index of the record nearest to tau (ties by smaller index).
    Index nearest_record(const Vector& tau) const;

private:
    std::vector<ReconstructionRecord> records_;
    Matrix feature_points_;            // d x N embedded coordinates
    std::shared_ptr<KdTree> index_;    // shared so the map stays copyable
};

ReconstructionMap fit_reconstruction(const DataMatrix& X, const Embedding& embedding,
                                     const std::vector<LocalFrame>& frames,
                                     const NeighborhoodIndex& nbrs);

/// Evaluate g at tau. Throws InvalidArgument naming the record and its
/// condition number when the nearest record is unusable.
Vector map_point(const ReconstructionMap& rmap, const Vector& tau);

/// Per-point error decomposition ||g(tau_i) - f(tau*_i)|| <=
/// ||eps*_i|| + ||xi_i|| + ||L_i^{-1} eps_i||.
struct Theorem1Record {
    double lhs = 0.0;
    double eps_star = 0.0;
    double xi = 0.0;
    double l_inv_eps = 0.0;
    double bound = 0.0;
    bool applicable = true;  // record usable
    bool violated = false;   // lhs > bound + 1e-8
};

Theorem1Record theorem1_report(const ReconstructionMap& rmap, const GroundTruth& gt, Index i);
std::vector<Theorem1Record> theorem1_report_all(const ReconstructionMap& rmap,
                                                const GroundTruth& gt);

/// Text round trip (CSV blocks per record; full double precision).
void save_rmap(const std::string& path, const ReconstructionMap& rmap);
ReconstructionMap load_rmap(const std::string& path);

}  // namespace ltsa
