#include "ltsa/reconstruct.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace ltsa {

Matrix optimal_alignment(const Matrix& coords, const Matrix& t_centered) {
    if (coords.cols() != t_centered.cols())
        throw InvalidArgument("optimal_alignment: column count mismatch");
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(coords.transpose());
    return cod.solve(t_centered.transpose()).transpose();
}

ReconstructionMap::ReconstructionMap(std::vector<ReconstructionRecord> records,
                                     Matrix feature_points)
    : records_(std::move(records)), feature_points_(std::move(feature_points)) {
    if (static_cast<Index>(records_.size()) != feature_points_.cols())
        throw InvalidArgument("ReconstructionMap: record count does not match feature points");
    index_ = std::make_shared<KdTree>(feature_points_);
}

Index ReconstructionMap::nearest_record(const Vector& tau) const {
    if (index_ == nullptr) throw InvalidArgument("ReconstructionMap is empty");
    if (tau.size() != feature_points_.rows())
        throw InvalidArgument("tau dimension does not match the embedding");
    return index_->nearest(tau);
}

ReconstructionMap fit_reconstruction(const DataMatrix& X, const Embedding& embedding,
                                     const std::vector<LocalFrame>& frames,
                                     const NeighborhoodIndex& nbrs) {
    const Index n = X.N();
    if (embedding.T.cols() != n || static_cast<Index>(frames.size()) != n || nbrs.size() != n)
        throw InvalidArgument("fit_reconstruction: inputs come from different pipeline runs");

    std::vector<ReconstructionRecord> records(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const auto& idx = nbrs.sets[static_cast<std::size_t>(i)];
        const Index k = static_cast<Index>(idx.size());
        const LocalFrame& frame = frames[static_cast<std::size_t>(i)];

        Matrix ti(embedding.d, k);
        for (Index j = 0; j < k; ++j) ti.col(j) = embedding.T.col(idx[j]);
        ReconstructionRecord& rec = records[static_cast<std::size_t>(i)];
        rec.center_tau = ti.rowwise().mean();
        const Matrix t_centered = ti.colwise() - rec.center_tau;

        rec.center_x = frame.center;
        rec.basis = frame.basis;
        rec.L = optimal_alignment(frame.coords, t_centered);
        Eigen::JacobiSVD<Matrix> svd(rec.L, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Vector& sv = svd.singularValues();
        const double smax = sv[0];
        const double smin = sv[sv.size() - 1];
        rec.cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
        rec.usable = smax > 0.0 && smin >= 1e-12 * smax;
        if (rec.usable)
            rec.L_inv = svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
        else
            rec.L_inv = Matrix::Zero(embedding.d, embedding.d);

        // idx[0] == i by the self-inclusion invariant.
        rec.theta_self = frame.coords.col(0);
        rec.xi_norm = frame.residual_norms[0];
    }
    return ReconstructionMap(std::move(records), embedding.T);
}

Vector map_point(const ReconstructionMap& rmap, const Vector& tau) {
    const Index i = rmap.nearest_record(tau);
    const ReconstructionRecord& rec = rmap.records()[static_cast<std::size_t>(i)];
    if (!rec.usable) {
        std::ostringstream msg;
        msg << "nearest reconstruction record " << i << " is unusable (cond=" << rec.cond << ")";
        throw InvalidArgument(msg.str());
    }
    return rec.center_x + rec.basis * (rec.L_inv * (tau - rec.center_tau));
}

Theorem1Record theorem1_report(const ReconstructionMap& rmap, const GroundTruth& gt, Index i) {
    if (!gt.has_evaluators() || gt.params.cols() == 0)
        throw InvalidArgument("theorem1_report requires ground truth with evaluators");
    if (i < 0 || i >= rmap.feature_points().cols())
        throw InvalidArgument("theorem1_report: index out of range");

    const ReconstructionRecord& rec = rmap.records()[static_cast<std::size_t>(i)];
    Theorem1Record out;
    out.applicable = rec.usable;
    out.eps_star = gt.noise.col(i).norm();
    out.xi = rec.xi_norm;
    if (!rec.usable) return out;

    const Vector tau = rmap.feature_points().col(i);
    const Vector eps = tau - rec.center_tau - rec.L * rec.theta_self;
    out.l_inv_eps = (rec.L_inv * eps).norm();
    out.bound = out.eps_star + out.xi + out.l_inv_eps;
    out.lhs = (map_point(rmap, tau) - gt.f(gt.params.col(i))).norm();
    out.violated = out.lhs > out.bound + 1e-8;
    return out;
}

std::vector<Theorem1Record> theorem1_report_all(const ReconstructionMap& rmap,
                                                const GroundTruth& gt) {
    std::vector<Theorem1Record> out;
    const Index n = rmap.feature_points().cols();
    out.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) out.push_back(theorem1_report(rmap, gt, i));
    return out;
}

namespace {

void write_row(std::ofstream& out, const Vector& v) {
    char buf[40];
    for (Index j = 0; j < v.size(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", v[j]);
        out << (j ? "," : "") << buf;
    }
    out << '\n';
}

void write_matrix(std::ofstream& out, const Matrix& m) {
    for (Index r = 0; r < m.rows(); ++r) write_row(out, m.row(r));
}

Vector parse_row(const std::string& line, Index expected, const std::string& path) {
    std::vector<double> cells;
    std::istringstream in(line);
    std::string tok;
    while (std::getline(in, tok, ',')) cells.push_back(std::stod(tok));
    if (expected >= 0 && static_cast<Index>(cells.size()) != expected)
        throw IoError("malformed rmap row in " + path);
    return Eigen::Map<Vector>(cells.data(), static_cast<Index>(cells.size()));
}

std::string next_line(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("truncated rmap file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

void save_rmap(const std::string& path, const ReconstructionMap& rmap) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    const Index n = rmap.feature_points().cols();
    const Index d = rmap.feature_points().rows();
    const Index m = rmap.input_dim();
    out << "rmap,v1," << m << ',' << d << ',' << n << '\n';
    write_matrix(out, rmap.feature_points());
    char buf[40];
    for (Index i = 0; i < n; ++i) {
        const auto& rec = rmap.records()[static_cast<std::size_t>(i)];
        std::snprintf(buf, sizeof(buf), "%.17g", rec.cond);
        out << "record," << i << ',' << (rec.usable ? 1 : 0) << ',' << buf;
        std::snprintf(buf, sizeof(buf), "%.17g", rec.xi_norm);
        out << ',' << buf << '\n';
        write_row(out, rec.center_x);
        write_row(out, rec.center_tau);
        write_row(out, rec.theta_self);
        write_matrix(out, rec.basis);
        write_matrix(out, rec.L);
        write_matrix(out, rec.L_inv);
    }
    if (!out) throw IoError("write failed: " + path);
}

ReconstructionMap load_rmap(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::string header = next_line(in, path);
    std::istringstream hs(header);
    std::string tag, version;
    std::getline(hs, tag, ',');
    std::getline(hs, version, ',');
    if (tag != "rmap" || version != "v1") throw IoError("not an rmap v1 file: " + path);
    std::string tok;
    std::getline(hs, tok, ',');
    const Index m = std::stol(tok);
    std::getline(hs, tok, ',');
    const Index d = std::stol(tok);
    std::getline(hs, tok, ',');
    const Index n = std::stol(tok);

    Matrix feature_points(d, n);
    for (Index r = 0; r < d; ++r) feature_points.row(r) = parse_row(next_line(in, path), n, path);

    std::vector<ReconstructionRecord> records(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        std::istringstream rs(next_line(in, path));
        std::getline(rs, tok, ',');
        if (tok != "record") throw IoError("expected record header in " + path);
        std::getline(rs, tok, ',');
        if (std::stol(tok) != i) throw IoError("record out of order in " + path);
        auto& rec = records[static_cast<std::size_t>(i)];
        std::getline(rs, tok, ',');
        rec.usable = tok == "1";
        std::getline(rs, tok, ',');
        rec.cond = std::stod(tok);
        std::getline(rs, tok, ',');
        rec.xi_norm = std::stod(tok);
        rec.center_x = parse_row(next_line(in, path), m, path);
        rec.center_tau = parse_row(next_line(in, path), d, path);
        rec.theta_self = parse_row(next_line(in, path), d, path);
        rec.basis.resize(m, d);
        for (Index r = 0; r < m; ++r) rec.basis.row(r) = parse_row(next_line(in, path), d, path);
        rec.L.resize(d, d);
        for (Index r = 0; r < d; ++r) rec.L.row(r) = parse_row(next_line(in, path), d, path);
        rec.L_inv.resize(d, d);
        for (Index r = 0; r < d; ++r) rec.L_inv.row(r) = parse_row(next_line(in, path), d, path);
    }
    return ReconstructionMap(std::move(records), std::move(feature_points));
}

}  // namespace ltsa
