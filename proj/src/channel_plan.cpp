#include "qwalk/channel_plan.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace qwalk {

namespace {

// Orthonormal basis of the range of a projector, chosen deterministically:
// greedy pivoting on the projected standard axes, each vector rotated so its
// largest entry is real positive. Degenerate singular groups thereby come
// out as axis-aligned as the subspace allows.
MatrixXcd canonical_range_basis(const MatrixXcd& proj, int g) {
    const int dim = static_cast<int>(proj.rows());
    MatrixXcd basis(dim, g);
    for (int step = 0; step < g; ++step) {
        int best_axis = -1;
        double best_norm = -1.0;
        Eigen::VectorXcd best_vec;
        for (int axis = 0; axis < dim; ++axis) {
            Eigen::VectorXcd v = proj.col(axis);
            for (int b = 0; b < step; ++b)
                v -= basis.col(b) * (basis.col(b).adjoint() * v)(0);
            double nrm = v.norm();
            if (nrm > best_norm + 1e-12) {
                best_norm = nrm;
                best_axis = axis;
                best_vec = v;
            }
        }
        if (best_axis < 0 || best_norm < 1e-9)
            throw std::runtime_error("subspace basis extraction failed");
        best_vec /= best_norm;
        int top = 0;
        for (int i = 1; i < dim; ++i)
            if (std::abs(best_vec(i)) > std::abs(best_vec(top)) + 1e-12) top = i;
        cplx ph = best_vec(top) / std::abs(best_vec(top));
        basis.col(step) = best_vec / ph;
    }
    return basis;
}

}  // namespace

ChannelSvd svd_channel(const Matrix4cd& op) {
    Eigen::SelfAdjointEigenSolver<Matrix4cd> eig(op.adjoint() * op);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("eigensolver failed on O^dag O");

    // Eigen returns ascending order; we want singular values descending.
    std::array<int, 4> order = {3, 2, 1, 0};
    Eigen::Vector4d svals;
    Matrix4cd vraw;
    for (int i = 0; i < 4; ++i) {
        svals(i) = std::sqrt(std::max(0.0, eig.eigenvalues()(order[i])));
        vraw.col(i) = eig.eigenvectors().col(order[i]);
    }

    ChannelSvd out;
    const double group_tol = 1e-8;
    int start = 0;
    while (start < 4) {
        int stop = start + 1;
        while (stop < 4 && std::abs(svals(stop) - svals(start)) < group_tol) ++stop;
        MatrixXcd group = vraw.block(0, start, 4, stop - start);
        out.v.block(0, start, 4, stop - start) =
            canonical_range_basis(group * group.adjoint(), stop - start);
        start = stop;
    }
    out.s = svals;

    // Left factor: image columns where the singular value is nonzero, then a
    // deterministic completion for the kernel of O^dagger.
    int rank = 0;
    for (int i = 0; i < 4; ++i)
        if (svals(i) > 1e-9) ++rank;
    for (int i = 0; i < rank; ++i) out.u.col(i) = op * out.v.col(i) / svals(i);
    if (rank < 4) {
        MatrixXcd complement = MatrixXcd::Identity(4, 4);
        if (rank > 0) complement -= out.u.block(0, 0, 4, rank) *
                                    out.u.block(0, 0, 4, rank).adjoint();
        out.u.block(0, rank, 4, 4 - rank) =
            canonical_range_basis(complement, 4 - rank);
    }

    if ((out.u * out.s.asDiagonal() * out.v.adjoint() - op).cwiseAbs().maxCoeff() >
        1e-9)
        throw std::runtime_error("SVD reconstruction failed");
    return out;
}

ChannelPlan plan_channel(const Matrix4cd& superop, bool allow_ideal_fallback) {
    ChannelSvd svd = svd_channel(superop);

    ChannelPlan plan;
    plan.superop = superop;
    plan.pre_matrix = svd.v.adjoint();
    plan.post_matrix = svd.u;

    double lambda_max = svd.s(0);
    if (lambda_max > 1.0 + 1e-9) {
        plan.rescale = lambda_max;
        for (int i = 0; i < 4; ++i) plan.lambdas[i] = svd.s(i) / lambda_max;
    } else {
        plan.rescale = 1.0;
        for (int i = 0; i < 4; ++i) plan.lambdas[i] = std::min(svd.s(i), 1.0);
    }

    try {
        plan.pre_unitary = synthesize_unitary(Matrix4cd(plan.pre_matrix));
        plan.post_unitary = synthesize_unitary(Matrix4cd(plan.post_matrix));
        plan.synthesized = true;
    } catch (const NotExactlyRepresentable&) {
        if (!allow_ideal_fallback) throw;
        plan.synthesized = false;
        plan.pre_unitary = GateSequence{};
        plan.post_unitary = GateSequence{};
        plan.pre_unitary.n_wires = 4;
        plan.post_unitary.n_wires = 4;
    }
    return plan;
}

ChannelPlan plan_channel(const ChannelOp& op, bool allow_ideal_fallback) {
    return plan_channel(channel_superop(op), allow_ideal_fallback);
}

}  // namespace qwalk
