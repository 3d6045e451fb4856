#ifndef QWALK_CHANNEL_PLAN_HPP
#define QWALK_CHANNEL_PLAN_HPP

#include <array>

#include "qwalk/circuit.hpp"
#include "qwalk/synthesis.hpp"

namespace qwalk {

// Singular value decomposition O = U S V^dagger with deterministic,
// axis-aligned bases inside degenerate singular groups. Signs of negative
// values are absorbed into U.
struct ChannelSvd {
    Matrix4cd u;
    Eigen::Vector4d s;  // descending, non-negative
    Matrix4cd v;
};
ChannelSvd svd_channel(const Matrix4cd& op);

struct ChannelPlan {
    GateSequence pre_unitary;   // implements V^dagger on the 4 local wires
    GateSequence post_unitary;  // implements U
    std::array<double, 4> lambdas{};  // post-rescale damping, descending
    double rescale = 1.0;             // lambda_max recorded for postprocessing
    bool synthesized = true;          // false: sequences empty, use matrices
    Matrix4cd pre_matrix;             // exact V^dagger
    Matrix4cd post_matrix;            // exact U
    Matrix4cd superop;                // the channel O
};

// Lowers a channel to its executable plan. Throws NotExactlyRepresentable
// if an SVD unitary falls outside the exact gate set and fallback is off.
ChannelPlan plan_channel(const ChannelOp& op, bool allow_ideal_fallback = false);
ChannelPlan plan_channel(const Matrix4cd& superop, bool allow_ideal_fallback = false);

}  // namespace qwalk

#endif
