#pragma once

#include "cathsim/rod/bdf.hpp"
#include "cathsim/rod/lie.hpp"
#include "cathsim/rod/rod_params.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace cathsim::rod {

// Kinematic state of one cross section. v, u, q, w are in the local frame.
struct RodNode
{
    Vec3 p = Vec3::Zero();
    Mat3 R = Mat3::Identity();
    Vec3 v = Vec3::UnitZ();
    Vec3 u = Vec3::Zero();
    Vec3 q = Vec3::Zero();
    Vec3 w = Vec3::Zero();
};

// The quantities whose time derivatives enter the rod equations.
struct NodeKinematics
{
    Vec3 v = Vec3::Zero();
    Vec3 u = Vec3::Zero();
    Vec3 q = Vec3::Zero();
    Vec3 w = Vec3::Zero();
    Vec3 vs = Vec3::Zero();
    Vec3 us = Vec3::Zero();
};

NodeKinematics operator+(const NodeKinematics &a, const NodeKinematics &b);
NodeKinematics operator*(double k, const NodeKinematics &a);

// Previous two time levels plus the previous time derivative.
struct NodeHistory
{
    NodeKinematics prev;
    NodeKinematics prev2;
    NodeKinematics prev_rate;
};

// Combined history source y_h = c1 y(i-1) + c2 y(i-2) + d1 y_t(i-1), so that
// y_t(i) = c0 y(i) + y_h. Zero for statics.
using HistoryTerms = NodeKinematics;

HistoryTerms history_terms(const NodeHistory &h, const BdfCoeffs &c);

struct NodeDerivatives
{
    Vec3 p_s = Vec3::Zero();
    Mat3 R_s = Mat3::Zero();
    Vec3 v_s = Vec3::Zero();
    Vec3 u_s = Vec3::Zero();
    Vec3 q_s = Vec3::Zero();
    Vec3 w_s = Vec3::Zero();
};

// Arc-length derivatives of the full node state under tendon loading,
// distributed gravity and drag. Throws NumericalSingularityError (with
// node_index) when the 6x6 strain-rate system cannot be inverted.
NodeDerivatives rod_derivatives(const RodNode &node, const RodParams &params, const BdfCoeffs &coeffs,
                                const HistoryTerms &history, std::size_t node_index = 0);

struct TipLoad
{
    Vec3 force = Vec3::Zero();  // N, global frame
    Vec3 moment = Vec3::Zero(); // N.m, global frame
};

struct RodState
{
    std::vector<RodNode> nodes;
    std::vector<Vec3> v_s; // per node, needed as history for the next step
    std::vector<Vec3> u_s;
    double s_step = 0.0;

    std::vector<NodeHistory> history;
    int history_depth = 0;
    double time = 0.0;

    // Base strains (v(0), u(0)) that satisfied the tip boundary condition.
    Vec6 base_strains = Vec6::Zero();
    int solver_iterations = 0;

    const RodNode &tip() const { return nodes.back(); }
    NodeKinematics kinematics(std::size_t i) const;
};

// Forward-Euler march from the base node to s = L. `history` is either empty
// (treated as zero) or holds one entry per node.
RodState integrate_shape(const RodNode &base, const RodParams &params, const BdfCoeffs &coeffs,
                         std::span<const HistoryTerms> history = {});

// Tip boundary residual [force; moment] in the global frame: internal
// force/moment minus the tendon-termination load minus the external load.
Vec6 tip_residual(const RodState &state, const RodParams &params, const BdfCoeffs &coeffs,
                  std::span<const HistoryTerms> history, const TipLoad &load);

// Clamped base at the origin with R = I; solves for the base strains by
// damped Newton shooting. Throws ConvergenceError.
RodState solve_static(const RodParams &params, const TipLoad &load = {},
                      const std::optional<Vec6> &initial_guess = std::nullopt);

// Advances one time step. The first two steps after a static solution use
// backward Euler; afterwards `coeffs` is used. Throws ConvergenceError.
RodState step_dynamics(const RodState &state, const RodParams &params, const BdfCoeffs &coeffs,
                       const TipLoad &load = {});

double max_orthonormality_defect(const RodState &state);

} // namespace cathsim::rod
