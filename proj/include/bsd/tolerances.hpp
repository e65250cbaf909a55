#pragma once

namespace bsd::tol {

// Panel quadrature: relative refinement target and recursion cap.
// Mutable defaults; the CLI config may override them at startup.
inline double panel = 1e-7;
inline constexpr int panel_max_depth = 5;

// Admissibility of the vorticity: per-component flux relative to the L1
// norm of its normal trace.
inline double flux = 1e-6;

// Neumann compatibility (total flux / divergence balance). Discrete traces
// and voxel volumes disagree at O(h), so this is a percent-scale gate, not
// a machine-precision one.
inline constexpr double compat = 0.05;

// Rank-revealing solves: pivots below rank_rel * max are treated as the
// topological nullspace. The discrete near-null singular values sit at the
// quadrature-error level (~5e-3 on a 640-panel shell, shrinking under
// refinement), while the physical spectrum of I/2 +- T0 stays above ~0.1
// on the supported geometries, so the gap is wide.
inline constexpr double rank_rel = 0.02;
inline constexpr double cond_limit = 1e12;
inline constexpr double bie_residual = 1e-8;

// Advisory check on the discrete divergence of the input vorticity.
inline constexpr double div_advisory = 0.05;

// Interior evaluation margin: nominal h/2 with 5% slack so trace points
// offset by exactly h/2 are not rejected by curvature effects.
inline constexpr double margin_slack = 0.95;

}  // namespace bsd::tol
