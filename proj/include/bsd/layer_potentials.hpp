#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bsd/domain.hpp"

namespace bsd {

/// Piecewise-constant boundary density: one scalar per panel.
struct BoundaryDensity {
  std::vector<double> values;

  BoundaryDensity() = default;
  explicit BoundaryDensity(std::vector<double> v) : values(std::move(v)) {}
  static BoundaryDensity zeros(int n) { return BoundaryDensity(std::vector<double>(n, 0.0)); }

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values[i]; }
  double& operator[](int i) { return values[i]; }
  double sup_norm() const;
};

/// Dense collocation discretization of the adjoint-double-layer operator:
/// entry (i, j) integrates (x_i - y) . n(x_i) / (4 pi |x_i - y|^3) over
/// panel j, with x_i the centroid of panel i.
struct LayerOperator {
  Eigen::MatrixXd matrix;
  int size() const { return static_cast<int>(matrix.rows()); }
};

struct T0Options {
  // The flat self-panel kernel vanishes; the leading curvature term is wired
  // back in through a closed-form in-plane line integral.
  bool curvature_diagonal = true;
  // Near-field quadrature points are lifted onto the quadratic surface
  // reconstruction of their panel (vertex-interpolating sag).
  bool curvature_lift = true;
};

LayerOperator assemble_T0(const DomainModel& model, const T0Options& opts = {});

/// Single-layer potential (note the leading minus):
/// S f(x) = -int f(y) / (4 pi |x - y|) dsigma(y), x strictly inside.
double single_layer(const DomainModel& model, const BoundaryDensity& f,
                    const Vec3& x);

/// grad S f(x) = +int f(y) (x - y) / (4 pi |x - y|^3) dsigma(y).
Vec3 grad_single_layer(const DomainModel& model, const BoundaryDensity& f,
                       const Vec3& x);

/// Batch gradient sampling at trusted interior points (no margin re-check);
/// parallel over points.
std::vector<Vec3> grad_single_layer_batch(const DomainModel& model,
                                          const BoundaryDensity& f,
                                          const std::vector<Vec3>& points);

struct BieSolveInfo {
  double residual_rel = 0.0;
  int rank = 0;
  double cond_estimate = 0.0;
};

/// Minimum-norm least-squares solution of (I/2 + T0) f = omega_nu.
/// Re-checks the per-component flux conditions; throws FluxViolation.
BoundaryDensity solve_f(const DomainModel& model, const LayerOperator& t0,
                        const BoundaryDensity& omega_nu,
                        BieSolveInfo* info = nullptr);

/// Minimum-norm least-squares solution of (I/2 - T0) g = -v_nu.
/// compat_scale sets the reference for the total-flux compatibility check;
/// <= 0 means use the L1 norm of v_nu itself.
BoundaryDensity solve_g(const DomainModel& model, const LayerOperator& t0,
                        const BoundaryDensity& v_nu,
                        BieSolveInfo* info = nullptr,
                        double compat_scale = -1.0);

/// Debug dump: two little-endian uint64 dims then row-major doubles.
void dump_operator(const LayerOperator& op, const std::string& path);

}  // namespace bsd
