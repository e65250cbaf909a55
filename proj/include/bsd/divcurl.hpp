#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "bsd/biot_savart.hpp"
#include "bsd/domain.hpp"
#include "bsd/layer_potentials.hpp"

namespace bsd {

/// Analytic boundary values of a volume field, used for traces when the
/// vorticity is known in closed form; nearest-node lookup otherwise.
using TraceFn = std::function<Vec3(const Vec3&)>;

struct SolveDiagnostics {
  std::vector<double> omega_fluxes;     // per boundary component
  double omega_trace_l1 = 0.0;
  BieSolveInfo f_info, g_info, q_info;
  double f_sup = 0.0, g_sup = 0.0, q_sup = 0.0;
  double v_trace_sup = 0.0;             // sup |v . nu| before the g-correction
  double reference_scale = 0.0;         // sup |u| over interior sample points
  bool div_advisory_triggered = false;
  double div_advisory_value = 0.0;      // worst |FD div omega| found
};

/// The solved field as an evaluation rule. Immutable; safe to evaluate
/// concurrently. The DomainModel must outlive the evaluator.
class FieldEvaluator {
 public:
  Vec3 operator()(const Vec3& x) const;

  const SolveDiagnostics& diagnostics() const { return diag_; }
  const DomainModel& model() const { return *model_; }
  const BoundaryDensity& density_f() const { return f_; }
  const BoundaryDensity& density_g() const { return g_; }

  /// Same evaluation rule plus an additive analytic field; diagnostics
  /// (including the normalization scale) are carried over unchanged, so a
  /// gauge perturbation does not re-scale the residual report.
  FieldEvaluator with_added_field(std::function<Vec3(const Vec3&)> extra) const;

 private:
  friend class PipelineBuilder;
  const DomainModel* model_ = nullptr;
  VolumeField omega_, grad_sf_;
  std::vector<int> omega_support_, grad_sf_support_;
  BoundaryDensity f_, g_;
  // general div-curl extras
  std::shared_ptr<const std::vector<double>> newton_src_;
  BoundaryDensity q_;
  std::function<Vec3(const Vec3&)> extra_;
  SolveDiagnostics diag_;
};

/// Generalized Biot-Savart solve: curl u = omega, div u = 0, u . nu = 0.
/// Checks the per-component flux conditions (throws FluxViolation) and
/// warns (only) when the discrete divergence of omega looks large.
FieldEvaluator solve_tangential(const DomainModel& model, const VolumeField& omega,
                                const TraceFn& omega_trace = nullptr);

/// General div-curl system: curl v = omega, div v = f_src, v . nu = g_bc,
/// subject to int f_src dx = int g_bc dsigma (throws CompatibilityViolation).
FieldEvaluator solve_general(const DomainModel& model, const VolumeField& omega,
                             const std::vector<double>& f_src,
                             const BoundaryDensity& g_bc,
                             const TraceFn& omega_trace = nullptr);

/// Newton volume potential N f(x) = int f(y) / (4 pi |x - y|) dy, so that
/// -laplace(N f) = f. The general solve uses phi0 = -N f + S q.
double newton_potential(const DomainModel& model, const std::vector<double>& f_src,
                        const Vec3& x);

struct ResidualReport {
  double curl_max = 0.0, curl_l2 = 0.0;   // |FD curl u - omega| / sup|omega|
  double div_max = 0.0, div_l2 = 0.0;     // |FD div u| / sup|omega|
  double tang_max = 0.0, tang_l2 = 0.0;   // |u . nu| at offset points / scale
  int probe_count = 0;
};

/// Finite-difference verification of the solved field: curl and divergence
/// residuals at interior probe points (margin 4h, step h/4) and the
/// tangency residual at inward-offset panel points.
ResidualReport residuals(const DomainModel& model, const FieldEvaluator& u,
                         const VolumeField& omega, int max_probes = 200);

}  // namespace bsd
