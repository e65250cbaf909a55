#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bsd {

// Base classes group errors by CLI exit code: mesh/domain construction (2),
// admissibility of the data (3), numerical failure (4).
struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AdmissibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonManifold : MeshError {
  using MeshError::MeshError;
};

struct OpenSurface : MeshError {
  using MeshError::MeshError;
};

struct DegeneratePanel : MeshError {
  using MeshError::MeshError;
};

struct EmptyQuadrature : MeshError {
  using MeshError::MeshError;
};

struct OutsideDomain : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TooCloseToBoundary : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SizeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FluxViolation : AdmissibilityError {
  FluxViolation(const std::string& msg, std::vector<double> fluxes)
      : AdmissibilityError(msg), component_fluxes(std::move(fluxes)) {}
  std::vector<double> component_fluxes;
};

struct CompatibilityViolation : AdmissibilityError {
  using AdmissibilityError::AdmissibilityError;
};

struct IllConditioned : NumericalError {
  using NumericalError::NumericalError;
};

struct CoincidentPoints : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OnAxis : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bsd
