#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sc {

using Complex = std::complex<double>;
using DenseOperator = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Base for all numerical-failure exceptions thrown by the library.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularShift : NumericalError {
    Complex shift;
    Complex nearest_eigenvalue;
    SingularShift(Complex z, Complex nearest)
        : NumericalError("shift z = (" + std::to_string(z.real()) + "," + std::to_string(z.imag()) +
                         ") is within tolerance of the spectrum; nearest eigenvalue (" +
                         std::to_string(nearest.real()) + "," + std::to_string(nearest.imag()) + ")"),
          shift(z),
          nearest_eigenvalue(nearest) {}
};

struct NoEigenvalueNear : NumericalError {
    using NumericalError::NumericalError;
};
struct RankDeficient : NumericalError {
    using NumericalError::NumericalError;
};
struct NotIsolated : NumericalError {
    using NumericalError::NumericalError;
};
struct QuadratureStall : NumericalError {
    using NumericalError::NumericalError;
};
struct ShiftInSpectrum : NumericalError {
    using NumericalError::NumericalError;
};
struct RankCollapse : NumericalError {
    using NumericalError::NumericalError;
};
struct EffectiveSingular : NumericalError {
    using NumericalError::NumericalError;
};
struct SchurSingular : NumericalError {
    using NumericalError::NumericalError;
};
struct SeriesDiverges : NumericalError {
    using NumericalError::NumericalError;
};
struct NotSelfAdjoint : NumericalError {
    using NumericalError::NumericalError;
};
struct NonOrthogonalProjector : NumericalError {
    using NumericalError::NumericalError;
};
struct TooFewPoints : NumericalError {
    using NumericalError::NumericalError;
};
struct ClusterDisconnected : NumericalError {
    using NumericalError::NumericalError;
};
struct HypothesisViolation : NumericalError {
    using NumericalError::NumericalError;
};
struct EmptyKernel : NumericalError {
    using NumericalError::NumericalError;
};
struct BadGrid : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace sc
