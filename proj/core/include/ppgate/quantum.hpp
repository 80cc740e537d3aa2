#pragma once

#include <array>
#include <complex>
#include <string_view>

#include <Eigen/Dense>

namespace ppgate {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using Matrix2c = Eigen::Matrix2cd;
using Vector2c = Eigen::Vector2cd;
using Matrix4c = Eigen::Matrix4cd;
using Vector4c = Eigen::Vector4cd;
using Matrix16c = Eigen::Matrix<Complex, 16, 16>;
using Vector16c = Eigen::Matrix<Complex, 16, 1>;

/// Eigenvalues in [-kEigenvalueFloor, 0) count as zero in PSD checks.
inline constexpr double kEigenvalueFloor = 1e-9;

/// Two-qubit pure state in the basis {|00>,|01>,|10>,|11>}, control as the
/// left tensor factor.
class PureState2Q {
 public:
  /// Throws DataError unless the squared norm is 1 within 1e-10.
  explicit PureState2Q(const Vector4c& amplitudes);

  const Vector4c& amplitudes() const noexcept { return amplitudes_; }
  Matrix4c projector() const { return amplitudes_ * amplitudes_.adjoint(); }

 private:
  Vector4c amplitudes_;
};

/// Two-qubit density matrix: Hermitian, unit trace, PSD (eigenvalue floor
/// applied). Construction validates; the stored matrix is exactly Hermitian.
class DensityMatrix {
 public:
  explicit DensityMatrix(const Matrix4c& m);
  DensityMatrix(const PureState2Q& psi) : DensityMatrix(psi.projector()) {}

  const Matrix4c& matrix() const noexcept { return m_; }

 private:
  Matrix4c m_;
};

Matrix4c cnot_unitary();

/// Phi+, Phi-, Psi+, Psi- in that order.
std::array<PureState2Q, 4> bell_states();

/// Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2.
double state_fidelity(const DensityMatrix& a, const DensityMatrix& b);

/// Unnormalized Uhlmann overlap for any pair of equally sized PSD matrices.
/// Throws NonPhysicalError if either is not Hermitian PSD.
double uhlmann_overlap(const ComplexMatrix& a, const ComplexMatrix& b);

/// Gamma_m = sigma_i (x) sigma_j with m = 4 i + j; sigma_0 = I, then X, Y, Z.
const std::array<Matrix4c, 16>& pauli_basis();
std::string_view pauli_label(int m);
Matrix2c pauli(int i);

/// Coefficients c_m = Tr(Gamma_m^dagger u) / 4, so u = sum_m c_m Gamma_m.
Vector16c pauli_expansion(const Matrix4c& u);

/// Hermitian PSD square root. Rejects non-Hermitian or indefinite input.
ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& m);

/// Eigenvalue-clipping projection onto the PSD cone (no trace change).
ComplexMatrix clip_to_psd(const ComplexMatrix& h);

bool is_hermitian(const ComplexMatrix& m, double tol);

Matrix4c kron(const Matrix2c& a, const Matrix2c& b);
Vector4c kron(const Vector2c& a, const Vector2c& b);

}  // namespace ppgate
