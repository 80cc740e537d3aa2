#include "ppgate/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ppgate/errors.hpp"

namespace ppgate {

namespace {

constexpr double kStateNormTol = 1e-10;
constexpr double kHermitianTol = 1e-10;
// Relative floor for eigenvalues entering a square root; round-off
// eigenvalues of rank-deficient matrices sit near 1e-16 * lambda_max.
constexpr double kSqrtRelativeFloor = 1e-13;

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

std::string eigen_report(const Eigen::VectorXd& ev) {
  std::ostringstream os;
  os << "eigenvalues [";
  for (Eigen::Index i = 0; i < ev.size(); ++i) os << (i ? ", " : "") << ev[i];
  os << "]";
  return os.str();
}

Eigen::SelfAdjointEigenSolver<ComplexMatrix> checked_eigensolve(const ComplexMatrix& m,
                                                               const char* what) {
  if (m.rows() != m.cols()) {
    throw DataError(std::string(what) + ": matrix is not square");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (!is_hermitian(m, 1e-9 * scale)) {
    throw NonPhysicalError(std::string(what) + ": matrix is not Hermitian", {});
  }
  const ComplexMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm);
  if (es.info() != Eigen::Success) {
    throw DataError(std::string(what) + ": eigendecomposition failed");
  }
  if (es.eigenvalues().minCoeff() < -kEigenvalueFloor * scale) {
    throw NonPhysicalError(std::string(what) + ": matrix is not positive semidefinite, " +
                               eigen_report(es.eigenvalues()),
                           to_vector(es.eigenvalues()));
  }
  return es;
}

// Square roots of eigenvalues with negatives and relative round-off removed.
Eigen::VectorXd floored_sqrt(const Eigen::VectorXd& ev) {
  const double cut = kSqrtRelativeFloor * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
  Eigen::VectorXd out(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    out[i] = ev[i] > cut ? std::sqrt(ev[i]) : 0.0;
  }
  return out;
}

}  // namespace

PureState2Q::PureState2Q(const Vector4c& amplitudes) : amplitudes_(amplitudes) {
  const double n2 = amplitudes.squaredNorm();
  if (!std::isfinite(n2) || std::abs(n2 - 1.0) > kStateNormTol) {
    throw DataError("PureState2Q: squared norm " + std::to_string(n2) + " is not 1");
  }
}

DensityMatrix::DensityMatrix(const Matrix4c& m) {
  if (!m.allFinite()) throw DataError("DensityMatrix: non-finite entries");
  if (!is_hermitian(m, kHermitianTol)) {
    throw NonPhysicalError("DensityMatrix: matrix is not Hermitian", {});
  }
  m_ = 0.5 * (m + m.adjoint());
  const double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > kHermitianTol) {
    throw DataError("DensityMatrix: trace " + std::to_string(tr) + " is not 1");
  }
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kEigenvalueFloor) {
    throw NonPhysicalError("DensityMatrix: not positive semidefinite, " +
                               eigen_report(es.eigenvalues()),
                           to_vector(es.eigenvalues()));
  }
}

Matrix4c cnot_unitary() {
  Matrix4c u = Matrix4c::Zero();
  u(0, 0) = 1.0;
  u(1, 1) = 1.0;
  u(2, 3) = 1.0;
  u(3, 2) = 1.0;
  return u;
}

std::array<PureState2Q, 4> bell_states() {
  const double s = 1.0 / std::sqrt(2.0);
  return {PureState2Q(Vector4c(s, 0, 0, s)), PureState2Q(Vector4c(s, 0, 0, -s)),
          PureState2Q(Vector4c(0, s, s, 0)), PureState2Q(Vector4c(0, s, -s, 0))};
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& m) {
  const auto es = checked_eigensolve(m, "matrix_sqrt_psd");
  Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();
}

ComplexMatrix clip_to_psd(const ComplexMatrix& h) {
  if (!is_hermitian(h, 1e-9 * std::max(1.0, h.cwiseAbs().maxCoeff()))) {
    throw NonPhysicalError("clip_to_psd: matrix is not Hermitian", {});
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (h + h.adjoint()));
  const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
  ComplexMatrix out = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
  return 0.5 * (out + out.adjoint());
}

double uhlmann_overlap(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DataError("uhlmann_overlap: dimension mismatch");
  }
  const auto ea = checked_eigensolve(a, "uhlmann_overlap (first argument)");
  checked_eigensolve(b, "uhlmann_overlap (second argument)");

  const ComplexMatrix sqrt_a =
      ea.eigenvectors() * floored_sqrt(ea.eigenvalues()).asDiagonal() * ea.eigenvectors().adjoint();
  ComplexMatrix inner = sqrt_a * b * sqrt_a;
  inner = 0.5 * (inner + inner.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> ei(inner, Eigen::EigenvaluesOnly);
  const double root_trace = floored_sqrt(ei.eigenvalues()).sum();
  return root_trace * root_trace;
}

double state_fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  return std::clamp(uhlmann_overlap(a.matrix(), b.matrix()), 0.0, 1.0);
}

Matrix2c pauli(int i) {
  const Complex I(0.0, 1.0);
  Matrix2c s;
  switch (i) {
    case 0: s << 1, 0, 0, 1; break;
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -I, I, 0; break;
    case 3: s << 1, 0, 0, -1; break;
    default: throw DataError("pauli: index out of range");
  }
  return s;
}

Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

Vector4c kron(const Vector2c& a, const Vector2c& b) {
  return Vector4c(a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]);
}

const std::array<Matrix4c, 16>& pauli_basis() {
  static const std::array<Matrix4c, 16> basis = [] {
    std::array<Matrix4c, 16> g;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g[4 * i + j] = kron(pauli(i), pauli(j));
    return g;
  }();
  return basis;
}

std::string_view pauli_label(int m) {
  static constexpr std::array<std::string_view, 16> labels = {
      "II", "IX", "IY", "IZ", "XI", "XX", "XY", "XZ",
      "YI", "YX", "YY", "YZ", "ZI", "ZX", "ZY", "ZZ"};
  if (m < 0 || m >= 16) throw DataError("pauli_label: index out of range");
  return labels[static_cast<std::size_t>(m)];
}

Vector16c pauli_expansion(const Matrix4c& u) {
  const auto& basis = pauli_basis();
  Vector16c c;
  for (int m = 0; m < 16; ++m) c[m] = (basis[m].adjoint() * u).trace() / 4.0;
  return c;
}

}  // namespace ppgate
