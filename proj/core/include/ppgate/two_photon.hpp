#pragma once

#include <array>

#include "ppgate/circuit.hpp"

namespace ppgate {

/// One photon on each input rail. The joint polarization amplitude psi(a, b)
/// (a: control-rail photon, b: target-rail photon, index 0 = H, 1 = V) is
/// normalized; product inputs are the rank-1 case.
class TwoPhotonInput {
 public:
  /// Throws DataError unless each vector has unit norm within 1e-10.
  static TwoPhotonInput product(const Vector2c& photon_c, const Vector2c& photon_t);
  /// Joint amplitudes in the order HH, HV, VH, VV. Must be unit norm.
  static TwoPhotonInput joint(const Vector4c& amplitudes);

  const Matrix2c& amplitudes() const noexcept { return psi_; }

 private:
  explicit TwoPhotonInput(const Matrix2c& psi) : psi_(psi) {}
  Matrix2c psi_;
};

/// Post-selected coincidences over (control-rail pol, target-rail pol) in the
/// order HH, HV, VH, VV. An empty distribution (success_prob == 0) has all
/// probabilities zero.
struct CoincidenceDistribution {
  std::array<double, 4> probs{};
  double success_prob = 0.0;

  bool empty() const noexcept { return success_prob <= 0.0; }
};

/// Weight p of the non-interfering (distinguishable) two-photon component.
class DistinguishabilityModel {
 public:
  constexpr DistinguishabilityModel() = default;
  /// Throws DataError unless 0 <= p <= 1.
  explicit DistinguishabilityModel(double p);

  constexpr double p() const noexcept { return p_; }

 private:
  double p_ = 0.0;
};

/// Unnormalized post-selected two-photon state on the output rails in the
/// physical basis {HH, HV, VH, VV}; its trace is the coincidence probability.
///   indistinguishable: |a + b><a + b|
///   distinguishable:   |a><a| + |b><b|
/// where a is the amplitude with each photon staying on its own rail's
/// output side and b the amplitude with the photons exchanged.
Matrix4c coincidence_state_indistinguishable(const TransferMatrix& m, const TwoPhotonInput& in);
Matrix4c coincidence_state_distinguishable(const TransferMatrix& m, const TwoPhotonInput& in);
/// (1 - p) * indistinguishable + p * distinguishable.
Matrix4c coincidence_state(const TransferMatrix& m, const TwoPhotonInput& in,
                           const DistinguishabilityModel& d);

CoincidenceDistribution evolve_indistinguishable(const TransferMatrix& m, const TwoPhotonInput& in);
CoincidenceDistribution evolve_distinguishable(const TransferMatrix& m, const TwoPhotonInput& in);
CoincidenceDistribution evolve_mixture(const TransferMatrix& m, const TwoPhotonInput& in,
                                       const DistinguishabilityModel& d);

/// Unnormalized coincidence weights (success_prob * probs) of each outcome.
std::array<double, 4> coincidence_weights(const Matrix4c& coincidence_state);

/// Occupation probabilities of every two-photon output configuration for
/// indistinguishable photons, indexed [k][l] with k <= l over the 4 modes.
/// Doubly occupied modes carry the bosonic factor 2 = (sqrt 2)^2. For a
/// unitary transfer matrix the upper triangle sums to 1.
Eigen::Matrix4d output_pattern_indistinguishable(const TransferMatrix& m, const TwoPhotonInput& in);

/// Coincidence-dip visibility 2R(1-R) / (R^2 + (1-R)^2) of a beam splitter
/// with reflectivity R in (0, 1).
double hom_visibility_theoretical(double reflectivity);

/// p = 1 - v_meas / v_theo. Throws DataError for v_meas > v_theo or out of
/// range inputs.
DistinguishabilityModel infer_p(double v_meas, double v_theo);

}  // namespace ppgate
