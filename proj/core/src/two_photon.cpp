#include "ppgate/two_photon.hpp"

#include <algorithm>
#include <cmath>

#include "ppgate/errors.hpp"

namespace ppgate {

namespace {

constexpr double kNormTol = 1e-10;

void check_unit(double n2, const char* what) {
  if (!std::isfinite(n2) || std::abs(n2 - 1.0) > kNormTol) {
    throw DataError(std::string("TwoPhotonInput: ") + what + " is not unit norm");
  }
}

// Coincidence amplitudes with both photons keeping their side (direct) and
// with the photons exchanged between rails (swapped), index 2k + l.
struct RoutedAmplitudes {
  Vector4c direct = Vector4c::Zero();
  Vector4c swapped = Vector4c::Zero();
};

RoutedAmplitudes routed(const TransferMatrix& tm, const TwoPhotonInput& in) {
  const Matrix4c& m = tm.matrix();
  const Matrix2c& psi = in.amplitudes();
  RoutedAmplitudes r;
  for (int k = 0; k < 2; ++k) {
    for (int l = 0; l < 2; ++l) {
      Complex direct = 0.0;
      Complex swapped = 0.0;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          if (psi(a, b) == Complex(0.0)) continue;
          direct += psi(a, b) * m(k, a) * m(2 + l, 2 + b);
          swapped += psi(a, b) * m(k, 2 + b) * m(2 + l, a);
        }
      }
      r.direct[2 * k + l] = direct;
      r.swapped[2 * k + l] = swapped;
    }
  }
  return r;
}

CoincidenceDistribution distribution_of(const Matrix4c& state) {
  CoincidenceDistribution d;
  const auto w = coincidence_weights(state);
  for (double x : w) d.success_prob += x;
  if (d.success_prob > 0.0) {
    for (int i = 0; i < 4; ++i) d.probs[i] = w[i] / d.success_prob;
  } else {
    d.success_prob = 0.0;
  }
  return d;
}

}  // namespace

TwoPhotonInput TwoPhotonInput::product(const Vector2c& photon_c, const Vector2c& photon_t) {
  check_unit(photon_c.squaredNorm(), "control photon");
  check_unit(photon_t.squaredNorm(), "target photon");
  return TwoPhotonInput(photon_c * photon_t.transpose());
}

TwoPhotonInput TwoPhotonInput::joint(const Vector4c& amplitudes) {
  check_unit(amplitudes.squaredNorm(), "joint amplitude");
  Matrix2c psi;
  psi << amplitudes[0], amplitudes[1], amplitudes[2], amplitudes[3];
  return TwoPhotonInput(psi);
}

DistinguishabilityModel::DistinguishabilityModel(double p) : p_(p) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw DataError("DistinguishabilityModel: p = " + std::to_string(p) + " is outside [0, 1]");
  }
}

Matrix4c coincidence_state_indistinguishable(const TransferMatrix& m, const TwoPhotonInput& in) {
  const auto r = routed(m, in);
  const Vector4c psi = r.direct + r.swapped;
  return psi * psi.adjoint();
}

Matrix4c coincidence_state_distinguishable(const TransferMatrix& m, const TwoPhotonInput& in) {
  const auto r = routed(m, in);
  return r.direct * r.direct.adjoint() + r.swapped * r.swapped.adjoint();
}

Matrix4c coincidence_state(const TransferMatrix& m, const TwoPhotonInput& in,
                           const DistinguishabilityModel& d) {
  const double p = d.p();
  if (p == 0.0) return coincidence_state_indistinguishable(m, in);
  if (p == 1.0) return coincidence_state_distinguishable(m, in);
  return (1.0 - p) * coincidence_state_indistinguishable(m, in) +
         p * coincidence_state_distinguishable(m, in);
}

std::array<double, 4> coincidence_weights(const Matrix4c& state) {
  std::array<double, 4> w{};
  for (int i = 0; i < 4; ++i) w[i] = std::max(0.0, state(i, i).real());
  return w;
}

CoincidenceDistribution evolve_indistinguishable(const TransferMatrix& m, const TwoPhotonInput& in) {
  return distribution_of(coincidence_state_indistinguishable(m, in));
}

CoincidenceDistribution evolve_distinguishable(const TransferMatrix& m, const TwoPhotonInput& in) {
  return distribution_of(coincidence_state_distinguishable(m, in));
}

CoincidenceDistribution evolve_mixture(const TransferMatrix& m, const TwoPhotonInput& in,
                                       const DistinguishabilityModel& d) {
  return distribution_of(coincidence_state(m, in, d));
}

Eigen::Matrix4d output_pattern_indistinguishable(const TransferMatrix& tm, const TwoPhotonInput& in) {
  const Matrix4c& m = tm.matrix();
  const Matrix2c& psi = in.amplitudes();
  // t(k, l): first photon (from the control side) ends in k, second in l.
  Matrix4c t = Matrix4c::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) t += psi(a, b) * m.col(a) * m.col(2 + b).transpose();

  Eigen::Matrix4d pattern = Eigen::Matrix4d::Zero();
  for (int k = 0; k < 4; ++k) {
    pattern(k, k) = 2.0 * std::norm(t(k, k));
    for (int l = k + 1; l < 4; ++l) pattern(k, l) = std::norm(t(k, l) + t(l, k));
  }
  return pattern;
}

double hom_visibility_theoretical(double r) {
  if (!std::isfinite(r) || r <= 0.0 || r >= 1.0) {
    throw DataError("hom_visibility_theoretical: reflectivity " + std::to_string(r) +
                    " must lie strictly inside (0, 1)");
  }
  return 2.0 * r * (1.0 - r) / (r * r + (1.0 - r) * (1.0 - r));
}

DistinguishabilityModel infer_p(double v_meas, double v_theo) {
  if (!std::isfinite(v_theo) || v_theo <= 0.0 || v_theo > 1.0) {
    throw DataError("infer_p: theoretical visibility must lie in (0, 1]");
  }
  if (!std::isfinite(v_meas) || v_meas < 0.0) {
    throw DataError("infer_p: measured visibility must be non-negative");
  }
  if (v_meas > v_theo) {
    throw DataError("infer_p: measured visibility exceeds the theoretical bound (nonphysical)");
  }
  return DistinguishabilityModel(1.0 - v_meas / v_theo);
}

}  // namespace ppgate
