#include "ppgate/gate_analysis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ppgate/errors.hpp"

namespace ppgate {

namespace {

constexpr double kRowSumTol = 1e-9;
constexpr int kCnotOutcome[4] = {0, 1, 3, 2};
constexpr double kCalibrationThreshold = 0.99;

Vector4c basis_vector(int i) {
  Vector4c v = Vector4c::Zero();
  v[i] = 1.0;
  return v;
}

double wrap_phase(double phi) {
  const double two_pi = 2.0 * std::numbers::pi;
  phi = std::fmod(phi, two_pi);
  if (phi < 0.0) phi += two_pi;
  // Snap values within round-off of 2 pi back to 0.
  return two_pi - phi < 1e-12 ? 0.0 : phi;
}

double overlap(const Matrix4c& rho, const Vector4c& psi) {
  return (psi.adjoint() * rho * psi)(0, 0).real();
}

double mean_bell_overlap(const TransferMatrix& device, const DistinguishabilityModel& d) {
  const auto inputs = entangling_inputs();
  const auto targets = bell_states();
  double sum = 0.0;
  for (int k = 0; k < 4; ++k) {
    const Matrix4c out = logical_output(device, inputs[k], d);
    const double tr = out.trace().real();
    if (tr <= 0.0) return 0.0;
    sum += overlap(out, targets[k].amplitudes()) / tr;
  }
  return sum / 4.0;
}

double& coord(PhaseCompensation& p, int i) {
  switch (i) {
    case 0: return p.control_in;
    case 1: return p.target_in;
    case 2: return p.control_out;
    default: return p.target_out;
  }
}

}  // namespace

namespace encoding {

Vector2c control_state(int bit) {
  if (bit == 0) return Vector2c(0.0, 1.0);
  if (bit == 1) return Vector2c(1.0, 0.0);
  throw DataError("control_state: bit must be 0 or 1");
}

Vector2c target_state(int bit) {
  const double s = 1.0 / std::sqrt(2.0);
  if (bit == 0) return Vector2c(s, s);
  if (bit == 1) return Vector2c(s, -s);
  throw DataError("target_state: bit must be 0 or 1");
}

Matrix4c logical_to_physical() {
  static const Matrix4c e = [] {
    Matrix4c m;
    for (int c = 0; c < 2; ++c)
      for (int t = 0; t < 2; ++t) m.col(2 * c + t) = kron(control_state(c), target_state(t));
    return m;
  }();
  return e;
}

}  // namespace encoding

TwoPhotonInput logical_input_state(int control_bit, int target_bit) {
  return TwoPhotonInput::product(encoding::control_state(control_bit),
                                 encoding::target_state(target_bit));
}

TwoPhotonInput logical_input(const Vector4c& logical_amplitudes) {
  return TwoPhotonInput::joint(encoding::logical_to_physical() * logical_amplitudes);
}

Matrix4c logical_output(const TransferMatrix& device, const Vector4c& logical_amplitudes,
                        const DistinguishabilityModel& d) {
  const Matrix4c& e = encoding::logical_to_physical();
  const Matrix4c phys = coincidence_state(device, logical_input(logical_amplitudes), d);
  return e.adjoint() * phys * e;
}

TruthTable::TruthTable(const Eigen::Matrix4d& rows) : rows_(rows) {
  if (!rows.allFinite()) throw DataError("TruthTable: non-finite entries");
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (rows(i, j) < -kRowSumTol || rows(i, j) > 1.0 + kRowSumTol) {
        throw DataError("TruthTable: entry (" + std::to_string(i) + "," + std::to_string(j) +
                        ") outside [0, 1]");
      }
    }
    if (std::abs(rows.row(i).sum() - 1.0) > kRowSumTol) {
      throw DataError("TruthTable: row " + std::to_string(i) + " does not sum to 1");
    }
  }
  rows_ = rows_.cwiseMax(0.0).cwiseMin(1.0);
}

std::array<double, 4> success_probabilities(const TransferMatrix& device,
                                            const DistinguishabilityModel& d) {
  std::array<double, 4> s{};
  for (int k = 0; k < 4; ++k) s[k] = logical_output(device, basis_vector(k), d).trace().real();
  return s;
}

TruthTable truth_table(const TransferMatrix& device, const DistinguishabilityModel& d) {
  Eigen::Matrix4d rows;
  for (int k = 0; k < 4; ++k) {
    const Matrix4c out = logical_output(device, basis_vector(k), d);
    const double tr = out.trace().real();
    if (!(tr > 0.0)) {
      throw DataError("truth_table: device blocks logical input |" + std::to_string(k >> 1) +
                      std::to_string(k & 1) + ">");
    }
    for (int j = 0; j < 4; ++j) rows(k, j) = std::max(0.0, out(j, j).real()) / tr;
  }
  return TruthTable(rows);
}

double truth_table_fidelity(const TruthTable& tt) {
  double f = 0.0;
  for (int k = 0; k < 4; ++k) f += tt(k, kCnotOutcome[k]);
  return f / 4.0;
}

Eigen::Matrix4d subtract_distinguishable(const Eigen::Matrix4d& tt_meas,
                                         const Eigen::Matrix4d& tt_dist, double p) {
  if (!std::isfinite(p) || p < 0.0 || p >= 1.0) {
    throw DataError("correct_distinguishability: p must lie in [0, 1)");
  }
  return (tt_meas - p * tt_dist) / (1.0 - p);
}

TruthTable correct_distinguishability(const TruthTable& tt_meas, const TruthTable& tt_dist, double p) {
  Eigen::Matrix4d rows = subtract_distinguishable(tt_meas.rows(), tt_dist.rows(), p).cwiseMax(0.0);
  for (int k = 0; k < 4; ++k) {
    const double s = rows.row(k).sum();
    if (!(s > 0.0)) {
      throw DataError("correct_distinguishability: row " + std::to_string(k) +
                      " vanishes after subtraction");
    }
    rows.row(k) /= s;
  }
  return TruthTable(rows);
}

std::array<double, 4> effective_distinguishable_weights(const TransferMatrix& device, double p) {
  if (!(p >= 0.0 && p < 1.0)) throw DataError("distinguishability weight p must lie in [0, 1)");
  const auto s_ind = success_probabilities(device, DistinguishabilityModel(0.0));
  const auto s_dist = success_probabilities(device, DistinguishabilityModel(1.0));
  std::array<double, 4> w{};
  for (int k = 0; k < 4; ++k) {
    const double a = (1.0 - p) * s_ind[k];
    const double b = p * s_dist[k];
    if (!(a + b > 0.0)) throw DataError("input " + std::to_string(k) + " never produces a coincidence");
    w[k] = b / (a + b);
  }
  return w;
}

TruthTable correct_distinguishability(const TruthTable& tt_meas, const TransferMatrix& device, double p) {
  const auto w = effective_distinguishable_weights(device, p);
  const auto dist = truth_table(device, DistinguishabilityModel(1.0));
  Eigen::Matrix4d rows;
  for (int k = 0; k < 4; ++k) {
    if (!(w[k] < 1.0)) throw DataError("input " + std::to_string(k) + " has no interfering component");
    rows.row(k) = ((tt_meas.rows().row(k) - w[k] * dist.rows().row(k)) / (1.0 - w[k])).cwiseMax(0.0);
    const double sum = rows.row(k).sum();
    if (!(sum > 0.0)) {
      throw DataError("correct_distinguishability: row " + std::to_string(k) + " vanishes after subtraction");
    }
    rows.row(k) /= sum;
  }
  return TruthTable(rows);
}

TransferMatrix compensate(const TransferMatrix& device, const PhaseCompensation& ph) {
  const auto phase = [](double phi) { return std::polar(1.0, phi); };
  const Eigen::Vector4cd in(1.0, phase(ph.control_in), 1.0, phase(ph.target_in));
  const Eigen::Vector4cd out(1.0, phase(ph.control_out), 1.0, phase(ph.target_out));
  const Matrix4c m = out.asDiagonal() * device.matrix() * in.asDiagonal();
  return device.is_unitary() ? TransferMatrix::unitary(m) : TransferMatrix::subunitary(m);
}

CompensationFit optimize_compensation(const TransferMatrix& device, const DistinguishabilityModel& d) {
  constexpr int kSteps = 8;
  const double step0 = 2.0 * std::numbers::pi / kSteps;

  CompensationFit best;
  best.mean_bell_fidelity = -1.0;
  for (int a = 0; a < kSteps; ++a)
    for (int b = 0; b < kSteps; ++b)
      for (int c = 0; c < kSteps; ++c)
        for (int e = 0; e < kSteps; ++e) {
          const PhaseCompensation ph{a * step0, b * step0, c * step0, e * step0};
          const double f = mean_bell_overlap(compensate(device, ph), d);
          if (f > best.mean_bell_fidelity + 1e-12) best = {ph, f};
        }

  // Coordinate pattern search around the best grid point.
  for (double step = step0 / 2.0; step > 1e-10; step /= 2.0) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int i = 0; i < 4; ++i) {
        for (double dir : {1.0, -1.0}) {
          PhaseCompensation trial = best.phases;
          coord(trial, i) += dir * step;
          const double f = mean_bell_overlap(compensate(device, trial), d);
          if (f > best.mean_bell_fidelity + 1e-15) {
            best = {trial, f};
            improved = true;
          }
        }
      }
    }
  }
  for (int i = 0; i < 4; ++i) coord(best.phases, i) = wrap_phase(coord(best.phases, i));
  best.mean_bell_fidelity = std::min(1.0, best.mean_bell_fidelity);
  return best;
}

Calibration calibrate_phases(const DeviceDescription& ideal) {
  const Convention own = ideal.convention;
  const Convention other =
      own == Convention::ImagCross ? Convention::RealAsym : Convention::ImagCross;

  Calibration best;
  best.mean_bell_fidelity = -1.0;
  for (const Convention conv : {own, other}) {
    const auto fit = optimize_compensation(ideal.build(conv));
    if (fit.mean_bell_fidelity > best.mean_bell_fidelity + 1e-12) {
      best = {conv, fit.phases, fit.mean_bell_fidelity};
    }
  }
  if (best.mean_bell_fidelity <= kCalibrationThreshold) {
    throw Error("calibrate_phases: no convention reaches mean Bell fidelity 0.99 on the ideal device "
                "(best " + std::to_string(best.mean_bell_fidelity) + "); the chip model is inconsistent");
  }
  return best;
}

const Calibration& frozen_calibration(Convention convention) {
  const auto calibrate = [](Convention conv) {
    const auto fit = optimize_compensation(ideal_device_description(conv).build());
    if (fit.mean_bell_fidelity <= kCalibrationThreshold) {
      throw Error("frozen_calibration: ideal device does not reach mean Bell fidelity 0.99");
    }
    return Calibration{conv, fit.phases, fit.mean_bell_fidelity};
  };
  static const Calibration imag = calibrate(Convention::ImagCross);
  static const Calibration real = calibrate(Convention::RealAsym);
  return convention == Convention::ImagCross ? imag : real;
}

TransferMatrix calibrated_device(const DeviceDescription& device, std::optional<Convention> convention) {
  const Convention conv = convention.value_or(device.convention);
  return compensate(device.build(conv), frozen_calibration(conv).phases);
}

std::array<Vector4c, 4> entangling_inputs() {
  const double s = 1.0 / std::sqrt(2.0);
  // |+/-> on control (x) |0> or |1> on target.
  return {Vector4c(s, 0, s, 0), Vector4c(s, 0, -s, 0), Vector4c(0, s, 0, s), Vector4c(0, s, 0, -s)};
}

BellGeneration bell_generation(const TransferMatrix& device, const DistinguishabilityModel& d) {
  const auto inputs = entangling_inputs();
  const auto targets = bell_states();
  BellGeneration g;
  for (int k = 0; k < 4; ++k) {
    const Matrix4c out = logical_output(device, inputs[k], d);
    const double tr = out.trace().real();
    if (!(tr > 0.0)) {
      throw DataError("bell_generation: zero success probability for input " + std::to_string(k));
    }
    g.success_probs[k] = tr;
    g.outputs[k] = out / tr;
    g.fidelities[k] = state_fidelity(DensityMatrix(g.outputs[k]), DensityMatrix(targets[k]));
    g.mean_fidelity += g.fidelities[k] / 4.0;
  }
  return g;
}

std::array<Vector4c, 4> discrimination_outcomes() { return entangling_inputs(); }

BellDiscrimination confusion_from_outputs(const std::array<Matrix4c, 4>& outputs) {
  const auto outcomes = discrimination_outcomes();
  BellDiscrimination r;
  r.confusion.setZero();
  for (int k = 0; k < 4; ++k) {
    const double tr = outputs[k].trace().real();
    if (!(tr > 0.0)) {
      throw DataError("bell_discrimination: zero success probability for Bell input " +
                      std::to_string(k));
    }
    for (int j = 0; j < 4; ++j) r.confusion(k, j) = std::max(0.0, overlap(outputs[k], outcomes[j])) / tr;
    r.probability += r.confusion(k, k) / 4.0;
  }
  return r;
}

BellDiscrimination bell_discrimination(const TransferMatrix& device, const DistinguishabilityModel& d) {
  const auto bells = bell_states();
  std::array<Matrix4c, 4> outputs;
  for (int k = 0; k < 4; ++k) outputs[k] = logical_output(device, bells[k].amplitudes(), d);
  return confusion_from_outputs(outputs);
}

}  // namespace ppgate
