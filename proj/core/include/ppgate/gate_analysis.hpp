#pragma once

#include <array>
#include <optional>

#include "ppgate/two_photon.hpp"

namespace ppgate {

/// Dual-rail polarization encoding of the two logical qubits:
/// control |0> = V, |1> = H; target |0> = A = (H + V)/sqrt2, |1> = D = (H - V)/sqrt2.
namespace encoding {
Vector2c control_state(int bit);
Vector2c target_state(int bit);
/// Columns are the physical {HH, HV, VH, VV} images of the logical basis
/// {|00>, |01>, |10>, |11>}.
Matrix4c logical_to_physical();
}  // namespace encoding

TwoPhotonInput logical_input_state(int control_bit, int target_bit);

/// Physical two-photon input carrying an arbitrary logical two-qubit state.
TwoPhotonInput logical_input(const Vector4c& logical_amplitudes);

/// Unnormalized post-selected output in the logical basis; trace = success
/// probability.
Matrix4c logical_output(const TransferMatrix& device, const Vector4c& logical_amplitudes,
                        const DistinguishabilityModel& d);

/// Rows: logical inputs 00, 01, 10, 11. Columns: logical outcomes. Entries in
/// [0, 1], rows sum to 1 within 1e-9.
class TruthTable {
 public:
  explicit TruthTable(const Eigen::Matrix4d& rows);

  const Eigen::Matrix4d& rows() const noexcept { return rows_; }
  double operator()(int in, int out) const { return rows_(in, out); }

 private:
  Eigen::Matrix4d rows_;
};

/// Logical outcome probabilities per computational-basis input. Throws
/// DataError if an input has zero success probability.
TruthTable truth_table(const TransferMatrix& device, const DistinguishabilityModel& d);

/// Coincidence probability of each computational-basis input.
std::array<double, 4> success_probabilities(const TransferMatrix& device,
                                            const DistinguishabilityModel& d);

/// Mean probability of the correct CNOT outcome over the four inputs.
double truth_table_fidelity(const TruthTable& tt);

/// (tt_meas - p tt_dist) / (1 - p) without clipping or renormalization.
Eigen::Matrix4d subtract_distinguishable(const Eigen::Matrix4d& tt_meas,
                                         const Eigen::Matrix4d& tt_dist, double p);

/// Per-row subtraction of the distinguishable-photon table with weight p,
/// negative entries clipped to 0, rows renormalized. Requires 0 <= p < 1.
TruthTable correct_distinguishability(const TruthTable& tt_meas, const TruthTable& tt_dist, double p);

/// Weight of the distinguishable component within each row of a truth table
/// measured at distinguishability p: rows of the two components mix in
/// proportion to their coincidence probabilities, so the row weight is
/// p s_dist / ((1 - p) s_ind + p s_dist). Requires 0 <= p < 1.
std::array<double, 4> effective_distinguishable_weights(const TransferMatrix& device, double p);

/// Undoes the physical mixture exactly using the device model: per-row
/// subtraction with effective_distinguishable_weights, clipped and
/// renormalized.
TruthTable correct_distinguishability(const TruthTable& tt_meas, const TransferMatrix& device, double p);

/// Local phases diag(1, e^{i phi}) on the (H, V) modes of each rail, before
/// (in) and after (out) the device.
struct PhaseCompensation {
  double control_in = 0.0;
  double target_in = 0.0;
  double control_out = 0.0;
  double target_out = 0.0;

  friend bool operator==(const PhaseCompensation&, const PhaseCompensation&) = default;
};

TransferMatrix compensate(const TransferMatrix& device, const PhaseCompensation& phases);

struct CompensationFit {
  PhaseCompensation phases;
  double mean_bell_fidelity = 0.0;
};

/// Phases maximizing the mean Bell fidelity of the four entangling inputs:
/// grid over multiples of pi/4, then pattern-search refinement.
CompensationFit optimize_compensation(const TransferMatrix& device,
                                      const DistinguishabilityModel& d = DistinguishabilityModel{});

struct Calibration {
  Convention convention = Convention::ImagCross;
  PhaseCompensation phases;
  double mean_bell_fidelity = 0.0;
};

/// Calibrates every convention against `ideal` and keeps the best one
/// (ties resolved in favour of the description's own convention). Throws
/// Error if no convention exceeds mean Bell fidelity 0.99.
Calibration calibrate_phases(const DeviceDescription& ideal);

/// Compensation calibrated once against the ideal chip in `convention` and
/// cached for the lifetime of the process.
const Calibration& frozen_calibration(Convention convention);

/// Builds the device and applies the frozen compensation of its convention.
TransferMatrix calibrated_device(const DeviceDescription& device,
                                 std::optional<Convention> convention = std::nullopt);

struct BellGeneration {
  std::array<Matrix4c, 4> outputs;  // normalized, logical basis
  std::array<double, 4> fidelities{};
  std::array<double, 4> success_probs{};
  double mean_fidelity = 0.0;
};

/// Inputs |+0>, |-0>, |+1>, |-1>; targets Phi+, Phi-, Psi+, Psi-.
std::array<Vector4c, 4> entangling_inputs();

BellGeneration bell_generation(const TransferMatrix& device, const DistinguishabilityModel& d);

struct BellDiscrimination {
  Eigen::Matrix4d confusion;  // rows: Bell input, cols: outcome
  double probability = 0.0;   // mean diagonal
};

/// Product basis the ideal gate maps Phi+, Phi-, Psi+, Psi- onto:
/// |+0>, |-0>, |+1>, |-1>.
std::array<Vector4c, 4> discrimination_outcomes();

/// Confusion matrix of four (unnormalized) logical output states.
BellDiscrimination confusion_from_outputs(const std::array<Matrix4c, 4>& outputs);

BellDiscrimination bell_discrimination(const TransferMatrix& device, const DistinguishabilityModel& d);

}  // namespace ppgate
