#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ppgate/gate_analysis.hpp"

namespace ppgate {

/// Single-qubit analysis/preparation states in the logical basis:
/// H = |0>, V = |1>, D = (|0> + |1>)/sqrt2, A = (|0> - |1>)/sqrt2,
/// R = (|0> + i|1>)/sqrt2, L = (|0> - i|1>)/sqrt2.
enum class PolState { H, V, D, A, R, L };

Vector2c pol_state_vector(PolState s);
char pol_state_char(PolState s);
PolState pol_state_from_char(char c);  // throws DataError

/// Product projector |i><i| (x) |j><j| (also used for product preparations).
struct MeasSetting {
  PolState first = PolState::H;
  PolState second = PolState::H;

  Vector4c ket() const { return kron(pol_state_vector(first), pol_state_vector(second)); }
  Matrix4c projector() const { Vector4c k = ket(); return k * k.adjoint(); }
  std::string label() const { return {pol_state_char(first), pol_state_char(second)}; }
  static MeasSetting parse(const std::string& label);  // e.g. "HD"

  friend bool operator==(const MeasSetting&, const MeasSetting&) = default;
};

/// Product input state; same label format as MeasSetting.
using InputPreparation = MeasSetting;

/// The 36 analysis settings {H,V,D,A,R,L}^2, row-major.
const std::array<MeasSetting, 36>& all_settings();

/// The 16 informationally complete inputs {H,V,D,R}^2, row-major.
const std::array<InputPreparation, 16>& process_preparations();

struct CountsRecord {
  InputPreparation preparation;
  MeasSetting setting;
  std::uint64_t shots = 0;
  std::uint64_t successes = 0;

  friend bool operator==(const CountsRecord&, const CountsRecord&) = default;
};

/// Post-selected projection probability: the chance that a coincidence
/// event lands in `setting`. Zero if the preparation never yields a
/// coincidence.
double setting_probability(const TransferMatrix& device, const DistinguishabilityModel& d,
                           const InputPreparation& prep, const MeasSetting& setting);

/// successes ~ Binomial(shots, setting_probability). Deterministic in seed.
CountsRecord simulate_counts(const TransferMatrix& device, const DistinguishabilityModel& d,
                             const InputPreparation& prep, const MeasSetting& setting,
                             std::uint64_t shots, std::uint64_t seed);

/// Seed of the (prep, setting) cell derived from a run seed, so every cell has
/// its own stream and results do not depend on evaluation order.
std::uint64_t cell_seed(std::uint64_t run_seed, int prep_index, int setting_index);

/// Relative frequency attached to one analysis setting.
struct SettingFrequency {
  MeasSetting setting;
  double frequency = 0.0;
};

std::vector<SettingFrequency> frequencies(std::span<const CountsRecord> records);

/// Exact post-selected setting probabilities (shot-free) for one
/// preparation. Throws DataError if it never yields a coincidence.
std::vector<SettingFrequency> exact_frequencies(const TransferMatrix& device,
                                                const DistinguishabilityModel& d,
                                                const InputPreparation& prep);

struct StateEstimate {
  ComplexMatrix rho;   // Hermitian, trace 1
  double yield = 0.0;  // trace before normalization; 1 for consistent post-selected data
};

/// Least-squares linear inversion of the 36 settings onto the 16 Pauli
/// expectation values. Throws DataError listing missing settings, and if no
/// coincidences were recorded.
StateEstimate linear_inversion(std::span<const SettingFrequency> data);
ComplexMatrix linear_inversion_state(std::span<const SettingFrequency> data);
ComplexMatrix linear_inversion_state(std::span<const CountsRecord> records);

/// Eigenvalue clipping then trace renormalization. Throws DataError if
/// nothing positive remains.
DensityMatrix project_to_physical(const ComplexMatrix& h);

/// 16x16 process matrix in the Pauli tensor basis, E(rho) = sum chi_mn G_m rho G_n^dagger.
class ChiMatrix {
 public:
  /// Throws DataError unless 16x16 and Hermitian within 1e-9.
  explicit ChiMatrix(const Matrix16c& chi);

  const Matrix16c& matrix() const noexcept { return chi_; }
  Complex operator()(int m, int n) const { return chi_(m, n); }
  double trace() const { return chi_.trace().real(); }

  Matrix4c apply(const Matrix4c& rho) const;

 private:
  Matrix16c chi_;
};

/// chi of the unitary channel u: c c^dagger with c = pauli_expansion(u).
ChiMatrix chi_of_unitary(const Matrix4c& u);

/// Reconstruct chi from (unnormalized) output states of the 16 process
/// preparations, in process_preparations() order. Hermitized, clipped to
/// PSD, trace normalized to 1.
ChiMatrix chi_from_outputs(const std::array<Matrix4c, 16>& outputs);

/// Full pipeline on 16 x 36 records.
ChiMatrix reconstruct_process(std::span<const CountsRecord> records);

/// All 576 count records of a process tomography run.
std::vector<CountsRecord> process_counts(const TransferMatrix& device, const DistinguishabilityModel& d,
                                         std::uint64_t shots, std::uint64_t seed);

/// shots == 0 selects exact probabilities; each output is then weighted by
/// its success probability. Sampled runs only see post-selected counts, so
/// every output is trace normalized.
ChiMatrix process_tomography(const TransferMatrix& device, const DistinguishabilityModel& d,
                             std::uint64_t shots, std::uint64_t seed);

/// Sampled truth-table run: each computational-basis input (HH, HV, VH, VV
/// in logical labels) against the four computational settings, seeded per cell.
std::vector<CountsRecord> truth_table_counts(const TransferMatrix& device, const DistinguishabilityModel& d,
                                             std::uint64_t shots, std::uint64_t seed);

/// Row-normalized coincidence counts. Throws DataError if a computational
/// input or outcome is missing or a row has no coincidences.
TruthTable truth_table_from_counts(std::span<const CountsRecord> records);

/// Tr[sqrt(sqrt(a) b sqrt(a))]^2 / (Tr a Tr b).
double process_fidelity(const ChiMatrix& a, const ChiMatrix& b);

}  // namespace ppgate
