#include "ppgate/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <Eigen/LU>
#include <Eigen/QR>

#include "ppgate/errors.hpp"

namespace ppgate {

namespace {

constexpr std::array<PolState, 6> kAllStates = {PolState::H, PolState::V, PolState::D,
                                                PolState::A, PolState::R, PolState::L};

int setting_index(const MeasSetting& s) {
  return 6 * static_cast<int>(s.first) + static_cast<int>(s.second);
}

// Rows: the 36 settings; columns: Tr(P_s Gamma_m) / 4, so that
// Tr(P_s rho) = A r with r_m = Tr(Gamma_m rho).
const Eigen::Matrix<double, 36, 16>& design_matrix() {
  static const Eigen::Matrix<double, 36, 16> a = [] {
    Eigen::Matrix<double, 36, 16> m;
    const auto& settings = all_settings();
    const auto& basis = pauli_basis();
    for (int s = 0; s < 36; ++s) {
      const Matrix4c p = settings[s].projector();
      for (int k = 0; k < 16; ++k) m(s, k) = (p * basis[k]).trace().real() / 4.0;
    }
    return m;
  }();
  return a;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

Vector2c pol_state_vector(PolState s) {
  const double r = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  switch (s) {
    case PolState::H: return {1.0, 0.0};
    case PolState::V: return {0.0, 1.0};
    case PolState::D: return {r, r};
    case PolState::A: return {r, -r};
    case PolState::R: return {r, i * r};
    case PolState::L: return {r, -i * r};
  }
  throw DataError("pol_state_vector: invalid state");
}

char pol_state_char(PolState s) { return "HVDARL"[static_cast<int>(s)]; }

PolState pol_state_from_char(char c) {
  for (const auto s : kAllStates)
    if (pol_state_char(s) == c) return s;
  throw DataError(std::string("unknown polarization label '") + c + "'");
}

MeasSetting MeasSetting::parse(const std::string& label) {
  if (label.size() != 2) throw DataError("setting label '" + label + "' must have two letters");
  return {pol_state_from_char(label[0]), pol_state_from_char(label[1])};
}

const std::array<MeasSetting, 36>& all_settings() {
  static const std::array<MeasSetting, 36> settings = [] {
    std::array<MeasSetting, 36> out;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) out[6 * i + j] = {kAllStates[i], kAllStates[j]};
    return out;
  }();
  return settings;
}

const std::array<InputPreparation, 16>& process_preparations() {
  static const std::array<InputPreparation, 16> preps = [] {
    constexpr std::array<PolState, 4> set = {PolState::H, PolState::V, PolState::D, PolState::R};
    std::array<InputPreparation, 16> out;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) out[4 * i + j] = {set[i], set[j]};
    return out;
  }();
  return preps;
}

double setting_probability(const TransferMatrix& device, const DistinguishabilityModel& d,
                           const InputPreparation& prep, const MeasSetting& setting) {
  const Matrix4c out = logical_output(device, prep.ket(), d);
  const double success = out.trace().real();
  if (!(success > 0.0)) return 0.0;
  const Vector4c k = setting.ket();
  return std::clamp((k.adjoint() * out * k)(0, 0).real() / success, 0.0, 1.0);
}

CountsRecord simulate_counts(const TransferMatrix& device, const DistinguishabilityModel& d,
                             const InputPreparation& prep, const MeasSetting& setting,
                             std::uint64_t shots, std::uint64_t seed) {
  CountsRecord rec{prep, setting, shots, 0};
  const double q = setting_probability(device, d, prep, setting);
  if (shots == 0 || q <= 0.0) return rec;
  std::mt19937_64 rng(seed);
  std::binomial_distribution<std::uint64_t> draw(shots, q);
  rec.successes = draw(rng);
  return rec;
}

std::uint64_t cell_seed(std::uint64_t run_seed, int prep_index, int setting_index) {
  return splitmix64(splitmix64(run_seed) ^ (static_cast<std::uint64_t>(prep_index) << 32 |
                                            static_cast<std::uint64_t>(setting_index)));
}

std::vector<SettingFrequency> frequencies(std::span<const CountsRecord> records) {
  std::vector<SettingFrequency> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (r.shots == 0) throw DataError("setting " + r.setting.label() + " has zero shots");
    if (r.successes > r.shots) {
      throw DataError("setting " + r.setting.label() + " has more successes than shots");
    }
    out.push_back({r.setting, static_cast<double>(r.successes) / static_cast<double>(r.shots)});
  }
  return out;
}

std::vector<SettingFrequency> exact_frequencies(const TransferMatrix& device,
                                                const DistinguishabilityModel& d,
                                                const InputPreparation& prep) {
  const Matrix4c out = logical_output(device, prep.ket(), d);
  const double success = out.trace().real();
  if (!(success > 0.0)) throw DataError("preparation " + prep.label() + " never produces a coincidence");
  std::vector<SettingFrequency> f;
  f.reserve(36);
  for (const auto& s : all_settings()) {
    const Vector4c k = s.ket();
    f.push_back({s, (k.adjoint() * out * k)(0, 0).real() / success});
  }
  return f;
}

StateEstimate linear_inversion(std::span<const SettingFrequency> data) {
  Eigen::Matrix<double, 36, 1> f = Eigen::Matrix<double, 36, 1>::Zero();
  std::array<bool, 36> seen{};
  for (const auto& d : data) {
    const int i = setting_index(d.setting);
    if (seen[i]) throw DataError("duplicate setting " + d.setting.label());
    seen[i] = true;
    f[i] = d.frequency;
  }
  std::string missing;
  for (int i = 0; i < 36; ++i) {
    if (!seen[i]) missing += (missing.empty() ? "" : ", ") + all_settings()[i].label();
  }
  if (!missing.empty()) throw DataError("missing settings: " + missing);

  static const Eigen::ColPivHouseholderQR<Eigen::Matrix<double, 36, 16>> qr(design_matrix());
  const Eigen::Matrix<double, 16, 1> r = qr.solve(f);
  if (!(r[0] > 0.0)) throw DataError("linear inversion: no coincidences recorded");

  const auto& basis = pauli_basis();
  Matrix4c rho = Matrix4c::Zero();
  for (int m = 0; m < 16; ++m) rho += r[m] / 4.0 * basis[m];
  rho = 0.5 * (rho + rho.adjoint());
  return {rho / r[0], r[0]};
}

ComplexMatrix linear_inversion_state(std::span<const SettingFrequency> data) {
  return linear_inversion(data).rho;
}

ComplexMatrix linear_inversion_state(std::span<const CountsRecord> records) {
  for (const auto& r : records) {
    if (!(r.preparation == records.front().preparation)) {
      throw DataError("state tomography records mix preparations " +
                      records.front().preparation.label() + " and " + r.preparation.label());
    }
  }
  const auto f = frequencies(records);
  return linear_inversion_state(std::span<const SettingFrequency>(f));
}

DensityMatrix project_to_physical(const ComplexMatrix& h) {
  if (h.rows() != 4 || h.cols() != 4) throw DataError("project_to_physical: expected a 4x4 matrix");
  const ComplexMatrix clipped = clip_to_psd(h);
  const double tr = clipped.trace().real();
  if (!(tr > 1e-15)) throw DataError("project_to_physical: no positive spectrum to normalize");
  return DensityMatrix(Matrix4c(clipped / tr));
}

ChiMatrix::ChiMatrix(const Matrix16c& chi) {
  if (!chi.allFinite()) throw DataError("ChiMatrix: non-finite entries");
  if (!is_hermitian(chi, 1e-9 * std::max(1.0, chi.cwiseAbs().maxCoeff()))) {
    throw DataError("ChiMatrix: matrix is not Hermitian");
  }
  chi_ = 0.5 * (chi + chi.adjoint());
}

Matrix4c ChiMatrix::apply(const Matrix4c& rho) const {
  const auto& g = pauli_basis();
  Matrix4c out = Matrix4c::Zero();
  for (int m = 0; m < 16; ++m) {
    const Matrix4c left = g[m] * rho;
    for (int n = 0; n < 16; ++n) {
      if (chi_(m, n) != Complex(0.0)) out += chi_(m, n) * left * g[n].adjoint();
    }
  }
  return out;
}

ChiMatrix chi_of_unitary(const Matrix4c& u) {
  const Vector16c c = pauli_expansion(u);
  return ChiMatrix(c * c.adjoint());
}

ChiMatrix chi_from_outputs(const std::array<Matrix4c, 16>& outputs) {
  const auto& preps = process_preparations();
  Matrix16c x;
  for (int j = 0; j < 16; ++j) {
    const Matrix4c rho = preps[j].projector();
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) x(4 * a + b, j) = rho(a, b);
  }
  const Eigen::FullPivLU<Matrix16c> lu(x);
  if (lu.rank() < 16) {
    throw DataError("process tomography: input preparations are not informationally complete");
  }
  const Matrix16c xinv = lu.inverse();

  // Choi matrix J = sum_ab |a><b| (x) E(|a><b|).
  Matrix16c choi = Matrix16c::Zero();
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      Matrix4c image = Matrix4c::Zero();
      for (int j = 0; j < 16; ++j) image += xinv(j, 4 * a + b) * outputs[j];
      choi.block<4, 4>(4 * a, 4 * b) = image;
    }
  }

  // chi_mn = v_m^dagger J v_n / 16 with v_m = (I (x) Gamma_m) sum_a |a>|a>.
  const auto& g = pauli_basis();
  Matrix16c v;
  for (int m = 0; m < 16; ++m)
    for (int a = 0; a < 4; ++a)
      for (int k = 0; k < 4; ++k) v(4 * a + k, m) = g[m](k, a);
  Matrix16c chi = v.adjoint() * choi * v / 16.0;
  chi = 0.5 * (chi + chi.adjoint());
  chi = clip_to_psd(chi);
  const double tr = chi.trace().real();
  if (!(tr > 0.0)) throw DataError("process tomography: reconstructed process is empty");
  return ChiMatrix(chi / tr);
}

ChiMatrix reconstruct_process(std::span<const CountsRecord> records) {
  const auto& preps = process_preparations();
  std::map<int, std::vector<CountsRecord>> by_prep;
  for (const auto& r : records) {
    const auto it = std::find(preps.begin(), preps.end(), r.preparation);
    if (it == preps.end()) {
      throw DataError("preparation " + r.preparation.label() + " is not a process-tomography input");
    }
    by_prep[static_cast<int>(it - preps.begin())].push_back(r);
  }
  std::array<Matrix4c, 16> outputs;
  for (int j = 0; j < 16; ++j) {
    const auto it = by_prep.find(j);
    if (it == by_prep.end()) throw DataError("missing preparation " + preps[j].label());
    const auto f = frequencies(it->second);
    try {
      outputs[j] = linear_inversion(f).rho;
    } catch (const DataError& e) {
      throw DataError("preparation " + preps[j].label() + ": " + e.what());
    }
  }
  return chi_from_outputs(outputs);
}

std::vector<CountsRecord> process_counts(const TransferMatrix& device, const DistinguishabilityModel& d,
                                         std::uint64_t shots, std::uint64_t seed) {
  std::vector<CountsRecord> out;
  out.reserve(16 * 36);
  const auto& preps = process_preparations();
  const auto& settings = all_settings();
  for (int j = 0; j < 16; ++j)
    for (int s = 0; s < 36; ++s)
      out.push_back(simulate_counts(device, d, preps[j], settings[s], shots, cell_seed(seed, j, s)));
  return out;
}

ChiMatrix process_tomography(const TransferMatrix& device, const DistinguishabilityModel& d,
                             std::uint64_t shots, std::uint64_t seed) {
  if (shots > 0) {
    const auto records = process_counts(device, d, shots, seed);
    return reconstruct_process(records);
  }
  std::array<Matrix4c, 16> outputs;
  const auto& preps = process_preparations();
  for (int j = 0; j < 16; ++j) {
    // Exact mode knows each preparation's success probability, so the
    // outputs carry it and the reconstructed map stays completely positive.
    const double success = logical_output(device, preps[j].ket(), d).trace().real();
    outputs[j] = success * linear_inversion(exact_frequencies(device, d, preps[j])).rho;
  }
  return chi_from_outputs(outputs);
}

namespace {

const std::array<MeasSetting, 4>& computational_settings() {
  static const std::array<MeasSetting, 4> s = {MeasSetting{PolState::H, PolState::H},
                                               MeasSetting{PolState::H, PolState::V},
                                               MeasSetting{PolState::V, PolState::H},
                                               MeasSetting{PolState::V, PolState::V}};
  return s;
}

int computational_index(const MeasSetting& s) {
  const auto& c = computational_settings();
  const auto it = std::find(c.begin(), c.end(), s);
  return it == c.end() ? -1 : static_cast<int>(it - c.begin());
}

}  // namespace

std::vector<CountsRecord> truth_table_counts(const TransferMatrix& device, const DistinguishabilityModel& d,
                                             std::uint64_t shots, std::uint64_t seed) {
  const auto& c = computational_settings();
  std::vector<CountsRecord> out;
  out.reserve(16);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.push_back(simulate_counts(device, d, c[i], c[j], shots, cell_seed(seed, i, j)));
  return out;
}

TruthTable truth_table_from_counts(std::span<const CountsRecord> records) {
  Eigen::Matrix4d counts = Eigen::Matrix4d::Constant(-1.0);
  for (const auto& r : records) {
    const int i = computational_index(r.preparation);
    const int j = computational_index(r.setting);
    if (i < 0 || j < 0) {
      throw DataError("truth table counts: " + r.preparation.label() + "/" + r.setting.label() +
                      " is not a computational-basis record");
    }
    if (counts(i, j) >= 0.0) {
      throw DataError("truth table counts: duplicate record " + r.preparation.label() + "/" + r.setting.label());
    }
    counts(i, j) = static_cast<double>(r.successes);
  }
  for (int i = 0; i < 4; ++i) {
    const auto& c = computational_settings();
    for (int j = 0; j < 4; ++j)
      if (counts(i, j) < 0.0) {
        throw DataError("truth table counts: missing record " + c[i].label() + "/" + c[j].label());
      }
    const double total = counts.row(i).sum();
    if (!(total > 0.0)) throw DataError("truth table counts: no coincidences for input " + c[i].label());
    counts.row(i) /= total;
  }
  return TruthTable(counts);
}

double process_fidelity(const ChiMatrix& a, const ChiMatrix& b) {
  const double ta = a.trace();
  const double tb = b.trace();
  if (!(ta > 0.0) || !(tb > 0.0)) throw DataError("process_fidelity: zero-trace process matrix");
  return std::clamp(uhlmann_overlap(a.matrix(), b.matrix()) / (ta * tb), 0.0, 1.0);
}

}  // namespace ppgate
