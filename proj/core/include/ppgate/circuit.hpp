#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ppgate/quantum.hpp"

namespace ppgate {

enum class Rail { Control, Target };
enum class Polarization { H, V };

/// Optical mode on the 4-mode chip. Canonical order (C,H),(C,V),(T,H),(T,V).
struct Mode {
  Rail rail;
  Polarization pol;

  constexpr int index() const noexcept {
    return (rail == Rail::Control ? 0 : 2) + (pol == Polarization::H ? 0 : 1);
  }
  static constexpr Mode from_index(int i) noexcept {
    return {i < 2 ? Rail::Control : Rail::Target, i % 2 == 0 ? Polarization::H : Polarization::V};
  }
  friend constexpr bool operator==(const Mode&, const Mode&) = default;
};

/// Beam-splitter amplitude convention for a coupler block with cross
/// probability T:
///   ImagCross: [[sqrt(1-T), i sqrt(T)], [i sqrt(T), sqrt(1-T)]]
///   RealAsym:  [[sqrt(1-T), sqrt(T)], [sqrt(T), -sqrt(1-T)]]
enum class Convention { ImagCross, RealAsym };

enum class Port { Bar, Cross };

/// Partially polarizing directional coupler. t_h and t_v are CROSS-coupling
/// power fractions, i.e. P_out2 / (P_out1 + P_out2) when launching into in1.
struct PpdcElement {
  double t_h = 0.0;
  double t_v = 0.0;
  std::string label;

  PpdcElement() = default;
  /// Throws DataError unless both fractions lie in [0, 1].
  PpdcElement(double t_h, double t_v, std::string label = {});
};

/// Diagonal per-rail polarization action, |amp| <= 1.
struct PolarizationAttenuator {
  Complex amp_h{1.0, 0.0};
  Complex amp_v{1.0, 0.0};
};

enum class WaveplateKind { Half, Quarter };

struct WaveplateElement {
  WaveplateKind kind = WaveplateKind::Half;
  double angle = 0.0;  // fast-axis angle from H, radians
  Rail rail = Rail::Control;
};

/// Single-photon transfer matrix over the four chip modes. Unitary unless it
/// was built with subunitary(); singular values never exceed 1 + 1e-9.
class TransferMatrix {
 public:
  static TransferMatrix identity();
  /// Throws DataError if ||U^dagger U - I|| >= 1e-9.
  static TransferMatrix unitary(const Matrix4c& u);
  /// Throws DataError if any singular value exceeds 1 + 1e-9.
  static TransferMatrix subunitary(const Matrix4c& m);

  const Matrix4c& matrix() const noexcept { return m_; }
  bool is_unitary() const noexcept { return unitary_; }
  Complex operator()(int out, int in) const { return m_(out, in); }

  /// Composition: (a * b) applies b first, then a.
  friend TransferMatrix operator*(const TransferMatrix& a, const TransferMatrix& b);

 private:
  TransferMatrix(const Matrix4c& m, bool unitary) : m_(m), unitary_(unitary) {}
  Matrix4c m_;
  bool unitary_;
};

Matrix2c coupler_block(double cross_fraction, Convention convention);

TransferMatrix ppdc_transfer(const PpdcElement& e, Convention convention);

PolarizationAttenuator attenuator_from_ppdc(const PpdcElement& e, Port used_port,
                                            Convention convention = Convention::ImagCross);

/// Block-diagonal action of one attenuator per rail.
TransferMatrix attenuator_transfer(const PolarizationAttenuator& control,
                                   const PolarizationAttenuator& target);

/// Jones matrix in the (H, V) basis. HWP: [[c2, s2], [s2, -c2]];
/// QWP: R(-theta) diag(1, i) R(theta).
Matrix2c waveplate_jones(const WaveplateElement& w);

/// Waveplate acting on one rail, identity on the other.
TransferMatrix waveplate_transfer(const WaveplateElement& w);

/// The three-coupler CNOT: interfering coupler U1 on both rails followed by one
/// compensating coupler per rail, each read out at `port`. Returns
/// (A_control (+) A_target) * U1, flagged subunitary.
TransferMatrix build_cnot_chip(const PpdcElement& interfering, const PpdcElement& control_compensator,
                               const PpdcElement& target_compensator, Convention convention,
                               Port port = Port::Cross);

/// Transmissivities that realize the ideal post-selected CNOT:
/// (T_H, T_V) = (0, 2/3) for the interfering coupler, (1/3, 1) for both
/// compensators.
PpdcElement ideal_interfering_coupler();
PpdcElement ideal_compensator(std::string label = "PPDC2");

// -- device description ------------------------------------------------------

enum class ElementRole { Coupler, Compensator };

struct DeviceElement {
  std::string label;
  ElementRole role = ElementRole::Coupler;
  double t_h = 0.0;
  double t_v = 0.0;
  std::optional<double> sigma_t_h;
  std::optional<double> sigma_t_v;
  std::optional<Rail> rail;  // compensators only
  Port port = Port::Cross;   // compensators only

  friend bool operator==(const DeviceElement&, const DeviceElement&) = default;
};

/// Structured description of a chip: one coupler plus one compensator per rail.
struct DeviceDescription {
  Convention convention = Convention::ImagCross;
  std::vector<DeviceElement> elements;

  /// Validates the element set and builds the chip transfer matrix.
  TransferMatrix build() const;
  TransferMatrix build(Convention override_convention) const;

  friend bool operator==(const DeviceDescription&, const DeviceDescription&) = default;
};

DeviceDescription ideal_device_description(Convention convention = Convention::ImagCross);

/// The characterized chip: T_H1 < 1% (taken as 0), T_V1 = 64%, T_H2 = 43%,
/// T_V2 = 98%, T_H3 = 27%, T_V3 = 93%, all +-1%. PPDC2 sits on the target rail.
DeviceDescription measured_device_description(Convention convention = Convention::ImagCross);

}  // namespace ppgate
