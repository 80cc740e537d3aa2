#include "ppgate/circuit.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "ppgate/errors.hpp"

namespace ppgate {

namespace {

constexpr double kUnitarityTol = 1e-9;

void check_fraction(double t, const char* name) {
  if (!std::isfinite(t) || t < 0.0 || t > 1.0) {
    throw DataError(std::string("PpdcElement: ") + name + " = " + std::to_string(t) +
                    " is outside [0, 1]");
  }
}

Complex port_amplitude(double cross_fraction, Port port, Convention convention) {
  if (port == Port::Bar) return {std::sqrt(1.0 - cross_fraction), 0.0};
  const double a = std::sqrt(cross_fraction);
  return convention == Convention::ImagCross ? Complex(0.0, a) : Complex(a, 0.0);
}

TransferMatrix chip(const PpdcElement& interfering, const PpdcElement& control, Port control_port,
                    const PpdcElement& target, Port target_port, Convention convention) {
  const auto u1 = ppdc_transfer(interfering, convention);
  const auto a = attenuator_transfer(attenuator_from_ppdc(control, control_port, convention),
                                     attenuator_from_ppdc(target, target_port, convention));
  return TransferMatrix::subunitary((a * u1).matrix());
}

}  // namespace

PpdcElement::PpdcElement(double t_h_, double t_v_, std::string label_)
    : t_h(t_h_), t_v(t_v_), label(std::move(label_)) {
  check_fraction(t_h, "t_h");
  check_fraction(t_v, "t_v");
}

TransferMatrix TransferMatrix::identity() { return {Matrix4c::Identity(), true}; }

TransferMatrix TransferMatrix::unitary(const Matrix4c& u) {
  const double dev = (u.adjoint() * u - Matrix4c::Identity()).cwiseAbs().maxCoeff();
  if (!(dev < kUnitarityTol)) {
    throw DataError("TransferMatrix: matrix is not unitary (deviation " + std::to_string(dev) + ")");
  }
  return {u, true};
}

TransferMatrix TransferMatrix::subunitary(const Matrix4c& m) {
  if (!m.allFinite()) throw DataError("TransferMatrix: non-finite entries");
  Eigen::JacobiSVD<Matrix4c> svd(m);
  const double smax = svd.singularValues().maxCoeff();
  if (smax > 1.0 + kUnitarityTol) {
    throw DataError("TransferMatrix: singular value " + std::to_string(smax) + " exceeds 1");
  }
  return {m, false};
}

TransferMatrix operator*(const TransferMatrix& a, const TransferMatrix& b) {
  return {a.m_ * b.m_, a.unitary_ && b.unitary_};
}

Matrix2c coupler_block(double t, Convention convention) {
  const double bar = std::sqrt(1.0 - t);
  const double cross = std::sqrt(t);
  Matrix2c b;
  if (convention == Convention::ImagCross) {
    b << bar, Complex(0.0, cross), Complex(0.0, cross), bar;
  } else {
    b << bar, cross, cross, -bar;
  }
  return b;
}

TransferMatrix ppdc_transfer(const PpdcElement& e, Convention convention) {
  Matrix4c u = Matrix4c::Zero();
  for (const auto pol : {Polarization::H, Polarization::V}) {
    const Matrix2c block = coupler_block(pol == Polarization::H ? e.t_h : e.t_v, convention);
    const int idx[2] = {Mode{Rail::Control, pol}.index(), Mode{Rail::Target, pol}.index()};
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) u(idx[r], idx[c]) = block(r, c);
  }
  return TransferMatrix::unitary(u);
}

PolarizationAttenuator attenuator_from_ppdc(const PpdcElement& e, Port used_port,
                                            Convention convention) {
  return {port_amplitude(e.t_h, used_port, convention), port_amplitude(e.t_v, used_port, convention)};
}

TransferMatrix attenuator_transfer(const PolarizationAttenuator& control,
                                   const PolarizationAttenuator& target) {
  Matrix4c d = Matrix4c::Zero();
  d(0, 0) = control.amp_h;
  d(1, 1) = control.amp_v;
  d(2, 2) = target.amp_h;
  d(3, 3) = target.amp_v;
  return TransferMatrix::subunitary(d);
}

Matrix2c waveplate_jones(const WaveplateElement& w) {
  const double c = std::cos(w.angle);
  const double s = std::sin(w.angle);
  Matrix2c j;
  if (w.kind == WaveplateKind::Half) {
    const double c2 = std::cos(2.0 * w.angle);
    const double s2 = std::sin(2.0 * w.angle);
    j << c2, s2, s2, -c2;
  } else {
    const Complex I(0.0, 1.0);
    j << c * c + I * s * s, (1.0 - I) * s * c, (1.0 - I) * s * c, s * s + I * c * c;
  }
  return j;
}

TransferMatrix waveplate_transfer(const WaveplateElement& w) {
  Matrix4c u = Matrix4c::Identity();
  const int off = w.rail == Rail::Control ? 0 : 2;
  u.block<2, 2>(off, off) = waveplate_jones(w);
  return TransferMatrix::unitary(u);
}

TransferMatrix build_cnot_chip(const PpdcElement& interfering, const PpdcElement& control_compensator,
                               const PpdcElement& target_compensator, Convention convention,
                               Port port) {
  return chip(interfering, control_compensator, port, target_compensator, port, convention);
}

PpdcElement ideal_interfering_coupler() { return {0.0, 2.0 / 3.0, "PPDC1"}; }

PpdcElement ideal_compensator(std::string label) { return {1.0 / 3.0, 1.0, std::move(label)}; }

TransferMatrix DeviceDescription::build() const { return build(convention); }

TransferMatrix DeviceDescription::build(Convention conv) const {
  const DeviceElement* coupler = nullptr;
  const DeviceElement* comp[2] = {nullptr, nullptr};
  for (const auto& e : elements) {
    if (e.role == ElementRole::Coupler) {
      if (coupler) throw DataError("device: more than one interfering coupler ('" + e.label + "')");
      coupler = &e;
      continue;
    }
    if (!e.rail) throw DataError("device: compensator '" + e.label + "' has no rail");
    auto& slot = comp[*e.rail == Rail::Control ? 0 : 1];
    if (slot) throw DataError("device: two compensators on the same rail ('" + e.label + "')");
    slot = &e;
  }
  if (!coupler) throw DataError("device: no interfering coupler");
  if (!comp[0] || !comp[1]) throw DataError("device: each rail needs one compensator");

  const auto as_ppdc = [](const DeviceElement& e) { return PpdcElement(e.t_h, e.t_v, e.label); };
  return chip(as_ppdc(*coupler), as_ppdc(*comp[0]), comp[0]->port, as_ppdc(*comp[1]), comp[1]->port,
              conv);
}

DeviceDescription ideal_device_description(Convention convention) {
  DeviceDescription d;
  d.convention = convention;
  d.elements = {
      {"PPDC1", ElementRole::Coupler, 0.0, 2.0 / 3.0, {}, {}, {}, Port::Cross},
      {"PPDC2", ElementRole::Compensator, 1.0 / 3.0, 1.0, {}, {}, Rail::Target, Port::Cross},
      {"PPDC3", ElementRole::Compensator, 1.0 / 3.0, 1.0, {}, {}, Rail::Control, Port::Cross},
  };
  return d;
}

DeviceDescription measured_device_description(Convention convention) {
  DeviceDescription d;
  d.convention = convention;
  d.elements = {
      {"PPDC1", ElementRole::Coupler, 0.0, 0.64, 0.01, 0.01, {}, Port::Cross},
      {"PPDC2", ElementRole::Compensator, 0.43, 0.98, 0.01, 0.01, Rail::Target, Port::Cross},
      {"PPDC3", ElementRole::Compensator, 0.27, 0.93, 0.01, 0.01, Rail::Control, Port::Cross},
  };
  return d;
}

}  // namespace ppgate
