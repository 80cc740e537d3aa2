#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "oracles.hpp"
#include "ppgate/errors.hpp"
#include "ppgate/gate_analysis.hpp"

using namespace ppgate;

namespace {

constexpr double kPi = std::numbers::pi;

// Encoding written out by hand: control 0 = V, 1 = H; target 0 = (H+V)/sqrt2,
// 1 = (H-V)/sqrt2.
Vector2c ctl(int bit) { return bit == 0 ? Vector2c(0, 1) : Vector2c(1, 0); }
Vector2c tgt(int bit) {
  const double s = 1.0 / std::sqrt(2.0);
  return bit == 0 ? Vector2c(s, s) : Vector2c(s, -s);
}

// Truth-table row from the permanent oracle: coincidence amplitudes on
// (control-rail pol, target-rail pol), projected on the logical outcomes.
std::array<double, 4> oracle_row(const TransferMatrix& m, int c, int t) {
  const Matrix2c psi = ctl(c) * tgt(t).transpose();
  Vector4c out;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) out[2 * k + l] = oracle::fock_amplitude(m.matrix(), psi, k, 2 + l);
  std::array<double, 4> row{};
  double total = 0.0;
  for (int oc = 0; oc < 2; ++oc)
    for (int ot = 0; ot < 2; ++ot) {
      Vector4c basis;
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) basis[2 * k + l] = ctl(oc)[k] * tgt(ot)[l];
      row[2 * oc + ot] = std::norm(basis.dot(out));
      total += row[2 * oc + ot];
    }
  for (double& x : row) x /= total;
  return row;
}

const int kCnotOutcome[4] = {0, 1, 3, 2};

}  // namespace

TEST_CASE("encoding") {
  const Matrix4c e = encoding::logical_to_physical();
  CHECK((e.adjoint() * e - Matrix4c::Identity()).cwiseAbs().maxCoeff() < 1e-15);
  for (int c = 0; c < 2; ++c)
    for (int t = 0; t < 2; ++t) {
      CHECK((encoding::control_state(c) - ctl(c)).norm() < 1e-15);
      CHECK((encoding::target_state(t) - tgt(t)).norm() < 1e-15);
      Vector4c phys;
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) phys[2 * k + l] = ctl(c)[k] * tgt(t)[l];
      CHECK((e.col(2 * c + t) - phys).norm() < 1e-15);
    }
  CHECK_THROWS_AS(encoding::control_state(2), DataError);
}

TEST_CASE("ideal chip truth table") {
  for (auto conv : {Convention::ImagCross, Convention::RealAsym}) {
    const auto dev = calibrated_device(ideal_device_description(conv));
    const auto tt = truth_table(dev, {});
    for (int in = 0; in < 4; ++in) {
      CHECK(tt(in, kCnotOutcome[in]) == doctest::Approx(1.0).epsilon(1e-9));
      const auto ref = oracle_row(dev, in / 2, in % 2);
      for (int out = 0; out < 4; ++out) CHECK(std::abs(tt(in, out) - ref[out]) < 1e-12);
    }
    CHECK(truth_table_fidelity(tt) == doctest::Approx(1.0).epsilon(1e-9));
    for (double s : success_probabilities(dev, {})) CHECK(s == doctest::Approx(1.0 / 9.0).epsilon(1e-9));
  }
}

TEST_CASE("truth table matches the permanent oracle on random chips") {
  gen::Rng rng(31);
  int checked = 0;
  for (int k = 0; k < 60; ++k) {
    const auto chip = gen::chip(rng);
    const auto probs = success_probabilities(chip, {});
    if (*std::min_element(probs.begin(), probs.end()) < 1e-6) continue;
    const auto tt = truth_table(chip, {});
    for (int in = 0; in < 4; ++in) {
      const auto ref = oracle_row(chip, in / 2, in % 2);
      for (int out = 0; out < 4; ++out) CHECK(std::abs(tt(in, out) - ref[out]) < 1e-9);
    }
    ++checked;
  }
  CHECK(checked > 40);
}

TEST_CASE("truth table of a transparent device is the identity") {
  const auto tt = truth_table(TransferMatrix::identity(), {});
  CHECK((tt.rows() - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(truth_table_fidelity(tt) == doctest::Approx(0.5));
}

TEST_CASE("truth table rejects blocked inputs") {
  const PpdcElement blocked{0.0, 0.0};
  const auto chip = build_cnot_chip(ideal_interfering_coupler(), blocked, blocked, Convention::ImagCross);
  CHECK_THROWS_AS(truth_table(chip, {}), DataError);
}

TEST_CASE("TruthTable validation") {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  CHECK_NOTHROW(TruthTable{m});
  m(0, 1) = 0.1;
  CHECK_THROWS_AS(TruthTable{m}, DataError);
  m(0, 0) = 1.1;
  m(0, 1) = -0.1;
  CHECK_THROWS_AS(TruthTable{m}, DataError);
}

TEST_CASE("measured device truth table lands in the reported band") {
  const auto dev = calibrated_device(measured_device_description());
  const double f = truth_table_fidelity(truth_table(dev, {}));
  CHECK(f >= 0.965);
  CHECK(f <= 0.985);
}

TEST_CASE("distinguishability correction") {
  const auto dev = calibrated_device(measured_device_description());
  const auto tt_ind = truth_table(dev, DistinguishabilityModel(0.0));
  const auto tt_dist = truth_table(dev, DistinguishabilityModel(1.0));
  SUBCASE("p = 0 is a no-op") {
    const auto c = correct_distinguishability(tt_ind, tt_dist, 0.0);
    CHECK((c.rows() - tt_ind.rows()).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("row-wise mixing is undone exactly") {
    // Row-wise mixture weighted by coincidence probabilities, not a plain
    // convex combination, so build the measured table from the states.
    const double p = 0.03;
    const auto tt_mix = truth_table(dev, DistinguishabilityModel(p));
    const auto ps_ind = success_probabilities(dev, DistinguishabilityModel(0.0));
    const auto ps_dist = success_probabilities(dev, DistinguishabilityModel(1.0));
    Eigen::Matrix4d manual;
    for (int r = 0; r < 4; ++r) {
      const double wi = (1 - p) * ps_ind[r];
      const double wd = p * ps_dist[r];
      manual.row(r) = (wi * tt_ind.rows().row(r) + wd * tt_dist.rows().row(r)) / (wi + wd);
    }
    CHECK((manual - tt_mix.rows()).cwiseAbs().maxCoeff() < 1e-12);
    const auto w = effective_distinguishable_weights(dev, p);
    for (int r = 0; r < 4; ++r)
      CHECK(w[r] == doctest::Approx(p * ps_dist[r] / ((1 - p) * ps_ind[r] + p * ps_dist[r])));
    const auto back = correct_distinguishability(tt_mix, dev, p);
    CHECK((back.rows() - tt_ind.rows()).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("raw subtraction") {
    const Eigen::Matrix4d a = Eigen::Matrix4d::Constant(0.25);
    const auto r = subtract_distinguishable(0.5 * a + 0.5 * Eigen::Matrix4d::Identity(), a, 0.5);
    CHECK((r - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-15);
  }
  CHECK_THROWS_AS(correct_distinguishability(tt_ind, tt_dist, 1.0), DataError);
  CHECK_THROWS_AS(correct_distinguishability(tt_ind, tt_dist, -0.1), DataError);
}

TEST_CASE("phase compensation") {
  SUBCASE("zero phases change nothing") {
    gen::Rng rng(2);
    const auto chip = gen::chip(rng);
    CHECK((compensate(chip, {}).matrix() - chip.matrix()).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("frozen calibration of the ideal chip") {
    for (auto conv : {Convention::ImagCross, Convention::RealAsym}) {
      const auto& cal = frozen_calibration(conv);
      CHECK(cal.mean_bell_fidelity > 0.999999);
      CHECK(&cal == &frozen_calibration(conv));
    }
  }
  SUBCASE("a transparent device cannot be calibrated into a CNOT") {
    const auto fit = optimize_compensation(TransferMatrix::identity());
    CHECK(fit.mean_bell_fidelity <= 0.5 + 1e-9);
  }
  SUBCASE("re-optimizing a calibrated device keeps its fidelity") {
    const auto dev = calibrated_device(ideal_device_description());
    const auto fit = optimize_compensation(dev);
    CHECK(fit.mean_bell_fidelity == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("the uncompensated ideal chip is not yet a CNOT") {
    const auto raw = ideal_device_description().build();
    CHECK(truth_table_fidelity(truth_table(raw, {})) < 0.9);
  }
}

TEST_CASE("Bell generation and discrimination on the ideal chip") {
  const auto dev = calibrated_device(ideal_device_description());
  const auto gen_ = bell_generation(dev, {});
  CHECK(gen_.mean_fidelity == doctest::Approx(1.0).epsilon(1e-9));
  for (int k = 0; k < 4; ++k) {
    CHECK(gen_.success_probs[k] == doctest::Approx(1.0 / 9.0).epsilon(1e-9));
    CHECK(gen_.outputs[k].trace().real() == doctest::Approx(1.0));
  }
  const auto disc = bell_discrimination(dev, {});
  CHECK((disc.confusion - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(disc.probability == doctest::Approx(1.0));
}

TEST_CASE("Bell generation inputs map to the Bell basis under an ideal CNOT") {
  const auto in = entangling_inputs();
  const auto bells = bell_states();
  const auto out = discrimination_outcomes();
  for (int k = 0; k < 4; ++k) {
    CHECK((cnot_unitary() * in[k] - bells[k].amplitudes()).norm() < 1e-15);
    CHECK((cnot_unitary() * bells[k].amplitudes() - out[k]).norm() < 1e-15);
  }
}

TEST_CASE("confusion_from_outputs") {
  std::array<Matrix4c, 4> mixed;
  mixed.fill(Matrix4c::Identity() / 4.0);
  const auto c = confusion_from_outputs(mixed);
  CHECK((c.confusion - Eigen::Matrix4d::Constant(0.25)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(c.probability == doctest::Approx(0.25));
  // Scale does not matter; outputs are normalized per row.
  std::array<Matrix4c, 4> scaled;
  const auto o = discrimination_outcomes();
  for (int k = 0; k < 4; ++k) scaled[k] = 0.1 * (k + 1) * o[k] * o[k].adjoint();
  CHECK(confusion_from_outputs(scaled).probability == doctest::Approx(1.0));
}

TEST_CASE("global phase of the device is irrelevant") {
  gen::Rng rng(17);
  const auto dev = calibrated_device(measured_device_description());
  for (int k = 0; k < 5; ++k) {
    const Complex ph = std::polar(1.0, rng.uniform(-kPi, kPi));
    const auto rotated = TransferMatrix::subunitary(ph * dev.matrix());
    CHECK(bell_generation(rotated, {}).mean_fidelity ==
          doctest::Approx(bell_generation(dev, {}).mean_fidelity).epsilon(1e-12));
    CHECK((truth_table(rotated, {}).rows() - truth_table(dev, {}).rows()).cwiseAbs().maxCoeff() < 1e-12);
  }
}
