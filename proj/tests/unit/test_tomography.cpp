#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "ppgate/errors.hpp"
#include "ppgate/gate_analysis.hpp"
#include "ppgate/tomography.hpp"

using namespace ppgate;

namespace {

std::vector<SettingFrequency> freqs_of(const Matrix4c& rho) {
  std::vector<SettingFrequency> out;
  for (const auto& s : all_settings()) out.push_back({s, (s.projector() * rho).trace().real()});
  return out;
}

std::array<Matrix4c, 16> prep_states() {
  std::array<Matrix4c, 16> r;
  for (int j = 0; j < 16; ++j) r[j] = process_preparations()[j].projector();
  return r;
}

}  // namespace

TEST_CASE("polarization labels") {
  for (char c : std::string("HVDARL")) CHECK(pol_state_char(pol_state_from_char(c)) == c);
  CHECK_THROWS_AS(pol_state_from_char('X'), DataError);
  CHECK(MeasSetting::parse("DR").label() == "DR");
  CHECK_THROWS_AS(MeasSetting::parse("D"), DataError);
  CHECK_THROWS_AS(MeasSetting::parse("DRH"), DataError);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK((pol_state_vector(PolState::R) - Vector2c(s, Complex(0, s))).norm() < 1e-15);
  CHECK((pol_state_vector(PolState::A) - Vector2c(s, -s)).norm() < 1e-15);
  CHECK(all_settings().size() == 36);
  CHECK(all_settings()[1].label() == "HV");
  CHECK(process_preparations()[15].label() == "RR");
}

TEST_CASE("linear inversion of exact data") {
  SUBCASE("Phi+") {
    const Matrix4c rho = bell_states()[0].projector();
    const auto f = freqs_of(rho);
    const auto est = linear_inversion(f);
    CHECK((est.rho - rho).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(est.yield == doctest::Approx(1.0));
  }
  SUBCASE("maximally mixed") {
    const Matrix4c rho = Matrix4c::Identity() / 4.0;
    CHECK((linear_inversion_state(freqs_of(rho)) - rho).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("random states, scaled by a yield") {
    gen::Rng rng(7);
    for (int k = 0; k < 30; ++k) {
      const Matrix4c rho = gen::density(rng);
      const double y = rng.uniform(0.01, 1.0);
      const auto est = linear_inversion(freqs_of(y * rho));
      CHECK((est.rho - rho).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(est.yield == doctest::Approx(y).epsilon(1e-10));
    }
  }
}

TEST_CASE("linear inversion error reporting") {
  auto f = freqs_of(Matrix4c::Identity() / 4.0);
  f.erase(f.begin() + 5);
  try {
    linear_inversion(f);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("HL") != std::string::npos);
  }
  auto dup = freqs_of(Matrix4c::Identity() / 4.0);
  dup.push_back(dup.front());
  CHECK_THROWS_AS(linear_inversion(dup), DataError);
  std::vector<SettingFrequency> zeros;
  for (const auto& s : all_settings()) zeros.push_back({s, 0.0});
  CHECK_THROWS_AS(linear_inversion(zeros), DataError);
}

TEST_CASE("project_to_physical") {
  ComplexMatrix h = ComplexMatrix::Zero(4, 4);
  h.diagonal() << 1.1, -0.1, 0, 0;
  const auto p = project_to_physical(h);
  Matrix4c expected = Matrix4c::Zero();
  expected(0, 0) = 1.0;
  CHECK((p.matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
  gen::Rng rng(3);
  const Matrix4c rho = gen::density(rng);
  CHECK((project_to_physical(rho).matrix() - rho).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(project_to_physical(ComplexMatrix(-Matrix4c::Identity())), DataError);
  CHECK_THROWS_AS(project_to_physical(ComplexMatrix::Identity(3, 3)), DataError);
}

TEST_CASE("chi of unitaries") {
  SUBCASE("CNOT support") {
    const auto chi = chi_of_unitary(cnot_unitary());
    const int support[4] = {0, 1, 12, 13};  // II, IX, ZI, ZX
    for (int m : support)
      for (int n : support) CHECK(std::abs(chi(m, n)) == doctest::Approx(0.25));
    CHECK(chi(13, 0).real() == doctest::Approx(-0.25));
    CHECK(chi.trace() == doctest::Approx(1.0));
    double off_support = 0.0;
    for (int m = 0; m < 16; ++m)
      for (int n = 0; n < 16; ++n)
        if (std::find(support, support + 4, m) == support + 4) off_support += std::abs(chi(m, n));
    CHECK(off_support == 0.0);
  }
  SUBCASE("identity") {
    const auto chi = chi_of_unitary(Matrix4c::Identity());
    CHECK(std::abs(chi(0, 0) - 1.0) < 1e-15);
    CHECK(chi.matrix().cwiseAbs().sum() == doctest::Approx(1.0));
  }
  SUBCASE("apply reproduces the channel") {
    gen::Rng rng(9);
    const Matrix4c u = gen::unitary4(rng);
    const Matrix4c rho = gen::density(rng);
    CHECK((chi_of_unitary(u).apply(rho) - u * rho * u.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(process_fidelity(chi_of_unitary(cnot_unitary()), chi_of_unitary(Matrix4c::Identity())) ==
        doctest::Approx(0.25));
}

TEST_CASE("chi_from_outputs agrees with the direct linear solve") {
  gen::Rng rng(13);
  const auto rho_in = prep_states();
  for (int k = 0; k < 5; ++k) {
    const Matrix4c u = gen::unitary4(rng);
    std::array<Matrix4c, 16> out;
    for (int j = 0; j < 16; ++j) out[j] = u * rho_in[j] * u.adjoint();
    const auto chi = chi_from_outputs(out);
    const auto ref = oracle::chi_direct_solve(rho_in, out);
    CHECK((chi.matrix() - ref).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((chi.matrix() - chi_of_unitary(u).matrix()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("chi reconstruction is invariant to output scale") {
  gen::Rng rng(14);
  const Matrix4c u = gen::unitary4(rng);
  const auto rho_in = prep_states();
  std::array<Matrix4c, 16> out;
  std::array<Matrix4c, 16> scaled;
  for (int j = 0; j < 16; ++j) {
    out[j] = u * rho_in[j] * u.adjoint();
    scaled[j] = out[j] / 9.0;
  }
  CHECK((chi_from_outputs(out).matrix() - chi_from_outputs(scaled).matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ChiMatrix validation") {
  Matrix16c m = Matrix16c::Identity() / 16.0;
  CHECK_NOTHROW(ChiMatrix{m});
  m(0, 1) = 0.1;
  CHECK_THROWS_AS(ChiMatrix{m}, DataError);
}

TEST_CASE("exact process tomography of the ideal chip") {
  const auto dev = calibrated_device(ideal_device_description());
  const auto chi = process_tomography(dev, {}, 0, 0);
  CHECK(process_fidelity(chi, chi_of_unitary(cnot_unitary())) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("setting probabilities partition unity per basis pair") {
  const auto dev = calibrated_device(measured_device_description());
  const DistinguishabilityModel d(0.05);
  const std::pair<PolState, PolState> pairs[3] = {
      {PolState::H, PolState::V}, {PolState::D, PolState::A}, {PolState::R, PolState::L}};
  for (const auto& prep : process_preparations()) {
    for (const auto& [a1, a2] : pairs)
      for (const auto& [b1, b2] : pairs) {
        double sum = 0.0;
        for (auto x : {a1, a2})
          for (auto y : {b1, b2}) sum += setting_probability(dev, d, prep, {x, y});
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      }
  }
}

TEST_CASE("simulated counts") {
  const auto dev = calibrated_device(ideal_device_description());
  const auto a = process_counts(dev, {}, 1000, 42);
  const auto b = process_counts(dev, {}, 1000, 42);
  const auto c = process_counts(dev, {}, 1000, 43);
  CHECK(a.size() == 576);
  CHECK(a == b);
  CHECK(a != c);
  for (const auto& r : a) CHECK(r.successes <= r.shots);
  // Per-cell seeding: a single cell reproduces its slot in the full run.
  const auto& prep = process_preparations()[3];
  const auto& set = all_settings()[7];
  const auto one = simulate_counts(dev, {}, prep, set, 1000, cell_seed(42, 3, 7));
  CHECK(one == a[3 * 36 + 7]);
  CHECK(cell_seed(42, 3, 7) != cell_seed(42, 7, 3));
}

TEST_CASE("frequencies") {
  std::vector<CountsRecord> recs{{MeasSetting{}, MeasSetting{}, 0, 0}};
  CHECK_THROWS_AS(frequencies(recs), DataError);
  recs[0].shots = 4;
  recs[0].successes = 1;
  CHECK(frequencies(recs)[0].frequency == 0.25);
  std::vector<CountsRecord> mixed_preps;
  for (const auto& s : all_settings()) mixed_preps.push_back({MeasSetting{}, s, 10, 1});
  mixed_preps[3].preparation = MeasSetting::parse("VV");
  CHECK_THROWS_AS(linear_inversion_state(std::span<const CountsRecord>(mixed_preps)), DataError);
}
