#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "ppgate/coupler_design.hpp"
#include "ppgate/gate_analysis.hpp"
#include "ppgate/tomography.hpp"

using namespace ppgate;

namespace {

constexpr int kCases = 200;

ComplexMatrix random_hermitian(gen::Rng& rng) {
  Matrix4c g;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = rng.complex_normal();
  return 0.5 * (g + g.adjoint());
}

// Chip whose 16 process inputs all have a non-negligible success probability.
TransferMatrix usable_chip(gen::Rng& rng) {
  for (;;) {
    const auto chip = gen::chip(rng);
    bool ok = true;
    for (const auto& prep : process_preparations())
      ok = ok && evolve_indistinguishable(chip, logical_input(prep.ket())).success_prob > 1e-4;
    if (ok) return chip;
  }
}

}  // namespace

TEST_CASE("property: PPDC transfer matrices are unitary") {
  gen::Rng rng(101);
  for (int k = 0; k < kCases; ++k) {
    const auto e = gen::ppdc(rng);
    const auto conv = gen::convention(rng);
    const Matrix4c u = ppdc_transfer(e, conv).matrix();
    CHECK((u.adjoint() * u - Matrix4c::Identity()).norm() < 1e-12);
    const Matrix2c b = coupler_block(rng.uniform(), conv);
    CHECK((b.adjoint() * b - Matrix2c::Identity()).norm() < 1e-12);
  }
}

TEST_CASE("property: chips are passive") {
  gen::Rng rng(102);
  for (int k = 0; k < kCases; ++k) {
    Eigen::JacobiSVD<Matrix4c> svd(gen::chip(rng).matrix());
    CHECK(svd.singularValues().maxCoeff() <= 1.0 + 1e-12);
  }
}

TEST_CASE("property: truth-table rows are normalized distributions") {
  gen::Rng rng(103);
  for (int k = 0; k < kCases; ++k) {
    const auto chip = usable_chip(rng);
    const DistinguishabilityModel d(rng.uniform());
    const auto tt = truth_table(chip, d);
    for (int r = 0; r < 4; ++r) {
      CHECK(std::abs(tt.rows().row(r).sum() - 1.0) < 1e-12);
      CHECK(tt.rows().row(r).minCoeff() >= 0.0);
    }
    const double f = truth_table_fidelity(tt);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0 + 1e-12);
  }
}

TEST_CASE("property: coincidence probabilities are linear in p") {
  gen::Rng rng(104);
  for (int k = 0; k < kCases; ++k) {
    const auto chip = gen::chip(rng);
    const auto in = TwoPhotonInput::joint(gen::unit4(rng));
    const double p = rng.uniform();
    const double s0 = evolve_indistinguishable(chip, in).success_prob;
    const double s1 = evolve_distinguishable(chip, in).success_prob;
    const double sp = evolve_mixture(chip, in, DistinguishabilityModel(p)).success_prob;
    CHECK(std::abs(sp - ((1 - p) * s0 + p * s1)) < 1e-14);
    CHECK(s0 <= 1.0 + 1e-12);
    CHECK(s1 <= 1.0 + 1e-12);
  }
}

TEST_CASE("property: two-photon output patterns sum to one for unitary devices") {
  gen::Rng rng(105);
  for (int k = 0; k < kCases; ++k) {
    const auto u = TransferMatrix::unitary(gen::unitary4(rng));
    const auto pattern = output_pattern_indistinguishable(u, TwoPhotonInput::joint(gen::unit4(rng)));
    CHECK(std::abs(pattern.sum() - 1.0) < 1e-12);
    CHECK(pattern.minCoeff() >= 0.0);
  }
}

TEST_CASE("property: state fidelity is symmetric and bounded") {
  gen::Rng rng(106);
  for (int k = 0; k < kCases; ++k) {
    const DensityMatrix a(gen::density(rng));
    const DensityMatrix b(gen::density(rng));
    const double fab = state_fidelity(a, b);
    const double fba = state_fidelity(b, a);
    CHECK(std::abs(fab - fba) < 1e-10);
    CHECK(fab >= 0.0);
    CHECK(fab <= 1.0 + 1e-12);
    CHECK(std::abs(state_fidelity(a, a) - 1.0) < 1e-10);
    CHECK(std::abs(fab - oracle::fidelity_trace_norm(a.matrix(), b.matrix())) < 1e-9);
  }
}

TEST_CASE("property: reconstructed chi is Hermitian, positive and unit trace") {
  gen::Rng rng(107);
  for (int k = 0; k < kCases; ++k) {
    const auto chip = usable_chip(rng);
    const DistinguishabilityModel d(rng.uniform());
    const auto chi = process_tomography(chip, d, 0, 0);
    CHECK((chi.matrix() - chi.matrix().adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix16c> es(chi.matrix());
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
    CHECK(std::abs(chi.trace() - 1.0) < 1e-12);
    const double f = process_fidelity(chi, chi_of_unitary(cnot_unitary()));
    CHECK(f >= 0.0);
    CHECK(f <= 1.0 + 1e-9);
  }
}

TEST_CASE("property: noiseless process tomography round trip") {
  gen::Rng rng(113);
  double worst = 0.0;
  for (int k = 0; k < kCases; ++k) {
    const auto chip = usable_chip(rng);
    const DistinguishabilityModel d(rng.uniform());
    const auto chi = process_tomography(chip, d, 0, 0);
    for (const auto& prep : process_preparations()) {
      const Matrix4c out = chi.apply(prep.projector());
      const double tr = out.trace().real();
      for (const auto& s : all_settings()) {
        const double resim = (s.projector() * out).trace().real() / tr;
        worst = std::max(worst, std::abs(resim - setting_probability(chip, d, prep, s)));
      }
    }
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("property: project_to_physical is idempotent") {
  gen::Rng rng(108);
  for (int k = 0; k < kCases; ++k) {
    ComplexMatrix h = random_hermitian(rng);
    // A negative definite draw has nothing to keep; flip it.
    if (Eigen::SelfAdjointEigenSolver<ComplexMatrix>(h).eigenvalues().maxCoeff() <= 0.0) h = -h;
    const auto once = project_to_physical(h);
    const auto twice = project_to_physical(once.matrix());
    CHECK((once.matrix() - twice.matrix()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(once.matrix().trace().real() - 1.0) < 1e-12);
  }
}

TEST_CASE("property: linear inversion recovers random states") {
  gen::Rng rng(109);
  for (int k = 0; k < kCases; ++k) {
    const Matrix4c rho = gen::density(rng);
    std::vector<SettingFrequency> f;
    for (const auto& s : all_settings()) f.push_back({s, (s.projector() * rho).trace().real()});
    CHECK((linear_inversion_state(f) - rho).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("property: coupler curves are periodic and bounded") {
  gen::Rng rng(110);
  for (int k = 0; k < kCases; ++k) {
    const SinusoidCurve c{rng.uniform(0.05, 1.0), rng.uniform(0.2, 20.0), rng.uniform(0.0, 5.0)};
    const double l = rng.uniform(0.0, 50.0);
    CHECK(std::abs(c(l) - c(l + c.period)) < 1e-12);
    CHECK(c(l) >= 0.0);
    CHECK(c(l) <= c.amplitude + 1e-15);
  }
}

TEST_CASE("property: solve_length respects the tolerance and the window") {
  gen::Rng rng(111);
  for (int k = 0; k < kCases; ++k) {
    SinusoidalCouplerModel m;
    m.h = {rng.uniform(0.3, 1.0), rng.uniform(1.0, 4.0), rng.uniform(0.0, 1.0)};
    m.v = {rng.uniform(0.3, 1.0), rng.uniform(1.0, 4.0), rng.uniform(0.0, 1.0)};
    const DesignTarget t{rng.uniform(), rng.uniform(), rng.uniform(0.01, 0.3), 5.6, 8.2};
    const auto sols = solve_length(m, t);
    for (std::size_t i = 0; i < sols.size(); ++i) {
      CHECK(sols[i].residual <= t.tolerance);
      CHECK(sols[i].length_mm >= t.window_min);
      CHECK(sols[i].length_mm <= t.window_max);
      if (i > 0) CHECK(sols[i - 1].residual <= sols[i].residual);
    }
    DesignTarget tight = t;
    tight.tolerance /= 2.0;
    CHECK(solve_length(m, tight).size() <= sols.size());
  }
}

TEST_CASE("property: distinguishability correction inverts convex mixing") {
  gen::Rng rng(112);
  for (int k = 0; k < kCases; ++k) {
    const auto chip = usable_chip(rng);
    const auto ind = truth_table(chip, DistinguishabilityModel(0.0));
    const auto dist = truth_table(chip, DistinguishabilityModel(1.0));
    const double p = rng.uniform(0.0, 0.5);
    const TruthTable mixed((1 - p) * ind.rows() + p * dist.rows());
    const auto back = correct_distinguishability(mixed, dist, p);
    CHECK((back.rows() - ind.rows()).cwiseAbs().maxCoeff() < 1e-9);
  }
}
