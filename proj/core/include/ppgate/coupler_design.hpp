#pragma once

#include <array>
#include <span>
#include <vector>

#include "ppgate/circuit.hpp"

namespace ppgate {

/// One characterized coupler: cross-coupling fractions at a given
/// interaction length (mm) with an absolute uncertainty.
struct CalibrationPoint {
  double length_mm = 0.0;
  double t_h = 0.0;
  double t_v = 0.0;
  double sigma = 0.01;

  friend bool operator==(const CalibrationPoint&, const CalibrationPoint&) = default;
};

/// Throws DataError on negative length, fractions outside [0, 1] or
/// non-positive sigma.
void validate(const CalibrationPoint& p);

/// T(L) = amplitude * sin^2(pi (L + offset) / period). The offset is the
/// effective extra length contributed by the curved approach sections.
struct SinusoidCurve {
  double amplitude = 1.0;
  double period = 1.0;  // mm
  double offset = 0.0;  // mm, canonical range [0, period)

  double operator()(double length_mm) const;
};

struct SinusoidalCouplerModel {
  SinusoidCurve h;
  SinusoidCurve v;
};

/// Throws DataError unless period > 0 and 0 < amplitude <= 1.
void validate(const SinusoidalCouplerModel& m);

struct TransmissionPair {
  double t_h = 0.0;
  double t_v = 0.0;
};

/// Evaluates both curves. Negative lengths extrapolate the same law.
TransmissionPair predict(const SinusoidalCouplerModel& model, double length_mm);

struct FitOptions {
  double period_min = 0.2;   // mm
  double period_max = 20.0;  // mm
  int period_steps = 1500;   // log-spaced
  int offset_steps = 120;    // per period
  int seeds = 12;            // best grid cells refined locally
};

struct CurveFit {
  SinusoidCurve curve;
  std::array<double, 3> std_error{};  // amplitude, period, offset
  double chi2 = 0.0;
  int dof = 0;
  double reduced_chi2() const { return dof > 0 ? chi2 / dof : 0.0; }
};

struct ModelFit {
  SinusoidalCouplerModel model;
  CurveFit h;
  CurveFit v;
};

/// Weighted least squares of one curve: coarse grid over (period, offset)
/// with the amplitude solved in closed form, then Levenberg-Marquardt
/// refinement of the best cells. Throws DataError on fewer than 5 points,
/// fewer than 3 distinct lengths, no visible oscillation, or data spanning
/// less than half of the fitted period.
CurveFit fit_curve(std::span<const double> lengths, std::span<const double> values,
                   std::span<const double> sigmas, const FitOptions& options = {});

ModelFit fit_model(std::span<const CalibrationPoint> points, const FitOptions& options = {});

struct DesignTarget {
  double t_h = 0.0;
  double t_v = 0.0;
  double tolerance = 0.02;
  double window_min = 5.6;  // mm
  double window_max = 8.2;  // mm
};

struct LengthSolution {
  double length_mm = 0.0;
  double t_h = 0.0;
  double t_v = 0.0;
  double residual = 0.0;  // max(|t_h - target|, |t_v - target|)
};

/// Local minima of the residual inside the window that fall within the
/// tolerance, sorted by residual then length. Throws DataError for an
/// empty or inverted window.
std::vector<LengthSolution> solve_length(const SinusoidalCouplerModel& model, const DesignTarget& target);

struct CnotCouplerDesign {
  LengthSolution interfering;   // PPDC1
  LengthSolution compensating;  // PPDC2 and PPDC3
  DeviceDescription device;
};

/// Solves for the interfering coupler (0, 2/3) and the compensators (1/3, 1)
/// and emits the chip description. Throws InfeasibleError if either target
/// has no solution in the window.
CnotCouplerDesign design_cnot_couplers(const SinusoidalCouplerModel& model, double window_min,
                                       double window_max, double tolerance = 0.02,
                                       Convention convention = Convention::ImagCross);

}  // namespace ppgate
