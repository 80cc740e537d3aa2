#include "ppgate/coupler_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ppgate/errors.hpp"

namespace ppgate {

namespace {

using std::numbers::pi;

double canonical_offset(double offset, double period) {
  double o = std::fmod(offset, period);
  if (o < 0.0) o += period;
  return o >= period ? 0.0 : o;
}

struct Problem {
  std::span<const double> x;
  std::span<const double> y;
  std::span<const double> sigma;

  double chi2(const SinusoidCurve& c) const {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = (c(x[i]) - y[i]) / sigma[i];
      s += r * r;
    }
    return s;
  }

  // Weighted residuals and Jacobian w.r.t. (amplitude, period, offset).
  void linearize(const SinusoidCurve& c, Eigen::VectorXd& r, Eigen::MatrixXd& j) const {
    const auto n = static_cast<Eigen::Index>(x.size());
    r.resize(n);
    j.resize(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double phase = pi * (x[i] + c.offset) / c.period;
      const double s = std::sin(phase);
      const double s2p = std::sin(2.0 * phase);
      const double inv = 1.0 / sigma[i];
      r[i] = (c.amplitude * s * s - y[i]) * inv;
      j(i, 0) = s * s * inv;
      j(i, 1) = -c.amplitude * s2p * phase / c.period * inv;
      j(i, 2) = c.amplitude * s2p * pi / c.period * inv;
    }
  }
};

SinusoidCurve clamp_curve(SinusoidCurve c, double period_min) {
  c.amplitude = std::clamp(c.amplitude, 1e-12, 1.0);
  c.period = std::max(c.period, 0.5 * period_min);
  return c;
}

SinusoidCurve levenberg_marquardt(const Problem& prob, SinusoidCurve c, double period_min) {
  Eigen::VectorXd r;
  Eigen::MatrixXd j;
  double lambda = 1e-3;
  double chi2 = prob.chi2(c);
  for (int it = 0; it < 500; ++it) {
    prob.linearize(c, r, j);
    const Eigen::Matrix3d jtj = j.transpose() * j;
    const Eigen::Vector3d g = j.transpose() * r;
    bool accepted = false;
    while (lambda < 1e12) {
      Eigen::Matrix3d damped = jtj;
      damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::Vector3d step = damped.ldlt().solve(-g);
      const SinusoidCurve trial = clamp_curve(
          {c.amplitude + step[0], c.period + step[1], c.offset + step[2]}, period_min);
      const double trial_chi2 = prob.chi2(trial);
      if (trial_chi2 <= chi2) {
        const double gain = chi2 - trial_chi2;
        const double size = std::abs(step[0]) + std::abs(step[1]) + std::abs(step[2]);
        c = trial;
        chi2 = trial_chi2;
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
        if (gain <= 1e-14 * (1.0 + chi2) && size < 1e-12 * (1.0 + c.period)) return c;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) break;
  }
  return c;
}

std::array<double, 3> standard_errors(const Problem& prob, const SinusoidCurve& c) {
  Eigen::VectorXd r;
  Eigen::MatrixXd j;
  prob.linearize(c, r, j);
  const Eigen::Matrix3d jtj = j.transpose() * j;
  Eigen::FullPivLU<Eigen::Matrix3d> lu(jtj);
  std::array<double, 3> err{};
  if (!lu.isInvertible()) {
    err.fill(std::numeric_limits<double>::infinity());
    return err;
  }
  const Eigen::Matrix3d cov = lu.inverse();
  for (int k = 0; k < 3; ++k) err[k] = std::sqrt(std::max(0.0, cov(k, k)));
  return err;
}

double golden_minimize(const auto& f, double lo, double hi) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > 1e-11) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

}  // namespace

void validate(const CalibrationPoint& p) {
  const auto frac = [](double t) { return std::isfinite(t) && t >= 0.0 && t <= 1.0; };
  if (!std::isfinite(p.length_mm) || p.length_mm < 0.0) {
    throw DataError("calibration point: negative or non-finite interaction length");
  }
  if (!frac(p.t_h) || !frac(p.t_v)) throw DataError("calibration point: transmission outside [0, 1]");
  if (!std::isfinite(p.sigma) || p.sigma <= 0.0) throw DataError("calibration point: sigma must be > 0");
}

double SinusoidCurve::operator()(double length_mm) const {
  const double s = std::sin(pi * (length_mm + offset) / period);
  return amplitude * s * s;
}

void validate(const SinusoidalCouplerModel& m) {
  for (const auto* c : {&m.h, &m.v}) {
    if (!std::isfinite(c->period) || c->period <= 0.0) throw DataError("coupler model: period must be > 0");
    if (!std::isfinite(c->amplitude) || c->amplitude <= 0.0 || c->amplitude > 1.0) {
      throw DataError("coupler model: amplitude must lie in (0, 1]");
    }
    if (!std::isfinite(c->offset)) throw DataError("coupler model: non-finite offset");
  }
}

TransmissionPair predict(const SinusoidalCouplerModel& model, double length_mm) {
  return {model.h(length_mm), model.v(length_mm)};
}

CurveFit fit_curve(std::span<const double> lengths, std::span<const double> values,
                   std::span<const double> sigmas, const FitOptions& options) {
  if (lengths.size() != values.size() || lengths.size() != sigmas.size()) {
    throw DataError("fit: lengths, values and sigmas differ in size");
  }
  if (lengths.size() < 5) {
    throw DataError("fit: need at least 5 calibration points, got " + std::to_string(lengths.size()));
  }
  std::vector<double> distinct(lengths.begin(), lengths.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) throw DataError("fit: need at least 3 distinct interaction lengths");

  const auto [vmin, vmax] = std::minmax_element(values.begin(), values.end());
  std::vector<double> sorted_sigma(sigmas.begin(), sigmas.end());
  std::nth_element(sorted_sigma.begin(), sorted_sigma.begin() + sorted_sigma.size() / 2, sorted_sigma.end());
  const double typical_sigma = sorted_sigma[sorted_sigma.size() / 2];
  if (*vmax - *vmin <= std::max(2.0 * typical_sigma, 1e-9)) {
    throw DataError("fit: no oscillation observable (transmission range within noise)");
  }

  const Problem prob{lengths, values, sigmas};

  // Coarse grid over (period, offset), amplitude profiled out.
  struct Cell {
    double chi2;
    SinusoidCurve curve;
  };
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(options.period_steps) * options.offset_steps);
  const double log_ratio = std::log(options.period_max / options.period_min);
  std::vector<double> weight(lengths.size());
  std::vector<double> sin_buf(lengths.size());
  std::vector<double> cos_buf(lengths.size());
  double yy = 0.0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    weight[i] = 1.0 / (sigmas[i] * sigmas[i]);
    yy += weight[i] * values[i] * values[i];
  }
  for (int ip = 0; ip < options.period_steps; ++ip) {
    const double period =
        options.period_min * std::exp(log_ratio * ip / std::max(1, options.period_steps - 1));
    // Offsets step the phase by a constant angle, so rotate (sin, cos)
    // instead of re-evaluating sines.
    const double step = pi / options.offset_steps;
    const double cs = std::cos(step);
    const double sn = std::sin(step);
    for (std::size_t i = 0; i < lengths.size(); ++i) {
      const double phase = pi * lengths[i] / period;
      sin_buf[i] = std::sin(phase);
      cos_buf[i] = std::cos(phase);
    }
    for (int io = 0; io < options.offset_steps; ++io) {
      const double offset = period * io / options.offset_steps;
      double num = 0.0;
      double den = 0.0;
      for (std::size_t i = 0; i < lengths.size(); ++i) {
        const double s2 = sin_buf[i] * sin_buf[i];
        num += weight[i] * values[i] * s2;
        den += weight[i] * s2 * s2;
        const double s = sin_buf[i] * cs + cos_buf[i] * sn;
        cos_buf[i] = cos_buf[i] * cs - sin_buf[i] * sn;
        sin_buf[i] = s;
      }
      const double a = den > 0.0 ? std::clamp(num / den, 1e-12, 1.0) : 1e-12;
      cells.push_back({yy - 2.0 * a * num + a * a * den, {a, period, offset}});
    }
  }
  const auto n_seeds = std::min<std::size_t>(static_cast<std::size_t>(options.seeds), cells.size());
  std::partial_sort(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(n_seeds), cells.end(),
                    [](const Cell& a, const Cell& b) { return a.chi2 < b.chi2; });

  CurveFit best;
  best.chi2 = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n_seeds; ++k) {
    SinusoidCurve c = levenberg_marquardt(prob, cells[k].curve, options.period_min);
    const double chi2 = prob.chi2(c);
    if (chi2 < best.chi2) {
      best.curve = c;
      best.chi2 = chi2;
    }
  }
  best.curve.offset = canonical_offset(best.curve.offset, best.curve.period);
  best.std_error = standard_errors(prob, best.curve);
  best.dof = static_cast<int>(lengths.size()) - 3;

  if (distinct.back() - distinct.front() < 0.5 * best.curve.period) {
    throw DataError("fit: calibration lengths span less than half a beating period");
  }
  return best;
}

ModelFit fit_model(std::span<const CalibrationPoint> points, const FitOptions& options) {
  std::vector<double> x, th, tv, s;
  for (const auto& p : points) {
    validate(p);
    x.push_back(p.length_mm);
    th.push_back(p.t_h);
    tv.push_back(p.t_v);
    s.push_back(p.sigma);
  }
  ModelFit fit;
  try {
    fit.h = fit_curve(x, th, s, options);
  } catch (const DataError& e) {
    throw DataError(std::string("H polarization: ") + e.what());
  }
  try {
    fit.v = fit_curve(x, tv, s, options);
  } catch (const DataError& e) {
    throw DataError(std::string("V polarization: ") + e.what());
  }
  fit.model = {fit.h.curve, fit.v.curve};
  return fit;
}

std::vector<LengthSolution> solve_length(const SinusoidalCouplerModel& model, const DesignTarget& target) {
  validate(model);
  if (!(target.window_max > target.window_min) || target.window_min < 0.0) {
    throw DataError("solve_length: empty search window");
  }
  if (!(target.tolerance > 0.0)) throw DataError("solve_length: tolerance must be > 0");

  const auto residual = [&](double len) {
    const auto t = predict(model, len);
    return std::max(std::abs(t.t_h - target.t_h), std::abs(t.t_v - target.t_v));
  };

  const double width = target.window_max - target.window_min;
  const int n = std::max(200, static_cast<int>(std::ceil(width / 1e-3)));
  const double step = width / n;
  std::vector<double> r(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) r[static_cast<std::size_t>(i)] = residual(target.window_min + i * step);

  std::vector<LengthSolution> out;
  for (int i = 0; i <= n; ++i) {
    const double left = i > 0 ? r[static_cast<std::size_t>(i - 1)] : std::numeric_limits<double>::infinity();
    const double right = i < n ? r[static_cast<std::size_t>(i + 1)] : std::numeric_limits<double>::infinity();
    const double here = r[static_cast<std::size_t>(i)];
    // Plateaus count once, at their left edge.
    if (!(here < left && here <= right)) continue;
    const double lo = target.window_min + std::max(0, i - 1) * step;
    const double hi = target.window_min + std::min(n, i + 1) * step;
    const double len = golden_minimize(residual, lo, hi);
    const double res = residual(len);
    if (res > target.tolerance) continue;
    const auto t = predict(model, len);
    out.push_back({len, t.t_h, t.t_v, res});
  }
  std::sort(out.begin(), out.end(), [](const LengthSolution& a, const LengthSolution& b) {
    return a.residual != b.residual ? a.residual < b.residual : a.length_mm < b.length_mm;
  });
  return out;
}

CnotCouplerDesign design_cnot_couplers(const SinusoidalCouplerModel& model, double window_min,
                                       double window_max, double tolerance, Convention convention) {
  const auto solve = [&](double th, double tv, const char* name) {
    const auto sols = solve_length(model, {th, tv, tolerance, window_min, window_max});
    if (sols.empty()) {
      throw InfeasibleError(std::string("no interaction length in [") + std::to_string(window_min) +
                            ", " + std::to_string(window_max) + "] mm realizes " + name +
                            " within tolerance " + std::to_string(tolerance));
    }
    return sols.front();
  };
  CnotCouplerDesign d;
  d.interfering = solve(0.0, 2.0 / 3.0, "the interfering coupler (T_H, T_V) = (0, 2/3)");
  d.compensating = solve(1.0 / 3.0, 1.0, "the compensators (T_H, T_V) = (1/3, 1)");

  d.device.convention = convention;
  const auto& a = d.interfering;
  const auto& b = d.compensating;
  d.device.elements = {
      {"PPDC1", ElementRole::Coupler, a.t_h, a.t_v, {}, {}, {}, Port::Cross},
      {"PPDC2", ElementRole::Compensator, b.t_h, b.t_v, {}, {}, Rail::Target, Port::Cross},
      {"PPDC3", ElementRole::Compensator, b.t_h, b.t_v, {}, {}, Rail::Control, Port::Cross},
  };
  return d;
}

}  // namespace ppgate
