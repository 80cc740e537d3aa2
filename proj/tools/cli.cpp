#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>

#include "ppgate/coupler_design.hpp"
#include "ppgate/errors.hpp"
#include "ppgate/gate_analysis.hpp"
#include "ppgate/io.hpp"
#include "ppgate/tomography.hpp"

namespace ppgate::cli {

namespace {

using nlohmann::json;

struct UsageError : Error {
  using Error::Error;
};

struct Common {
  std::string device = "ideal";
  std::optional<std::string> convention;
  double p = 0.0;
  std::uint64_t shots = 0;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

void add_device_options(CLI::App* sub, Common& c) {
  sub->add_option("--device", c.device, "Device JSON file, or the builtin 'ideal' / 'measured'")
      ->capture_default_str();
  sub->add_option("--convention", c.convention, "Coupler phase convention: imag-cross or real-asym");
  sub->add_option("--p", c.p, "Distinguishable-photon weight")->check(CLI::Range(0.0, 1.0));
}

void add_sampling_options(CLI::App* sub, Common& c) {
  sub->add_option("--shots", c.shots, "Coincidence events per setting; 0 computes exact probabilities");
  sub->add_option("--seed", c.seed, "Run seed, required when --shots > 0");
}

void add_out_option(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "Write the report to this file instead of stdout");
}

DeviceDescription load_device(const Common& c) {
  DeviceDescription d;
  if (c.device == "ideal") {
    d = ideal_device_description();
  } else if (c.device == "measured") {
    d = measured_device_description();
  } else {
    d = io::device_from_json(io::read_text_file(c.device));
  }
  if (c.convention) d.convention = io::parse_convention(*c.convention);
  return d;
}

std::uint64_t require_seed(const Common& c) {
  if (c.shots > 0 && !c.seed) throw UsageError("--seed is required when --shots > 0");
  return c.seed.value_or(0);
}

json rows_json(const Eigen::Matrix4d& m) {
  json rows = json::array();
  for (int i = 0; i < 4; ++i) {
    json r = json::array();
    for (int j = 0; j < 4; ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

json complex_json(const ComplexMatrix& m) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json rr = json::array();
    json ii = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ii.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ii));
  }
  return {{"re", std::move(re)}, {"im", std::move(im)}};
}

json curve_json(const CurveFit& f) {
  return {{"amplitude", f.curve.amplitude},
          {"period_mm", f.curve.period},
          {"offset_mm", f.curve.offset},
          {"std_error", {f.std_error[0], f.std_error[1], f.std_error[2]}},
          {"chi2", f.chi2},
          {"dof", f.dof}};
}

json solution_json(const LengthSolution& s) {
  return {{"length_mm", s.length_mm}, {"t_h", s.t_h}, {"t_v", s.t_v}, {"residual", s.residual}};
}

void emit(const std::string& text, const Common& c, std::ostream& out) {
  if (c.out) {
    io::write_text_file(*c.out, text);
  } else {
    out << text;
  }
}

// -- subcommands ---------------------------------------------------------------

struct DesignArgs {
  std::string calibration;
  double window_min = 5.6;
  double window_max = 8.2;
  double tolerance = 0.02;
  std::optional<std::string> device_out;
};

void cmd_design(const Common& c, const DesignArgs& a, std::ostream& out) {
  const auto points = io::parse_calibration_csv(io::read_text_file(a.calibration));
  const auto fit = fit_model(points);
  const Convention conv = c.convention ? io::parse_convention(*c.convention) : Convention::ImagCross;
  const auto design = design_cnot_couplers(fit.model, a.window_min, a.window_max, a.tolerance, conv);
  const auto device = calibrated_device(design.device);
  const double fidelity = truth_table_fidelity(truth_table(device, {}));

  json report;
  report["format"] = "ppgate-design/1";
  report["fit"] = {{"h", curve_json(fit.h)}, {"v", curve_json(fit.v)}};
  report["window_mm"] = {a.window_min, a.window_max};
  report["tolerance"] = a.tolerance;
  report["interfering"] = solution_json(design.interfering);
  report["compensating"] = solution_json(design.compensating);
  report["device"] = json::parse(io::device_to_json(design.device));
  report["predicted_fidelity"] = fidelity;
  if (a.device_out) io::write_text_file(*a.device_out, io::device_to_json(design.device));
  emit(report.dump(2) + "\n", c, out);
}

void cmd_truth_table(const Common& c, bool correct, std::ostream& out) {
  const std::uint64_t seed = require_seed(c);
  const auto desc = load_device(c);
  const auto device = calibrated_device(desc);
  const DistinguishabilityModel d(c.p);

  const TruthTable raw = c.shots > 0 ? truth_table_from_counts(truth_table_counts(device, d, c.shots, seed))
                                     : truth_table(device, d);
  json report = json::parse(io::truth_table_to_json(raw));
  if (correct) {
    const auto fixed = correct_distinguishability(raw, device, c.p);
    report["rows"] = rows_json(fixed.rows());
    report["uncorrected_rows"] = rows_json(raw.rows());
    report["fidelity"] = truth_table_fidelity(fixed);
    report["uncorrected_fidelity"] = truth_table_fidelity(raw);
  } else {
    report["fidelity"] = truth_table_fidelity(raw);
  }
  const auto sp = success_probabilities(device, d);
  report["success_probabilities"] = {sp[0], sp[1], sp[2], sp[3]};
  report["p"] = c.p;
  report["shots"] = c.shots;
  if (c.shots > 0) report["seed"] = seed;
  report["convention"] = io::to_string(desc.convention);
  emit(report.dump(2) + "\n", c, out);
}

void cmd_bell(const Common& c, std::ostream& out) {
  const auto device = calibrated_device(load_device(c));
  const DistinguishabilityModel d(c.p);
  const io::BellReport r{bell_generation(device, d), bell_discrimination(device, d)};
  emit(io::bell_report_to_json(r), c, out);
}

struct TomoArgs {
  std::string input = "DH";
  std::optional<std::string> counts_in;
  std::optional<std::string> counts_out;
};

std::vector<CountsRecord> read_counts(const std::string& path) {
  return io::parse_counts_csv(io::read_text_file(path));
}

void cmd_tomo_state(const Common& c, const TomoArgs& a, std::ostream& out) {
  auto prep = MeasSetting::parse(a.input);
  std::vector<SettingFrequency> freqs;
  std::vector<CountsRecord> records;
  if (a.counts_in) {
    records = read_counts(*a.counts_in);
    if (records.empty()) throw DataError("counts file has no records");
    prep = records.front().preparation;
    for (const auto& r : records)
      if (!(r.preparation == prep)) throw DataError("counts file mixes preparations");
    freqs = frequencies(records);
  } else {
    const std::uint64_t seed = require_seed(c);
    const auto device = calibrated_device(load_device(c));
    const DistinguishabilityModel d(c.p);
    if (c.shots > 0) {
      const auto& settings = all_settings();
      for (int s = 0; s < 36; ++s)
        records.push_back(simulate_counts(device, d, prep, settings[s], c.shots, cell_seed(seed, 0, s)));
      freqs = frequencies(records);
    } else {
      freqs = exact_frequencies(device, d, prep);
    }
  }
  if (a.counts_out) {
    if (records.empty()) throw UsageError("--counts-out needs sampled counts (--shots > 0)");
    io::write_text_file(*a.counts_out, io::counts_to_csv(records));
  }
  const auto est = linear_inversion(freqs);
  const auto physical = project_to_physical(est.rho);
  const PureState2Q ideal(Vector4c(cnot_unitary() * prep.ket()));

  json report;
  report["format"] = "ppgate-state/1";
  report["input"] = prep.label();
  report["rho"] = complex_json(est.rho);
  report["physical"] = complex_json(physical.matrix());
  report["yield"] = est.yield;
  report["fidelity_to_ideal"] = state_fidelity(physical, DensityMatrix(ideal));
  report["p"] = c.p;
  report["shots"] = c.shots;
  emit(report.dump(2) + "\n", c, out);
}

void cmd_tomo_process(const Common& c, const TomoArgs& a, std::ostream& out) {
  std::optional<ChiMatrix> chi;
  if (a.counts_in) {
    chi = reconstruct_process(read_counts(*a.counts_in));
  } else {
    const std::uint64_t seed = require_seed(c);
    const auto device = calibrated_device(load_device(c));
    const DistinguishabilityModel d(c.p);
    if (c.shots > 0) {
      const auto records = process_counts(device, d, c.shots, seed);
      if (a.counts_out) io::write_text_file(*a.counts_out, io::counts_to_csv(records));
      chi = reconstruct_process(records);
    } else {
      if (a.counts_out) throw UsageError("--counts-out needs sampled counts (--shots > 0)");
      chi = process_tomography(device, d, 0, 0);
    }
  }
  json report = json::parse(io::chi_to_json(*chi));
  report["process_fidelity"] = process_fidelity(*chi, chi_of_unitary(cnot_unitary()));
  report["p"] = c.p;
  report["shots"] = c.shots;
  emit(report.dump(1) + "\n", c, out);
}

struct HomArgs {
  double reflectivity = 0.5;
  std::optional<double> v_meas;
};

void cmd_hom(const Common& c, const HomArgs& a, std::ostream& out) {
  const double v_theo = hom_visibility_theoretical(a.reflectivity);
  const double r = a.reflectivity;
  const auto bs = ppdc_transfer({1.0 - r, 1.0 - r}, Convention::ImagCross);
  const auto in = TwoPhotonInput::product(Vector2c(1, 0), Vector2c(1, 0));
  const double p_dist = evolve_distinguishable(bs, in).success_prob;
  const double p_mix = evolve_mixture(bs, in, DistinguishabilityModel(c.p)).success_prob;

  json report;
  report["format"] = "ppgate-hom/1";
  report["reflectivity"] = r;
  report["p"] = c.p;
  report["visibility_theoretical"] = v_theo;
  report["coincidence_probability"] = p_mix;
  report["coincidence_probability_distinguishable"] = p_dist;
  report["visibility_simulated"] = (p_dist - p_mix) / p_dist;
  if (a.v_meas) {
    report["v_meas"] = *a.v_meas;
    report["inferred_p"] = infer_p(*a.v_meas, v_theo).p();
  }
  emit(report.dump(2) + "\n", c, out);
}

void cmd_correct(const Common& c, const std::string& input, std::ostream& out) {
  const auto measured = io::truth_table_from_json(io::read_text_file(input));
  const auto device = calibrated_device(load_device(c));
  const auto fixed = correct_distinguishability(measured, device, c.p);
  json report = json::parse(io::truth_table_to_json(fixed));
  report["fidelity"] = truth_table_fidelity(fixed);
  report["uncorrected_fidelity"] = truth_table_fidelity(measured);
  report["p"] = c.p;
  emit(report.dump(2) + "\n", c, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulator for a polarization-encoded integrated CNOT gate", "ppgate"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ppgate 0.1.0");

  Common common;
  DesignArgs design;
  TomoArgs tomo;
  HomArgs hom;
  bool correct_flag = false;
  std::string correct_input;

  auto* s_design = app.add_subcommand("design", "Fit coupler calibration data and design the CNOT couplers");
  s_design->add_option("--calibration", design.calibration, "Calibration table (length_mm,t_h,t_v,sigma)")
      ->required()
      ->check(CLI::ExistingFile);
  s_design->add_option("--window-min", design.window_min, "Search window start (mm)")->capture_default_str();
  s_design->add_option("--window-max", design.window_max, "Search window end (mm)")->capture_default_str();
  s_design->add_option("--tolerance", design.tolerance, "Accepted transmissivity error")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s_design->add_option("--device-out", design.device_out, "Write the designed device JSON here");
  s_design->add_option("--convention", common.convention, "Phase convention of the emitted device");
  add_out_option(s_design, common);

  auto* s_tt = app.add_subcommand("truth-table", "Logical truth table of the calibrated device");
  add_device_options(s_tt, common);
  add_sampling_options(s_tt, common);
  s_tt->add_flag("--correct", correct_flag, "Subtract the distinguishable-photon contribution");
  add_out_option(s_tt, common);

  auto* s_bell = app.add_subcommand("bell", "Bell-state generation and discrimination");
  add_device_options(s_bell, common);
  add_out_option(s_bell, common);

  auto* s_state = app.add_subcommand("tomo-state", "State tomography of one product input");
  add_device_options(s_state, common);
  add_sampling_options(s_state, common);
  s_state->add_option("--input", tomo.input, "Logical product input, e.g. DH = |+>|0>")->capture_default_str();
  s_state->add_option("--counts", tomo.counts_in, "Reconstruct from a counts file instead of simulating")
      ->check(CLI::ExistingFile);
  s_state->add_option("--counts-out", tomo.counts_out, "Write simulated counts here");
  add_out_option(s_state, common);

  auto* s_proc = app.add_subcommand("tomo-process", "Process tomography of the calibrated device");
  add_device_options(s_proc, common);
  add_sampling_options(s_proc, common);
  s_proc->add_option("--counts", tomo.counts_in, "Reconstruct from a counts file instead of simulating")
      ->check(CLI::ExistingFile);
  s_proc->add_option("--counts-out", tomo.counts_out, "Write simulated counts here");
  add_out_option(s_proc, common);

  auto* s_hom = app.add_subcommand("hom", "Two-photon interference at a single beam splitter");
  s_hom->add_option("--reflectivity", hom.reflectivity, "Bar-port power fraction R")->capture_default_str();
  s_hom->add_option("--p", common.p, "Distinguishable-photon weight")->check(CLI::Range(0.0, 1.0));
  s_hom->add_option("--v-meas", hom.v_meas, "Measured visibility; reports the inferred p");
  add_out_option(s_hom, common);

  auto* s_corr = app.add_subcommand("correct", "Correct a measured truth table for distinguishability");
  s_corr->add_option("--input", correct_input, "Truth table JSON")->required()->check(CLI::ExistingFile);
  add_device_options(s_corr, common);
  add_out_option(s_corr, common);

  std::vector<const char*> argv{"ppgate"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (s_design->parsed()) cmd_design(common, design, out);
    if (s_tt->parsed()) cmd_truth_table(common, correct_flag, out);
    if (s_bell->parsed()) cmd_bell(common, out);
    if (s_state->parsed()) cmd_tomo_state(common, tomo, out);
    if (s_proc->parsed()) cmd_tomo_process(common, tomo, out);
    if (s_hom->parsed()) cmd_hom(common, hom, out);
    if (s_corr->parsed()) cmd_correct(common, correct_input, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}

}  // namespace ppgate::cli
