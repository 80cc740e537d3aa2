#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ppgate/circuit.hpp"
#include "ppgate/coupler_design.hpp"
#include "ppgate/gate_analysis.hpp"
#include "ppgate/tomography.hpp"

namespace ppgate::io {

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

std::string_view to_string(Convention c);
Convention parse_convention(std::string_view name);  // "imag-cross" | "real-asym"

/// Shortest decimal string that re-parses to the identical double.
std::string format_double(double x);

// Device description (JSON):
//   {"format": "ppgate-device/1", "convention": "imag-cross",
//    "elements": [{"label": "PPDC1", "role": "coupler", "t_h": 0, "t_v": 0.64,
//                  "sigma_t_h": 0.01, "sigma_t_v": 0.01},
//                 {"label": "PPDC2", "role": "compensator", "rail": "target",
//                  "port": "cross", "t_h": 0.43, "t_v": 0.98}, ...]}
std::string device_to_json(const DeviceDescription& d);
DeviceDescription device_from_json(std::string_view text);

// Calibration table (delimited text), one coupler per line:
//   length_mm,t_h,t_v,sigma
// Blank lines and lines starting with '#' are ignored; a header line is
// optional. Errors name the 1-based line number.
std::vector<CalibrationPoint> parse_calibration_csv(std::string_view text);
std::string calibration_to_csv(const std::vector<CalibrationPoint>& points);

// Counts records (delimited text):
//   preparation,setting,shots,successes
//   DH,HV,1000000,27791
std::vector<CountsRecord> parse_counts_csv(std::string_view text);
std::string counts_to_csv(const std::vector<CountsRecord>& records);

// Process matrix (JSON): {"format": "ppgate-chi/1", "basis": ["II", ...],
//   "re": [[...16...] x16], "im": [[...] x16]}
std::string chi_to_json(const ChiMatrix& chi);
ChiMatrix chi_from_json(std::string_view text);

// Truth table (JSON): {"format": "ppgate-truth-table/1", "rows": [[4] x4]}
std::string truth_table_to_json(const TruthTable& tt);
TruthTable truth_table_from_json(std::string_view text);

// Bell report (JSON): {"format": "ppgate-bell/1",
//   "generation": [{"input": "+0", "target": "Phi+", "re": [[4] x4], "im": [[4] x4],
//                   "fidelity": f, "success_probability": s}, ... x4],
//   "mean_fidelity": f, "confusion": [[4] x4], "discrimination_probability": q}
struct BellReport {
  BellGeneration generation;
  BellDiscrimination discrimination;
};

std::string bell_report_to_json(const BellReport& report);
BellReport bell_report_from_json(std::string_view text);

}  // namespace ppgate::io
