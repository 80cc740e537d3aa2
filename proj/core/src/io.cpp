#include "ppgate/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ppgate/errors.hpp"

namespace ppgate::io {

namespace {

using nlohmann::json;

constexpr std::string_view kDeviceFormat = "ppgate-device/1";
constexpr std::string_view kChiFormat = "ppgate-chi/1";
constexpr std::string_view kTruthTableFormat = "ppgate-truth-table/1";
constexpr std::string_view kBellFormat = "ppgate-bell/1";

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string(what) + ": invalid JSON: " + e.what());
  }
}

void expect_format(const json& j, std::string_view format, const char* what) {
  if (!j.is_object() || !j.contains("format") || j["format"] != format) {
    throw DataError(std::string(what) + ": expected \"format\": \"" + std::string(format) + "\"");
  }
}

template <typename T>
T get_field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw DataError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw DataError(where + ": field '" + key + "' has the wrong type");
  }
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

// Iterates non-blank, non-comment lines with their 1-based line numbers.
template <typename F>
void for_each_data_line(std::string_view text, F&& f) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    const auto line = trim(text.substr(start, end == std::string_view::npos ? end : end - start));
    ++line_no;
    if (!line.empty() && line.front() != '#') f(line, line_no);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
}

std::string line_error(std::size_t line_no, const std::string& msg) {
  return "line " + std::to_string(line_no) + ": " + msg;
}

template <typename M>
json real_rows(const M& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

Eigen::Matrix4d read_rows4(const json& j, const char* key, const std::string& where) {
  const auto rows = get_field<std::vector<std::vector<double>>>(j, key, where);
  if (rows.size() != 4) throw DataError(where + ": '" + key + "' must have 4 rows");
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i) {
    if (rows[i].size() != 4) throw DataError(where + ": '" + key + "' must have 4 columns");
    for (int k = 0; k < 4; ++k) m(i, k) = rows[i][k];
  }
  return m;
}

std::string_view rail_name(Rail r) { return r == Rail::Control ? "control" : "target"; }

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

std::string_view to_string(Convention c) {
  return c == Convention::ImagCross ? "imag-cross" : "real-asym";
}

Convention parse_convention(std::string_view name) {
  if (name == "imag-cross") return Convention::ImagCross;
  if (name == "real-asym") return Convention::RealAsym;
  throw DataError("unknown convention '" + std::string(name) + "' (expected imag-cross or real-asym)");
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

std::string device_to_json(const DeviceDescription& d) {
  json elements = json::array();
  for (const auto& e : d.elements) {
    json j;
    j["label"] = e.label;
    j["role"] = e.role == ElementRole::Coupler ? "coupler" : "compensator";
    j["t_h"] = e.t_h;
    j["t_v"] = e.t_v;
    if (e.sigma_t_h) j["sigma_t_h"] = *e.sigma_t_h;
    if (e.sigma_t_v) j["sigma_t_v"] = *e.sigma_t_v;
    if (e.role == ElementRole::Compensator) {
      if (e.rail) j["rail"] = rail_name(*e.rail);
      j["port"] = e.port == Port::Cross ? "cross" : "bar";
    }
    elements.push_back(std::move(j));
  }
  json root;
  root["format"] = kDeviceFormat;
  root["convention"] = to_string(d.convention);
  root["elements"] = std::move(elements);
  return root.dump(2) + "\n";
}

DeviceDescription device_from_json(std::string_view text) {
  const json root = parse_json(text, "device");
  expect_format(root, kDeviceFormat, "device");
  DeviceDescription d;
  d.convention = parse_convention(get_field<std::string>(root, "convention", "device"));
  if (!root.contains("elements") || !root["elements"].is_array()) {
    throw DataError("device: 'elements' must be an array");
  }
  int idx = 0;
  for (const auto& j : root["elements"]) {
    const std::string where = "device element " + std::to_string(idx++);
    DeviceElement e;
    e.label = get_field<std::string>(j, "label", where);
    const auto role = get_field<std::string>(j, "role", where);
    if (role == "coupler") {
      e.role = ElementRole::Coupler;
    } else if (role == "compensator") {
      e.role = ElementRole::Compensator;
    } else {
      throw DataError(where + ": unknown role '" + role + "'");
    }
    e.t_h = get_field<double>(j, "t_h", where);
    e.t_v = get_field<double>(j, "t_v", where);
    try {
      PpdcElement(e.t_h, e.t_v, e.label);
    } catch (const DataError& err) {
      throw DataError(where + " (" + e.label + "): " + err.what());
    }
    if (j.contains("sigma_t_h")) e.sigma_t_h = get_field<double>(j, "sigma_t_h", where);
    if (j.contains("sigma_t_v")) e.sigma_t_v = get_field<double>(j, "sigma_t_v", where);
    if (j.contains("rail")) {
      const auto rail = get_field<std::string>(j, "rail", where);
      if (rail == "control") {
        e.rail = Rail::Control;
      } else if (rail == "target") {
        e.rail = Rail::Target;
      } else {
        throw DataError(where + ": unknown rail '" + rail + "'");
      }
    }
    if (j.contains("port")) {
      const auto port = get_field<std::string>(j, "port", where);
      if (port == "cross") {
        e.port = Port::Cross;
      } else if (port == "bar") {
        e.port = Port::Bar;
      } else {
        throw DataError(where + ": unknown port '" + port + "'");
      }
    }
    d.elements.push_back(std::move(e));
  }
  return d;
}

std::vector<CalibrationPoint> parse_calibration_csv(std::string_view text) {
  std::vector<CalibrationPoint> points;
  bool first = true;
  for_each_data_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto fields = split(line, ',');
    const bool header = first && !fields.empty() && trim(fields[0]) == "length_mm";
    first = false;
    if (header) return;
    if (fields.size() != 4) {
      throw DataError(line_error(line_no, "expected 4 fields (length_mm,t_h,t_v,sigma), got " +
                                              std::to_string(fields.size())));
    }
    CalibrationPoint p;
    double* dst[4] = {&p.length_mm, &p.t_h, &p.t_v, &p.sigma};
    static constexpr const char* names[4] = {"length_mm", "t_h", "t_v", "sigma"};
    for (int i = 0; i < 4; ++i) {
      if (!parse_number(fields[i], *dst[i])) {
        throw DataError(line_error(line_no, std::string("malformed ") + names[i] + " '" +
                                                std::string(trim(fields[i])) + "'"));
      }
    }
    try {
      validate(p);
    } catch (const DataError& e) {
      throw DataError(line_error(line_no, e.what()));
    }
    points.push_back(p);
  });
  if (points.empty()) throw DataError("calibration table has no data rows");
  return points;
}

std::string calibration_to_csv(const std::vector<CalibrationPoint>& points) {
  std::string out = "length_mm,t_h,t_v,sigma\n";
  for (const auto& p : points) {
    out += format_double(p.length_mm) + "," + format_double(p.t_h) + "," + format_double(p.t_v) + "," +
           format_double(p.sigma) + "\n";
  }
  return out;
}

std::vector<CountsRecord> parse_counts_csv(std::string_view text) {
  std::vector<CountsRecord> records;
  bool first = true;
  for_each_data_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto fields = split(line, ',');
    const bool header = first && !fields.empty() && trim(fields[0]) == "preparation";
    first = false;
    if (header) return;
    if (fields.size() != 4) {
      throw DataError(line_error(line_no, "expected 4 fields (preparation,setting,shots,successes)"));
    }
    CountsRecord r;
    try {
      r.preparation = MeasSetting::parse(std::string(trim(fields[0])));
      r.setting = MeasSetting::parse(std::string(trim(fields[1])));
    } catch (const DataError& e) {
      throw DataError(line_error(line_no, e.what()));
    }
    if (!parse_number(fields[2], r.shots)) throw DataError(line_error(line_no, "malformed shots"));
    if (!parse_number(fields[3], r.successes)) throw DataError(line_error(line_no, "malformed successes"));
    if (r.successes > r.shots) throw DataError(line_error(line_no, "successes exceed shots"));
    records.push_back(r);
  });
  return records;
}

std::string counts_to_csv(const std::vector<CountsRecord>& records) {
  std::string out = "preparation,setting,shots,successes\n";
  for (const auto& r : records) {
    out += r.preparation.label() + "," + r.setting.label() + "," + std::to_string(r.shots) + "," +
           std::to_string(r.successes) + "\n";
  }
  return out;
}

std::string chi_to_json(const ChiMatrix& chi) {
  json basis = json::array();
  json re = json::array();
  json im = json::array();
  for (int m = 0; m < 16; ++m) {
    basis.push_back(std::string(pauli_label(m)));
    json rr = json::array();
    json ii = json::array();
    for (int n = 0; n < 16; ++n) {
      rr.push_back(chi(m, n).real());
      ii.push_back(chi(m, n).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ii));
  }
  json root;
  root["format"] = kChiFormat;
  root["basis"] = std::move(basis);
  root["re"] = std::move(re);
  root["im"] = std::move(im);
  return root.dump(1) + "\n";
}

ChiMatrix chi_from_json(std::string_view text) {
  const json root = parse_json(text, "chi");
  expect_format(root, kChiFormat, "chi");
  const auto re = get_field<std::vector<std::vector<double>>>(root, "re", "chi");
  const auto im = get_field<std::vector<std::vector<double>>>(root, "im", "chi");
  if (re.size() != 16 || im.size() != 16) throw DataError("chi: expected 16 rows");
  Matrix16c m;
  for (int i = 0; i < 16; ++i) {
    if (re[i].size() != 16 || im[i].size() != 16) throw DataError("chi: expected 16 columns");
    for (int j = 0; j < 16; ++j) m(i, j) = Complex(re[i][j], im[i][j]);
  }
  return ChiMatrix(m);
}

std::string truth_table_to_json(const TruthTable& tt) {
  json rows = json::array();
  for (int i = 0; i < 4; ++i) {
    json r = json::array();
    for (int j = 0; j < 4; ++j) r.push_back(tt(i, j));
    rows.push_back(std::move(r));
  }
  json root;
  root["format"] = kTruthTableFormat;
  root["rows"] = std::move(rows);
  return root.dump(2) + "\n";
}

TruthTable truth_table_from_json(std::string_view text) {
  const json root = parse_json(text, "truth table");
  expect_format(root, kTruthTableFormat, "truth table");
  const auto rows = get_field<std::vector<std::vector<double>>>(root, "rows", "truth table");
  if (rows.size() != 4) throw DataError("truth table: expected 4 rows");
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i) {
    if (rows[i].size() != 4) throw DataError("truth table: expected 4 columns");
    for (int j = 0; j < 4; ++j) m(i, j) = rows[i][j];
  }
  return TruthTable(m);
}

std::string bell_report_to_json(const BellReport& report) {
  static constexpr const char* kInputs[4] = {"+0", "-0", "+1", "-1"};
  static constexpr const char* kTargets[4] = {"Phi+", "Phi-", "Psi+", "Psi-"};
  const auto& g = report.generation;
  json gen = json::array();
  for (int k = 0; k < 4; ++k) {
    json e;
    e["input"] = kInputs[k];
    e["target"] = kTargets[k];
    e["re"] = real_rows(g.outputs[k].real());
    e["im"] = real_rows(g.outputs[k].imag());
    e["fidelity"] = g.fidelities[k];
    e["success_probability"] = g.success_probs[k];
    gen.push_back(std::move(e));
  }
  json root;
  root["format"] = kBellFormat;
  root["generation"] = std::move(gen);
  root["mean_fidelity"] = g.mean_fidelity;
  root["confusion"] = real_rows(report.discrimination.confusion);
  root["discrimination_probability"] = report.discrimination.probability;
  return root.dump(2) + "\n";
}

BellReport bell_report_from_json(std::string_view text) {
  const json root = parse_json(text, "bell report");
  expect_format(root, kBellFormat, "bell report");
  if (!root.contains("generation") || !root["generation"].is_array() || root["generation"].size() != 4) {
    throw DataError("bell report: 'generation' must list 4 states");
  }
  BellReport r;
  for (int k = 0; k < 4; ++k) {
    const std::string where = "bell report state " + std::to_string(k);
    const json& e = root["generation"][static_cast<std::size_t>(k)];
    r.generation.outputs[k] = read_rows4(e, "re", where).cast<Complex>() +
                              Complex(0.0, 1.0) * read_rows4(e, "im", where).cast<Complex>();
    r.generation.fidelities[k] = get_field<double>(e, "fidelity", where);
    r.generation.success_probs[k] = get_field<double>(e, "success_probability", where);
  }
  r.generation.mean_fidelity = get_field<double>(root, "mean_fidelity", "bell report");
  r.discrimination.confusion = read_rows4(root, "confusion", "bell report");
  r.discrimination.probability = get_field<double>(root, "discrimination_probability", "bell report");
  return r;
}

}  // namespace ppgate::io
