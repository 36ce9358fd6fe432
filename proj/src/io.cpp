#include "fl/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fl {
namespace {

using nlohmann::json;

double number_from_json(const json& j, const char* what) {
  if (!j.is_number()) {
    throw std::invalid_argument(std::string("expected a number for ") + what);
  }
  return j.get<double>();
}

double extended_coord_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw std::invalid_argument("constant coordinate string must be \"+inf\", \"-inf\" or \"inf\"");
  }
  throw std::invalid_argument("constant coordinate must be a number or an infinity string");
}

std::string extended_coord_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "\"+inf\"" : "\"-inf\"";
  return format_double(v);
}

json parse_json(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw std::invalid_argument(std::string("malformed JSON in ") + what);
  }
  return j;
}

}  // namespace

std::string format_double(double value) {
  if (value == 0.0) return "0";  // normalize the sign of zero
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

Profile parse_profile(const std::string& json_text) {
  const json j = parse_json(json_text, "profile");
  if (!j.is_object() || !j.contains("points") || !j["points"].is_array()) {
    throw std::invalid_argument("profile document needs a \"points\" array");
  }
  std::vector<Point> pts;
  for (const json& entry : j["points"]) {
    if (!entry.is_array() || entry.size() != 2) {
      throw std::invalid_argument("each profile point must be a [a, b] pair");
    }
    pts.push_back({number_from_json(entry[0], "points[..][0]"),
                   number_from_json(entry[1], "points[..][1]")});
  }
  return Profile(std::move(pts));
}

Profile load_profile(const std::string& path) { return parse_profile(read_text_file(path)); }

std::string profile_to_json(const Profile& profile) {
  std::string out = "{\"points\":[";
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (i) out += ',';
    out += '[';
    out += format_double(profile[i].a);
    out += ',';
    out += format_double(profile[i].b);
    out += ']';
  }
  out += "]}";
  return out;
}

void save_profile(const Profile& profile, const std::string& path) {
  write_text_file(path, profile_to_json(profile) + "\n");
}

MechanismSpec parse_mechanism(const std::string& json_text) {
  const json j = parse_json(json_text, "mechanism");
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw std::invalid_argument("mechanism document needs a \"kind\" string");
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "gm") return MechanismSpec::geometric_median_mechanism();
  if (kind != "cwm") {
    throw std::invalid_argument("mechanism \"kind\" must be \"cwm\" or \"gm\"");
  }
  double theta = 0.0;
  if (j.contains("theta")) theta = number_from_json(j["theta"], "theta");
  MedianRule tie = MedianRule::kLower;
  if (j.contains("tie")) {
    const std::string t = j["tie"].is_string() ? j["tie"].get<std::string>() : "";
    if (t == "lower") {
      tie = MedianRule::kLower;
    } else if (t == "upper") {
      tie = MedianRule::kUpper;
    } else {
      throw std::invalid_argument("mechanism \"tie\" must be \"lower\" or \"upper\"");
    }
  }
  std::vector<ExtendedPoint> constants;
  if (j.contains("constants")) {
    if (!j["constants"].is_array()) {
      throw std::invalid_argument("mechanism \"constants\" must be an array");
    }
    for (const json& entry : j["constants"]) {
      if (!entry.is_array() || entry.size() != 2) {
        throw std::invalid_argument("each constant must be a [a, b] pair");
      }
      constants.push_back({extended_coord_from_json(entry[0]),
                           extended_coord_from_json(entry[1])});
    }
  }
  return MechanismSpec::cwm_scheme(theta, std::move(constants), tie);
}

MechanismSpec load_mechanism(const std::string& path) {
  return parse_mechanism(read_text_file(path));
}

std::string mechanism_to_json(const MechanismSpec& spec) {
  if (spec.kind() == MechanismKind::kGeometricMedian) return "{\"kind\":\"gm\"}";
  std::string out = "{\"kind\":\"cwm\",\"theta\":";
  out += format_double(spec.theta());
  out += ",\"constants\":[";
  for (std::size_t i = 0; i < spec.constants().size(); ++i) {
    if (i) out += ',';
    out += '[';
    out += extended_coord_to_json(spec.constants()[i].a);
    out += ',';
    out += extended_coord_to_json(spec.constants()[i].b);
    out += ']';
  }
  out += "],\"tie\":\"";
  out += spec.tie_rule() == MedianRule::kLower ? "lower" : "upper";
  out += "\"}";
  return out;
}

std::string optimal_result_to_json(const OptimalResult& result) {
  std::string out = "{\"location\":[";
  out += format_double(result.location.a);
  out += ',';
  out += format_double(result.location.b);
  out += "],\"cost\":";
  out += format_double(result.cost);
  out += ",\"certificate\":";
  out += format_double(result.certificate);
  out += ",\"iterations\":";
  out += std::to_string(result.iterations);
  out += ",\"converged\":";
  out += result.converged ? "true" : "false";
  out += '}';
  return out;
}

std::string ar_report_to_json(const ARReport& report) {
  std::string out = "{\"ratio\":";
  out += format_double(report.ratio);
  out += ",\"mech_cost\":";
  out += format_double(report.mech_cost);
  out += ",\"opt_cost\":";
  out += format_double(report.opt_cost);
  out += ",\"mech_point\":[";
  out += format_double(report.mech_point.a);
  out += ',';
  out += format_double(report.mech_point.b);
  out += "],\"opt_point\":[";
  out += format_double(report.opt_point.a);
  out += ',';
  out += format_double(report.opt_point.b);
  out += "]}";
  return out;
}

std::string scan_summary_to_json(const ScanResult& result) {
  std::string out = "{\"best_ratio\":";
  out += format_double(result.best_ratio);
  out += ",\"best_profile\":";
  out += profile_to_json(result.best_profile);
  out += ",\"seed\":";
  out += std::to_string(result.seed);
  out += '}';
  return out;
}

std::string scan_samples_to_csv(const ScanResult& result) {
  std::string out = "sample,ratio\n";
  for (std::size_t i = 0; i < result.sample_ratios.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_double(result.sample_ratios[i]);
    out += '\n';
  }
  return out;
}

std::string family_scan_to_csv(const FamilyScanResult& result) {
  std::string out = "t,alpha,ar\n";
  for (const FamilyScanRow& row : result.rows) {
    out += format_double(row.t);
    out += ',';
    out += format_double(row.alpha);
    out += ',';
    out += format_double(row.ar);
    out += '\n';
  }
  return out;
}

std::string deviation_report_to_json(const DeviationReport& report) {
  std::string out = "{\"agent\":";
  out += std::to_string(report.agent);
  out += ",\"true_point\":[";
  out += format_double(report.true_point.a);
  out += ',';
  out += format_double(report.true_point.b);
  out += "],\"deviation\":[";
  out += format_double(report.deviation.a);
  out += ',';
  out += format_double(report.deviation.b);
  out += "],\"gain\":";
  out += format_double(report.gain);
  out += '}';
  return out;
}

std::string pnorm_bounds_to_json(NormOrder order, const PnormBounds& bounds) {
  std::string out = "{\"p\":\"";
  out += norm_order_to_string(order);
  out += "\",\"lower\":";
  out += format_double(bounds.lower);
  out += ",\"upper\":";
  out += format_double(bounds.upper);
  if (bounds.exact) {
    out += ",\"exact\":";
    out += format_double(*bounds.exact);
  }
  out += '}';
  return out;
}

std::string dominance_result_to_json(const DominanceResult& result) {
  static const char* kVariants[] = {"identity", "reflect_a", "reflect_b"};
  std::string out = "{\"n\":";
  out += std::to_string(result.n);
  out += ",\"theorem_value\":";
  out += format_double(result.theorem_value);
  out += ",\"max_ar\":";
  out += format_double(result.max_ar);
  out += ",\"shift\":[";
  out += format_double(result.shift.a);
  out += ',';
  out += format_double(result.shift.b);
  out += "],\"variant\":\"";
  out += kVariants[result.variant];
  out += "\"}";
  return out;
}

std::string reduction_trace_to_json(const ReductionTrace& trace) {
  std::string out = "{\"steps\":[";
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    if (i) out += ',';
    out += "{\"name\":\"";
    out += step_name_label(trace.steps[i].name);
    out += "\",\"ar_before\":";
    out += format_double(trace.steps[i].ar_before);
    out += ",\"ar_after\":";
    out += format_double(trace.steps[i].ar_after);
    out += '}';
  }
  out += "],\"final\":";
  out += profile_to_json(trace.final);
  out += ",\"status\":\"";
  out += trace.status == TraceStatus::kReduced ? "reduced" : "unreduced";
  out += '\"';
  if (trace.status == TraceStatus::kReduced) {
    out += ",\"final_t\":";
    out += format_double(trace.final_t);
  }
  out += '}';
  return out;
}

NormOrder parse_norm_order(const std::string& text) {
  if (text == "inf" || text == "+inf" || text == "infinity") {
    return NormOrder::infinity();
  }
  double p = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, p);
  if (res.ec != std::errc() || res.ptr != end) {
    throw std::invalid_argument("norm order must be a decimal number or \"inf\"");
  }
  return NormOrder::finite(p);
}

std::string norm_order_to_string(NormOrder order) {
  if (order.is_infinite()) return "inf";
  return format_double(order.value());
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace fl
