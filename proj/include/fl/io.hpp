#pragma once

#include <string>

#include "fl/analysis.hpp"
#include "fl/geometry.hpp"
#include "fl/mechanisms.hpp"
#include "fl/optimal.hpp"
#include "fl/reductions.hpp"

namespace fl {

/// Shortest-width decimal rendering with up to 17 significant digits;
/// locale-independent and round-trip exact.
std::string format_double(double value);

Profile parse_profile(const std::string& json_text);
Profile load_profile(const std::string& path);
std::string profile_to_json(const Profile& profile);
void save_profile(const Profile& profile, const std::string& path);

MechanismSpec parse_mechanism(const std::string& json_text);
MechanismSpec load_mechanism(const std::string& path);
std::string mechanism_to_json(const MechanismSpec& spec);

std::string optimal_result_to_json(const OptimalResult& result);
std::string ar_report_to_json(const ARReport& report);
std::string scan_summary_to_json(const ScanResult& result);
std::string scan_samples_to_csv(const ScanResult& result);
std::string family_scan_to_csv(const FamilyScanResult& result);
std::string deviation_report_to_json(const DeviationReport& report);
std::string pnorm_bounds_to_json(NormOrder order, const PnormBounds& bounds);
std::string dominance_result_to_json(const DominanceResult& result);
std::string reduction_trace_to_json(const ReductionTrace& trace);

/// Parse "inf" (or a decimal p >= 1) as a norm order.
NormOrder parse_norm_order(const std::string& text);
std::string norm_order_to_string(NormOrder order);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace fl
