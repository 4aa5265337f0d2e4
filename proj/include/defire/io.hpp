#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "defire/firing.hpp"
#include "defire/periodic.hpp"
#include "defire/profile.hpp"
#include "defire/spectral.hpp"
#include "defire/trace.hpp"
#include "defire/weak_coupling.hpp"

namespace defire::io {

using json = nlohmann::ordered_json;

/// Shortest round-trip decimal form, capped at 17 significant digits.
std::string format_double(double value);

json to_json(const StepProfile& profile);
StepProfile profile_from_json(const json& j);

json to_json(const Trace& trace);
Trace trace_from_json(const json& j);

json to_json(const PeriodicOrbit& orbit);
json to_json(const ScanResult& scan);
json to_json(const FiringProfile& firing);
json to_json(const ContractionEstimate& estimate);
json events_to_json(const std::vector<FiringEvent>& events);
json to_json(const DiscontinuityDemo& demo);

/// CSV of one simulation: header plus one row per cycle
/// (cycle_index, return_time, n_clusters, merges, l1_delta).
std::string cycles_csv(const SimulationResult& result);

/// CSV of an epsilon scan: epsilon, exists, branch, period, bound, strict.
std::string scan_csv(const ScanResult& scan);

/// Serializes with numbers printed via format_double (bit-stable output).
std::string dump(const json& j);

/// Writes atomically: to path + ".tmp", then renames over path.
void write_file(const std::string& path, const std::string& contents);

}  // namespace defire::io
