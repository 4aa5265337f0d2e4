#include "defire/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace defire::io {

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

json to_json(const StepProfile& profile) {
  return json{{"lengths", profile.lengths}, {"levels", profile.levels}};
}

StepProfile profile_from_json(const json& j) {
  StepProfile p;
  p.lengths = j.at("lengths").get<std::vector<double>>();
  p.levels = j.at("levels").get<std::vector<double>>();
  return p;
}

json to_json(const Trace& trace) {
  json plateaus = json::array();
  for (const Plateau& p : trace.plateaus()) plateaus.push_back(json::array({p.lo, p.hi}));
  return json{{"plateaus", plateaus}};
}

Trace trace_from_json(const json& j) {
  std::vector<Plateau> plateaus;
  for (const auto& pair : j.at("plateaus")) {
    if (!pair.is_array() || pair.size() != 2) {
      throw std::invalid_argument("trace plateaus must be [lo, hi] pairs");
    }
    plateaus.push_back({pair[0].get<double>(), pair[1].get<double>()});
  }
  return Trace(std::move(plateaus));
}

json to_json(const PeriodicOrbit& orbit) {
  json j = to_json(orbit.profile);
  j["period"] = orbit.period;
  j["branch"] = to_string(orbit.branch);
  j["existence_margin"] = orbit.existence_margin;
  return j;
}

json to_json(const ScanResult& scan) {
  json rows = json::array();
  for (const ScanRow& row : scan.rows) {
    json r{{"epsilon", row.epsilon},
           {"exists", row.exists},
           {"branch", row.branch ? json(to_string(*row.branch)) : json(nullptr)},
           {"period", row.period ? json(*row.period) : json(nullptr)},
           {"bound", row.bound},
           {"strict", row.strict},
           {"ghost_candidate", row.ghost_candidate}};
    rows.push_back(std::move(r));
  }
  json j{{"rows", rows}};
  if (scan.transition_bracket) {
    j["transition_bracket"] =
        json::array({scan.transition_bracket->first, scan.transition_bracket->second});
  } else {
    j["transition_bracket"] = nullptr;
  }
  return j;
}

json to_json(const FiringProfile& firing) {
  return json{{"lengths", firing.lengths}, {"times", firing.times}};
}

json to_json(const ContractionEstimate& estimate) {
  json samples = json::array();
  for (const RadiusSample& s : estimate.samples) {
    samples.push_back(json{{"k", s.k}, {"value", s.value}});
  }
  return json{{"ratio_bound", estimate.ratio_bound},
              {"flagged", estimate.flagged},
              {"samples", samples},
              {"empirical_rho",
               estimate.empirical_rho ? json(*estimate.empirical_rho) : json(nullptr)}};
}

json events_to_json(const std::vector<FiringEvent>& events) {
  json out = json::array();
  for (const FiringEvent& e : events) {
    out.push_back(json{
        {"t", e.t}, {"fired_clusters", e.fired_clusters}, {"post_levels", e.post_levels}});
  }
  return out;
}

json to_json(const DiscontinuityDemo& demo) {
  return json{{"x1", demo.x1},
              {"base_level", demo.base_level},
              {"n", demo.n},
              {"unperturbed_time", demo.unperturbed_time},
              {"perturbed_times", demo.perturbed_times},
              {"limit_lower_region", demo.limit_lower_region},
              {"limit_jump_region", demo.limit_jump_region}};
}

std::string cycles_csv(const SimulationResult& result) {
  std::ostringstream os;
  os << "cycle_index,return_time,n_clusters,merges,l1_delta\n";
  for (std::size_t c = 0; c < result.cycles.size(); ++c) {
    const CycleResult& cycle = result.cycles[c];
    os << cycle.cycle_index << ',' << format_double(cycle.return_time) << ','
       << cycle.post_profile.size() << ',' << cycle.merges.size() << ','
       << format_double(result.l1_deltas[c]) << '\n';
  }
  return os.str();
}

std::string scan_csv(const ScanResult& scan) {
  std::ostringstream os;
  os << "epsilon,exists,branch,period,bound,strict\n";
  for (const ScanRow& row : scan.rows) {
    os << format_double(row.epsilon) << ',' << (row.exists ? "true" : "false") << ','
       << (row.branch ? to_string(*row.branch) : "") << ','
       << (row.period ? format_double(*row.period) : "") << ',' << format_double(row.bound)
       << ',' << (row.strict ? "true" : "false") << '\n';
  }
  return os.str();
}

namespace {

void escape_string(std::ostringstream& os, const std::string& s) {
  os << '"';
  for (char c : s) {
    switch (c) {
      case '"': os << "\\\""; break;
      case '\\': os << "\\\\"; break;
      case '\n': os << "\\n"; break;
      case '\t': os << "\\t"; break;
      case '\r': os << "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          os << buf;
        } else {
          os << c;
        }
    }
  }
  os << '"';
}

// nlohmann's serializer does not expose the float format; this small walker
// pins floats to format_double so artifacts are byte-stable by construction.
void dump_value(std::ostringstream& os, const json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  const std::string closing_pad(static_cast<std::size_t>(indent) * depth, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad;
        escape_string(os, it.key());
        os << ": ";
        dump_value(os, it.value(), indent, depth + 1);
      }
      os << '\n' << closing_pad << '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      bool first = true;
      for (const auto& item : j) {
        if (!first) os << ",\n";
        first = false;
        os << pad;
        dump_value(os, item, indent, depth + 1);
      }
      os << '\n' << closing_pad << ']';
      return;
    }
    case json::value_t::string:
      escape_string(os, j.get_ref<const std::string&>());
      return;
    case json::value_t::boolean:
      os << (j.get<bool>() ? "true" : "false");
      return;
    case json::value_t::number_integer:
      os << j.get<std::int64_t>();
      return;
    case json::value_t::number_unsigned:
      os << j.get<std::uint64_t>();
      return;
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v)) {
        os << format_double(v);
      } else {
        escape_string(os, format_double(v));  // JSON has no inf/nan literals
      }
      return;
    }
    default:
      os << "null";
      return;
  }
}

}  // namespace

std::string dump(const json& j) {
  std::ostringstream os;
  dump_value(os, j, 2, 0);
  os << '\n';
  return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out << contents;
    if (!out.flush()) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace defire::io
