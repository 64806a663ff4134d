#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "physarum/engine.hpp"
#include "physarum/morphometrics.hpp"
#include "physarum/render.hpp"

namespace physarum {

struct RunReport {
  std::string experiment;
  std::uint64_t seed = 0;
  int ticks = 0;
  bool complete = false;
  bool thresholds_met = false;
  double wall_seconds = 0.0;  // kept out of report.json so reports stay byte-identical
  ComparisonReport comparison;
  std::optional<MorphologyReport> morphology;
  std::map<std::string, double> metrics;  // experiment-specific numbers
  std::map<std::string, bool> flags;      // experiment-specific checks
  std::vector<std::string> artifacts;     // file names relative to the output directory
};

/// Canonical float text: 9 significant digits, always with a decimal point
/// or exponent so 1.0 stays "1.0". Non-finite values have no JSON form.
inline std::string canonical_float(double v) {
  if (!std::isfinite(v)) return "null";
  if (v == 0.0) return "0.0";  // also folds -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  std::string s = buf;
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

/// Compact JSON with object keys in byte order and canonical floats.
inline void canonical_dump(const nlohmann::json& j, std::string& out) {
  using nlohmann::json;
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [k, v] : j.items()) {  // std::map ordering
        if (!first) out += ',';
        first = false;
        out += json(k).dump();
        out += ':';
        canonical_dump(v, out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        canonical_dump(j[i], out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float: out += canonical_float(j.get<double>()); break;
    default: out += j.dump(); break;
  }
}

inline std::string canonical_json(const nlohmann::json& j) {
  std::string out;
  canonical_dump(j, out);
  out += '\n';
  return out;
}

namespace detail {

inline nlohmann::json opt(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace detail

inline nlohmann::json report_json(const RunReport& r) {
  using nlohmann::json;
  json j;
  j["experiment"] = r.experiment;
  j["seed"] = r.seed;
  j["ticks"] = r.ticks;
  j["complete"] = r.complete;
  j["thresholds_met"] = r.thresholds_met;
  const ComparisonReport& c = r.comparison;
  j["comparison"] = {{"bisector_coverage", detail::opt(c.bisector_coverage)},
                     {"edge_precision", detail::opt(c.edge_precision)},
                     {"edge_recall", detail::opt(c.edge_recall)},
                     {"tree_length_ratio", detail::opt(c.tree_length_ratio)},
                     {"path_ratio", detail::opt(c.path_ratio)},
                     {"self_avoidance_index", detail::opt(c.self_avoidance_index)}};
  if (r.morphology) {
    j["morphology"] = {{"mean_degree", r.morphology->mean_degree},
                       {"order_score", r.morphology->order_score},
                       {"quadrant", to_string(r.morphology->quadrant)}};
  } else {
    j["morphology"] = nullptr;
  }
  json metrics = json::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = v;
  j["metrics"] = metrics;
  json flags = json::object();
  for (const auto& [k, v] : r.flags) flags[k] = v;
  j["flags"] = flags;
  j["artifacts"] = r.artifacts;
  return j;
}

inline std::string emit_report(const RunReport& r) { return canonical_json(report_json(r)); }

inline void emit_report(const RunReport& r, const std::string& path) { write_text(emit_report(r), path); }

/// One canonical JSON line per tick.
inline std::string trace_ndjson(const std::vector<TickSummary>& trace) {
  std::string out;
  for (const auto& t : trace) {
    const nlohmann::json j = {{"tick", t.tick}, {"zones", t.zones}, {"occupied", t.occupied}, {"colonized", t.colonized}};
    out += canonical_json(j);
  }
  return out;
}

}  // namespace physarum
