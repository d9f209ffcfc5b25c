#pragma once

// JSON and plain-text renderings of library results for the command-line tool.

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "iwo/flows.hpp"
#include "iwo/orbits.hpp"
#include "iwo/verifier.hpp"

namespace iwo::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0.0";

inline Json to_json(const Signature& sig) { return {{"p", sig.p()}, {"q", sig.q()}}; }

inline Json to_json(const QVector& v) {
  Json out = Json::array();
  for (std::size_t i = 0; i < v.dim(); ++i) out.push_back(v[i].str());
  return out;
}

inline Json to_json(const RVector& v) {
  Json out = Json::array();
  for (std::size_t i = 0; i < v.dim(); ++i) out.push_back(v[i]);
  return out;
}

inline Json to_json(const QMatrix& m) {
  Json out = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c).str());
    out.push_back(std::move(row));
  }
  return out;
}

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

inline Json to_json(const StratumDescriptor& s) {
  return {{"case", to_string(s.stratum_case)}, {"k", optional_json(s.k_index)}, {"l", optional_json(s.l_index)},
          {"inW", s.in_all_pi},           {"inAllP", s.in_all_p},           {"signLabel", s.sign_label}};
}

inline Json to_json(const QuadricLevel& h) { return {{"family", to_string(h.family)}, {"radiusSquared", h.radius_squared.str()}}; }

inline Json to_json(const OrbitDescriptor& d) {
  Json out{{"group", to_string(d.group)},
           {"quadric", to_json(d.quadric)},
           {"case", to_string(d.stratum_case)},
           {"k", optional_json(d.k_index)},
           {"l", optional_json(d.l_index)},
           {"dim", d.dim},
           {"orientation", d.orientation},
           {"timeSign", optional_json(d.time_sign)},
           {"form", to_string(d.form)},
           {"spherePoint", d.sphere_point ? to_json(*d.sphere_point) : Json(nullptr)},
           {"level", d.level ? Json(d.level->str()) : Json(nullptr)},
           {"kprimeOrbitDim", optional_json(d.kprime_orbit_dim)},
           {"sufficient", d.sufficient}};
  return out;
}

inline Json to_json(const OrbitReport& r) {
  Json tangent = Json::array();
  for (const auto& v : r.tangent_basis) tangent.push_back(to_json(v));
  return {{"group", to_string(r.group)},
          {"point", to_json(r.point)},
          {"stratum", to_json(r.stratum)},
          {"predictedDim", optional_json(r.predicted_dim)},
          {"oracleDim", r.oracle_dim},
          {"agrees", r.agrees},
          {"tangentBasis", std::move(tangent)},
          {"descriptor", r.descriptor ? to_json(*r.descriptor) : Json(nullptr)}};
}

inline Json to_json(const Metric& m) {
  return std::visit([](const auto& v) { return Json(v); }, m);
}

inline Json to_json(const SuiteResult& r) {
  Json failures = Json::array();
  for (const auto& f : r.failures) failures.push_back({{"object", f.object}, {"expected", f.expected}, {"actual", f.actual}});
  Json metrics = Json::object();
  for (const auto& [name, value] : r.metrics) metrics[name] = to_json(value);
  return {{"suite", to_string(r.suite)},      {"status", to_string(r.status)}, {"claim", r.claim},
          {"checksRun", r.checks_run},        {"failures", std::move(failures)}, {"metrics", std::move(metrics)}};
}

inline Json to_json(const SampledPoint& s) {
  return {{"point", to_json(s.point)}, {"stratum", to_string(s.stratum)}, {"deterministic", s.deterministic}, {"note", s.note}};
}

inline Json envelope(const std::string& command, const std::optional<Signature>& sig, Json payload, double timing_ms) {
  return {{"schemaVersion", kSchemaVersion},
          {"command", command},
          {"signature", sig ? to_json(*sig) : Json(nullptr)},
          {"payload", std::move(payload)},
          {"timingMs", timing_ms}};
}

/// Shortest decimal form that reads back to the same double; always '.'.
inline std::string fmt_csv(double v) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline std::string flow_csv(const std::vector<FlowSample>& samples, std::size_t dim) {
  std::string out = "t";
  for (std::size_t i = 1; i <= dim; ++i) out += ",x" + std::to_string(i);
  out += ",residual\n";
  for (const auto& s : samples) {
    out += fmt_csv(s.t);
    for (std::size_t i = 0; i < dim; ++i) out += "," + fmt_csv(s.point[i]);
    out += "," + fmt_csv(s.norm_residual) + "\n";
  }
  return out;
}

// Human-readable forms for --pretty.

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

inline std::string pretty_value(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (const auto& e : v) out += (out.empty() ? "" : ",") + pretty_value(e);
    return "(" + out + ")";
  }
  return v.dump();
}

/// Flat key/value listing; nested objects are shown with dotted keys.
inline void pretty_object(std::ostringstream& os, const Json& obj, const std::string& prefix = "") {
  for (const auto& [key, value] : obj.items()) {
    if (value.is_object()) {
      pretty_object(os, value, prefix + key + ".");
    } else {
      os << "  " << pad(prefix + key, 34) << pretty_value(value) << "\n";
    }
  }
}

}  // namespace iwo::cli
