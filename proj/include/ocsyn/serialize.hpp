#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ocsyn/competitors.hpp"
#include "ocsyn/dp.hpp"
#include "ocsyn/params.hpp"
#include "ocsyn/pmp.hpp"
#include "ocsyn/process.hpp"
#include "ocsyn/synthesis.hpp"
#include "ocsyn/version.hpp"

namespace ocsyn {

// All documents are emitted through this writer: keys stay in insertion
// order and every floating-point number is printed with 17 significant
// digits, so identical inputs produce byte-identical documents.
inline std::string format_number(double x) {
  if (!std::isfinite(x)) return "null";
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.16e", x);
  return buffer;
}

class JsonWriter {
 public:
  JsonWriter& begin_object() { return open('{'); }
  JsonWriter& end_object() { return close('}'); }
  JsonWriter& begin_array() { return open('['); }
  JsonWriter& end_array() { return close(']'); }

  JsonWriter& key(std::string_view name) {
    separate();
    text_ += '"';
    escape(name);
    text_ += "\":";
    pending_value_ = true;
    return *this;
  }

  JsonWriter& value(double x) { return raw(format_number(x)); }
  JsonWriter& value(int x) { return raw(std::to_string(x)); }
  JsonWriter& value(std::int64_t x) { return raw(std::to_string(x)); }
  JsonWriter& value(bool b) { return raw(b ? "true" : "false"); }
  JsonWriter& null() { return raw("null"); }
  JsonWriter& value(std::string_view s) {
    separate();
    text_ += '"';
    escape(s);
    text_ += '"';
    return *this;
  }

  const std::string& str() const { return text_; }

 private:
  JsonWriter& raw(std::string_view token) {
    separate();
    text_ += token;
    return *this;
  }

  JsonWriter& open(char bracket) {
    separate();
    text_ += bracket;
    need_comma_ = false;
    return *this;
  }

  JsonWriter& close(char bracket) {
    text_ += bracket;
    need_comma_ = true;
    return *this;
  }

  void separate() {
    if (pending_value_) {
      pending_value_ = false;
      need_comma_ = true;
      return;
    }
    if (need_comma_) text_ += ',';
    need_comma_ = true;
  }

  void escape(std::string_view s) {
    for (char c : s) {
      switch (c) {
        case '"': text_ += "\\\""; break;
        case '\\': text_ += "\\\\"; break;
        case '\n': text_ += "\\n"; break;
        case '\t': text_ += "\\t"; break;
        default: text_ += c;
      }
    }
  }

  std::string text_;
  bool need_comma_ = false;
  bool pending_value_ = false;
};

namespace detail {

inline void write_number_array(JsonWriter& w, const std::vector<double>& xs) {
  w.begin_array();
  for (double x : xs) w.value(x);
  w.end_array();
}

inline void write_params(JsonWriter& w, const Params& params) {
  w.begin_object();
  w.key("kind").value(std::string_view(to_string(params.kind)));
  w.key("lambda").value(params.lambda);
  w.key("a").value(params.a);
  w.key("t0").value(params.t0);
  w.key("T").value(params.T);
  w.key("x0").value(params.x0);
  w.end_object();
}

inline void write_process_fields(JsonWriter& w, const Process& process) {
  w.key("params");
  write_params(w, process.params);
  w.key("control").begin_object();
  w.key("breakpoints");
  write_number_array(w, process.control.breakpoints);
  w.key("values");
  write_number_array(w, process.control.values);
  w.end_object();
  w.key("trajectory").begin_object();
  w.key("breakpoints");
  write_number_array(w, process.trajectory.breakpoints);
  w.key("values");
  write_number_array(w, process.trajectory.values);
  w.end_object();
}

inline void write_process_body(JsonWriter& w, const Process& process) {
  w.begin_object();
  write_process_fields(w, process);
  w.end_object();
}

inline void write_certificate_body(JsonWriter& w, const Certificate& cert) {
  w.begin_object();
  w.key("gamma").value(cert.gamma);
  w.key("p2").value(cert.adjoint.p2);
  w.key("p1_segments").begin_array();
  for (const auto& seg : cert.adjoint.p1_segments) {
    w.begin_object();
    w.key("t_start").value(seg.t_start);
    w.key("t_end").value(seg.t_end);
    w.key("A").value(seg.coeff_exp);
    w.key("B").value(seg.coeff_const);
    w.end_object();
  }
  w.end_array();
  w.key("measure").begin_object();
  w.key("atoms").begin_array();
  for (const auto& atom : cert.measure.atoms) {
    w.begin_object();
    w.key("t").value(atom.time);
    w.key("w").value(atom.weight);
    w.end_object();
  }
  w.end_array();
  w.key("density").begin_array();
  for (const auto& piece : cert.measure.density_pieces) {
    w.begin_object();
    w.key("t_start").value(piece.t_start);
    w.key("t_end").value(piece.t_end);
    w.key("rate").value(piece.rate);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  w.key("nu").begin_array();
  for (const auto& atom : cert.measure.atoms) {
    w.begin_object();
    w.key("t").value(atom.time);
    w.key("v2").begin_array().value(atom.selection[0]).value(atom.selection[1]).end_array();
    w.end_object();
  }
  for (const auto& piece : cert.measure.density_pieces) {
    w.begin_object();
    w.key("t").value(piece.t_start);
    w.key("v2").begin_array().value(piece.selection[0]).value(piece.selection[1]).end_array();
    w.end_object();
  }
  w.end_array();
  w.end_object();
}

inline void write_optional(JsonWriter& w, const std::optional<double>& x) {
  if (x) {
    w.value(*x);
  } else {
    w.null();
  }
}

}  // namespace detail

// Canonical standalone Process document: params/control/trajectory at the
// top level next to the version.
inline std::string to_json(const Process& process) {
  JsonWriter w;
  w.begin_object();
  w.key("version").value(std::string_view(kVersion));
  detail::write_process_fields(w, process);
  w.end_object();
  return w.str();
}

inline std::string to_json(const SynthesisResult& result) {
  JsonWriter w;
  w.begin_object();
  w.key("version").value(std::string_view(kVersion));
  w.key("case").value(std::string_view(to_string(result.label)));
  w.key("rho").value(result.landmarks.rho);
  w.key("tbar").value(result.landmarks.tbar);
  w.key("alpha1");
  detail::write_optional(w, result.landmarks.alpha1);
  w.key("xbar0");
  detail::write_optional(w, result.landmarks.xbar0);
  w.key("cost").value(result.cost);
  w.key("peak").value(result.peak);
  w.key("switch_times");
  detail::write_number_array(w, result.switch_times);
  w.key("process");
  detail::write_process_body(w, result.process);
  w.end_object();
  return w.str();
}

inline void write_certify_report(JsonWriter& w, const CertifyReport& report) {
  w.begin_object();
  w.key("res_support").value(report.res_support);
  w.key("res_selection").value(report.res_selection);
  w.key("res_adjoint").value(report.res_adjoint);
  w.key("res_transversality").value(report.res_transversality);
  w.key("res_maximum").value(report.res_maximum);
  w.key("max_residual").value(report.max_residual());
  w.key("nontrivial").value(report.nontrivial);
  w.key("pass").value(report.pass);
  w.end_object();
}

inline std::string to_json(CaseLabel label, double process_cost,
                           const CertificateBuild& build,
                           const CertifyReport& report) {
  JsonWriter w;
  w.begin_object();
  w.key("version").value(std::string_view(kVersion));
  w.key("case").value(std::string_view(to_string(label)));
  w.key("cost").value(process_cost);
  w.key("certificate");
  detail::write_certificate_body(w, build.certificate);
  w.key("build").begin_object();
  w.key("residual").value(build.residual);
  w.key("within_tolerance").value(build.within_tolerance);
  w.end_object();
  w.key("report");
  write_certify_report(w, report);
  w.end_object();
  return w.str();
}

inline std::string to_json(const ExistenceReport& report) {
  JsonWriter w;
  w.begin_object();
  w.key("version").value(std::string_view(kVersion));
  w.key("params_ok").value(report.params_ok);
  w.key("growth_ok").value(report.growth_ok);
  w.key("convexity_ok").value(report.convexity_ok);
  w.key("max_growth_ratio").value(report.max_growth_ratio);
  w.key("pass").value(report.pass);
  w.end_object();
  return w.str();
}

inline std::string to_json(const DpResult& result, double analytic_cost) {
  JsonWriter w;
  w.begin_object();
  w.key("version").value(std::string_view(kVersion));
  w.key("config").begin_object();
  w.key("nt").value(result.config.nt);
  w.key("nx").value(result.config.nx);
  w.key("x_min").value(result.config.x_min);
  w.key("x_max").value(result.config.x_max);
  w.key("control_set");
  detail::write_number_array(w, result.config.control_set);
  w.end_object();
  w.key("cost_dp").value(result.cost);
  w.key("cost_extracted").value(result.extracted_cost);
  w.key("cost_analytic").value(analytic_cost);
  w.key("gap").value(result.cost - analytic_cost);
  w.key("process");
  detail::write_process_body(w, result.process);
  w.end_object();
  return w.str();
}

inline std::string to_json(const CompetitorResult& result) {
  JsonWriter w;
  w.begin_object();
  w.key("version").value(std::string_view(kVersion));
  w.key("entries").begin_array();
  for (const auto& entry : result.entries) {
    w.begin_object();
    w.key("family").value(std::string_view(entry.family));
    w.key("s").value(entry.parameter);
    w.key("cost").value(entry.cost);
    w.end_object();
  }
  w.end_array();
  w.key("best").begin_object();
  w.key("family").value(std::string_view(result.best.family));
  w.key("s").value(result.best.parameter);
  w.key("cost").value(result.best.cost);
  w.end_object();
  w.key("cost_analytic").value(result.analytic_cost);
  w.key("gap_to_analytic").value(result.gap_to_analytic);
  w.key("ud_at_alpha1");
  detail::write_optional(w, result.ud_at_alpha1);
  w.key("ubd_min");
  detail::write_optional(w, result.ubd_min);
  w.key("ubd_argmin");
  detail::write_optional(w, result.ubd_argmin);
  w.key("boundary_gap");
  detail::write_optional(w, result.boundary_gap);
  w.end_object();
  return w.str();
}

// Value grid as CSV rows (t, x, value); header included.
inline void write_value_grid_csv(std::ostream& out, const Params& params,
                                 const DpResult& result) {
  if (result.value.empty()) {
    throw std::invalid_argument("dp result has no retained value grid");
  }
  const int nt = result.config.nt;
  const int nx = result.config.nx;
  const double dt = params.horizon() / nt;
  const double dx = (result.config.x_max - result.config.x_min) / (nx - 1);
  out << "# version=" << kVersion << '\n';
  out << "t,x,value\n";
  for (int i = 0; i <= nt; ++i) {
    const double t = i == nt ? params.T : params.t0 + i * dt;
    for (int j = 0; j < nx; ++j) {
      out << format_number(t) << ',' << format_number(result.config.x_min + j * dx)
          << ',' << format_number(result.value[static_cast<std::size_t>(i) * nx + j])
          << '\n';
    }
  }
}

// ---- parsing (document -> value types) ----------------------------------

inline Params params_from_json(const nlohmann::json& doc) {
  Params params;
  params.kind = problem_kind_from_string(doc.at("kind").get<std::string>());
  params.lambda = doc.at("lambda").get<double>();
  params.a = doc.at("a").get<double>();
  params.t0 = doc.at("t0").get<double>();
  params.T = doc.at("T").get<double>();
  params.x0 = doc.at("x0").get<double>();
  return params;
}

// Accepts either a bare process document or any document embedding one under
// a "process" key (synth and dp outputs both qualify). The arc must be the
// integral of its control: a document whose trajectory disagrees with its
// own dynamics is rejected, while box or cap violations stay reportable
// through check_feasibility.
inline Process process_from_json(const nlohmann::json& doc) {
  const nlohmann::json& body = doc.contains("process") ? doc.at("process") : doc;
  Process process;
  process.params = params_from_json(body.at("params"));
  process.control.breakpoints =
      body.at("control").at("breakpoints").get<std::vector<double>>();
  process.control.values = body.at("control").at("values").get<std::vector<double>>();
  process.trajectory.breakpoints =
      body.at("trajectory").at("breakpoints").get<std::vector<double>>();
  process.trajectory.values =
      body.at("trajectory").at("values").get<std::vector<double>>();
  detail::ensure_process_shape(process);

  double defect = std::abs(process.trajectory.values.front() - process.params.x0);
  for (std::size_t k = 0; k < process.control.values.size(); ++k) {
    const double dt =
        process.control.breakpoints[k + 1] - process.control.breakpoints[k];
    const double slope =
        (process.trajectory.values[k + 1] - process.trajectory.values[k]) / dt;
    defect = std::max(defect,
                      std::abs(slope + process.params.a * process.control.values[k]));
  }
  if (defect > 1e-6) {
    throw std::invalid_argument(
        "process document trajectory does not integrate its control");
  }
  return process;
}

}  // namespace ocsyn
