#include "geoptr/harness/report.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "geoptr/error.hpp"

namespace geoptr::harness {

std::vector<std::pair<std::string, double>> metric_rows(const MetricsReport& r) {
  std::vector<std::pair<std::string, double>> rows;
  rows.emplace_back("samples", static_cast<double>(r.samples));
  if (r.dt) {
    rows.emplace_back("TC", r.dt->tc);
    rows.emplace_back("ACC", r.dt->acc);
    rows.emplace_back("TCA", r.dt->tca);
    rows.emplace_back("DTR", r.dt->dtr);
    rows.emplace_back("DTR_non_fallback", r.dt->dtr_non_fallback);
    rows.emplace_back("truth_triangles", static_cast<double>(r.dt->truth_triangles));
    rows.emplace_back("predicted_triangles", static_cast<double>(r.dt->predicted_triangles));
    rows.emplace_back("duplicate_triangles", static_cast<double>(r.dt->duplicate_triangles));
    rows.emplace_back("excluded_tokens", static_cast<double>(r.dt->excluded_tokens));
  }
  if (r.hull) {
    rows.emplace_back("ACC", r.hull->acc);
    rows.emplace_back("AC", r.hull->ac);
    rows.emplace_back("degenerate", static_cast<double>(r.hull->degenerate));
    rows.emplace_back("self_intersecting", static_cast<double>(r.hull->self_intersecting));
  }
  if (r.tsp) {
    rows.emplace_back("ATL", r.tsp->atl);
    rows.emplace_back("VTR", r.tsp->vtr);
    rows.emplace_back("reference_ATL", r.tsp->reference_atl);
    rows.emplace_back("optimality_gap", r.tsp->optimality_gap);
  }
  rows.emplace_back("fallback_decode_rate", r.fallback_decode_rate);
  return rows;
}

nlohmann::ordered_json to_json(const MetricsReport& r, bool include_timings) {
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["task"] = std::string(to_string(r.task));
  j["label"] = r.label;
  j["decoder"] = r.decoder;
  j["samples"] = r.samples;
  if (r.dt) {
    const DtMetrics& d = *r.dt;
    j["dt"] = {{"TC", d.tc},
               {"ACC", d.acc},
               {"TCA", d.tca},
               {"DTR", d.dtr},
               {"DTR_non_fallback", d.dtr_non_fallback},
               {"truth_triangles", d.truth_triangles},
               {"predicted_triangles", d.predicted_triangles},
               {"matched_triangles", d.matched_triangles},
               {"duplicate_triangles", d.duplicate_triangles},
               {"excluded_tokens", d.excluded_tokens},
               {"fallback_samples", d.fallback_samples}};
  }
  if (r.hull) {
    const HullMetrics& h = *r.hull;
    j["hull"] = {{"ACC", h.acc},
                 {"AC", h.ac},
                 {"degenerate", h.degenerate},
                 {"self_intersecting", h.self_intersecting}};
  }
  if (r.tsp) {
    const TspMetrics& t = *r.tsp;
    j["tsp"] = {{"ATL", t.atl},
                {"VTR", t.vtr},
                {"reference_ATL", t.reference_atl},
                {"optimality_gap", t.optimality_gap},
                {"valid", t.valid},
                {"gap_samples", t.gap_samples}};
  }
  j["fallback_decode_rate"] = r.fallback_decode_rate;
  if (include_timings) {
    j["timings"] = {{"train_seconds", r.train_seconds}, {"decode_seconds", r.decode_seconds}};
  }
  return j;
}

namespace {

std::string number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

void write_csv(std::ostream& os, const MetricsReport& r) {
  os << "metric,value\n";
  for (const auto& [name, value] : metric_rows(r)) os << name << ',' << number(value) << '\n';
}

void write_report(const MetricsReport& r, const std::filesystem::path& json_path,
                  const std::filesystem::path& csv_path) {
  std::ofstream json(json_path);
  std::ofstream csv(csv_path);
  if (!json || !csv) throw Error(ErrorCode::Io, "cannot write report files");
  json << to_json(r).dump(2) << '\n';
  write_csv(csv, r);
}

void write_comparison_csv(std::ostream& os, const std::vector<MetricsReport>& runs) {
  if (runs.empty()) return;
  os << "label,decoder";
  for (const auto& row : metric_rows(runs.front())) os << ',' << row.first;
  os << '\n';
  for (const MetricsReport& r : runs) {
    os << r.label << ',' << r.decoder;
    for (const auto& row : metric_rows(r)) os << ',' << number(row.second);
    os << '\n';
  }
}

std::string format_table(const std::vector<MetricsReport>& runs) {
  std::string out;
  if (runs.empty()) return out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-24s %-16s", "run", "decoder");
  out += buf;
  const auto header = metric_rows(runs.front());
  for (const auto& row : header) {
    if (row.first == "samples" || row.first.find('_') != std::string::npos) continue;
    std::snprintf(buf, sizeof buf, " %9s", row.first.c_str());
    out += buf;
  }
  out += '\n';
  for (const MetricsReport& r : runs) {
    std::snprintf(buf, sizeof buf, "%-24s %-16s", r.label.c_str(), r.decoder.c_str());
    out += buf;
    for (const auto& row : metric_rows(r)) {
      if (row.first == "samples" || row.first.find('_') != std::string::npos) continue;
      std::snprintf(buf, sizeof buf, " %9.4f", row.second);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace geoptr::harness
