#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geoptr/harness/metrics.hpp"
#include "geoptr/task.hpp"

namespace geoptr::harness {

inline constexpr int kReportSchemaVersion = 1;

struct MetricsReport {
  Task task = Task::DT;
  std::string label;    // run name, e.g. "sorted" or "beam4-shortest"
  std::string decoder;  // "greedy", "beam4-joint", ...
  std::size_t samples = 0;
  std::optional<DtMetrics> dt;
  std::optional<HullMetrics> hull;
  std::optional<TspMetrics> tsp;
  double fallback_decode_rate = 0.0;  // percent of decodes with at least one unmasked step
  double train_seconds = 0.0;
  double decode_seconds = 0.0;
};

// Flat (metric, value) pairs in a fixed order; timings excluded.
std::vector<std::pair<std::string, double>> metric_rows(const MetricsReport& r);

nlohmann::ordered_json to_json(const MetricsReport& r, bool include_timings = true);
void write_csv(std::ostream& os, const MetricsReport& r);
void write_report(const MetricsReport& r, const std::filesystem::path& json_path,
                  const std::filesystem::path& csv_path);

// One row per run, one column per metric.
void write_comparison_csv(std::ostream& os, const std::vector<MetricsReport>& runs);

// Plain-text table for terminals.
std::string format_table(const std::vector<MetricsReport>& runs);

}  // namespace geoptr::harness
