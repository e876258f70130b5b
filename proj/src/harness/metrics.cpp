#include "geoptr/harness/metrics.hpp"

#include <algorithm>
#include <set>

#include "geoptr/error.hpp"

namespace geoptr::harness {

namespace {

void require_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw Error(ErrorCode::SampleMismatch, std::string(what) + " count mismatch");
}

double percent(double num, double den) { return den > 0.0 ? 100.0 * num / den : 0.0; }

std::vector<TriangleIdx> canonical_triangles(const std::vector<TriangleIdx>& tris) {
  std::vector<TriangleIdx> out;
  out.reserve(tris.size());
  for (const TriangleIdx& t : tris) out.push_back(t.canonical());
  std::sort(out.begin(), out.end());
  return out;
}

bool in_range(const TriangleIdx& t, std::size_t m) { return t.a < m && t.b < m && t.c < m; }

}  // namespace

DtMetrics metrics_dt(std::span<const ParsedOutput> predictions,
                     std::span<const TokenSequence> truth, std::span<const PointSet> points,
                     std::span<const char> fallback) {
  require_same(predictions.size(), truth.size(), "prediction/truth");
  require_same(predictions.size(), points.size(), "prediction/point set");
  if (!fallback.empty()) require_same(predictions.size(), fallback.size(), "prediction/fallback");

  DtMetrics r;
  r.samples = predictions.size();
  double tc_sum = 0.0;
  std::size_t exact = 0, count_match = 0, delaunay = 0;
  std::size_t nf_total = 0, nf_delaunay = 0;

  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const PointSet& ps = points[i];
    const std::size_t m = ps.size();
    const ParsedOutput truth_parsed = parse_output(Task::DT, truth[i], m);
    const std::vector<TriangleIdx> want = canonical_triangles(truth_parsed.triangles);
    const std::vector<TriangleIdx> got = canonical_triangles(predictions[i].triangles);
    const std::set<TriangleIdx> got_set(got.begin(), got.end());
    const bool fell_back = !fallback.empty() && fallback[i];

    std::size_t matched = 0;
    for (const TriangleIdx& t : std::set<TriangleIdx>(want.begin(), want.end())) {
      matched += got_set.count(t);
    }
    r.truth_triangles += want.size();
    r.predicted_triangles += got.size();
    r.matched_triangles += matched;
    r.duplicate_triangles += got.size() - got_set.size();
    r.excluded_tokens += predictions[i].excluded_tokens;
    tc_sum += want.empty() ? 0.0 : static_cast<double>(matched) / static_cast<double>(want.size());
    if (got == want) ++exact;
    if (got.size() == want.size()) ++count_match;

    for (const TriangleIdx& t : got) {
      const bool ok = in_range(t, m) && has_empty_circumcircle(ps, t);
      delaunay += ok ? 1 : 0;
      if (!fell_back) {
        ++nf_total;
        nf_delaunay += ok ? 1 : 0;
      }
    }
    if (fell_back) ++r.fallback_samples;
  }

  const auto S = static_cast<double>(r.samples);
  r.tc = percent(tc_sum, S);
  r.acc = percent(static_cast<double>(exact), S);
  r.tca = percent(static_cast<double>(count_match), S);
  r.dtr = percent(static_cast<double>(delaunay), static_cast<double>(r.predicted_triangles));
  r.dtr_non_fallback = percent(static_cast<double>(nf_delaunay), static_cast<double>(nf_total));
  return r;
}

bool same_polygon(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  const std::size_t n = a.size();
  for (std::size_t shift = 0; shift < n; ++shift) {
    if (b[shift] != a[0]) continue;
    bool forward = true, backward = true;
    for (std::size_t k = 0; k < n; ++k) {
      forward = forward && a[k] == b[(shift + k) % n];
      backward = backward && a[k] == b[(shift + n - k) % n];
    }
    if (forward || backward) return true;
  }
  return false;
}

HullMetrics metrics_hull(std::span<const ParsedOutput> predictions,
                         std::span<const TokenSequence> truth, std::span<const PointSet> points) {
  require_same(predictions.size(), truth.size(), "prediction/truth");
  require_same(predictions.size(), points.size(), "prediction/point set");
  HullMetrics r;
  r.samples = predictions.size();
  std::size_t exact = 0;
  double ac_sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const PointSet& ps = points[i];
    const std::vector<std::size_t> want = truth[i].body();
    const std::vector<std::size_t>& got = predictions[i].indices;
    if (same_polygon(got, want)) ++exact;

    std::set<std::size_t> distinct(got.begin(), got.end());
    if (predictions[i].out_of_range || distinct.size() < 3) {
      ++r.degenerate;
      continue;
    }
    if (is_self_intersecting(ps, got)) ++r.self_intersecting;
    ac_sum += polygon_area(ps, got) / polygon_area(ps, want);
  }
  const auto S = static_cast<double>(r.samples);
  r.acc = percent(static_cast<double>(exact), S);
  r.ac = percent(ac_sum, S);
  return r;
}

TspMetrics metrics_tsp(std::span<const ParsedOutput> predictions, std::span<const PointSet> points,
                       std::span<const double> reference_lengths,
                       std::span<const char> reference_optimal) {
  require_same(predictions.size(), points.size(), "prediction/point set");
  require_same(predictions.size(), reference_lengths.size(), "prediction/reference");
  if (!reference_optimal.empty()) {
    require_same(predictions.size(), reference_optimal.size(), "prediction/optimality flag");
  }
  TspMetrics r;
  r.samples = predictions.size();
  double length_sum = 0.0, reference_sum = 0.0, gap_sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    reference_sum += reference_lengths[i];
    if (!predictions[i].valid) continue;
    const double len = tour_length(points[i], predictions[i].tour());
    ++r.valid;
    length_sum += len;
    if (reference_optimal.empty() || reference_optimal[i]) {
      ++r.gap_samples;
      gap_sum += len / reference_lengths[i] - 1.0;
    }
  }
  const auto S = static_cast<double>(r.samples);
  r.vtr = percent(static_cast<double>(r.valid), S);
  r.atl = r.valid > 0 ? length_sum / static_cast<double>(r.valid) : 0.0;
  r.reference_atl = r.samples > 0 ? reference_sum / S : 0.0;
  r.optimality_gap = percent(gap_sum, static_cast<double>(r.gap_samples));
  return r;
}

}  // namespace geoptr::harness
