#pragma once

// Evaluation metrics. Percentages are in [0, 100].

#include <cstddef>
#include <span>
#include <vector>

#include "geoptr/geometry.hpp"
#include "geoptr/sequencing.hpp"

namespace geoptr::harness {

struct DtMetrics {
  double tc = 0.0;   // triangle coverage, per-sample |pred & truth| / |truth|, averaged
  double acc = 0.0;  // predicted triangulation identical to the truth
  double tca = 0.0;  // predicted triangle count equals the true count
  double dtr = 0.0;  // predicted triangles with an empty circumcircle
  double dtr_non_fallback = 0.0;
  std::size_t samples = 0;
  std::size_t truth_triangles = 0;
  std::size_t predicted_triangles = 0;  // whole triples, duplicates included
  std::size_t matched_triangles = 0;
  std::size_t duplicate_triangles = 0;
  std::size_t excluded_tokens = 0;
  std::size_t fallback_samples = 0;
};

struct HullMetrics {
  double acc = 0.0;  // same polygon up to rotation and orientation
  double ac = 0.0;   // mean predicted area / true area
  std::size_t samples = 0;
  std::size_t degenerate = 0;         // fewer than 3 usable indices; AC contribution 0
  std::size_t self_intersecting = 0;  // area taken as |shoelace|
};

struct TspMetrics {
  double atl = 0.0;            // mean length over valid tours
  double vtr = 0.0;            // valid tours / all tours
  double reference_atl = 0.0;  // mean reference length over all samples
  double optimality_gap = 0.0; // mean (length / reference - 1) over valid tours with optimal references, percent
  std::size_t samples = 0;
  std::size_t valid = 0;
  std::size_t gap_samples = 0;
};

// fallback marks decodes that needed unmasked steps; may be empty.
// Throws SampleMismatch when the spans differ in length.
DtMetrics metrics_dt(std::span<const ParsedOutput> predictions,
                     std::span<const TokenSequence> truth, std::span<const PointSet> points,
                     std::span<const char> fallback = {});

HullMetrics metrics_hull(std::span<const ParsedOutput> predictions,
                         std::span<const TokenSequence> truth, std::span<const PointSet> points);

// reference_optimal may be empty (all references treated as optimal).
TspMetrics metrics_tsp(std::span<const ParsedOutput> predictions, std::span<const PointSet> points,
                       std::span<const double> reference_lengths,
                       std::span<const char> reference_optimal = {});

// Same cyclic polygon, read in either direction.
bool same_polygon(std::span<const std::size_t> a, std::span<const std::size_t> b);

}  // namespace geoptr::harness
