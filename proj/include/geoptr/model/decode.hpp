#pragma once

#include <cstddef>

#include "geoptr/geometry.hpp"
#include "geoptr/model/config.hpp"
#include "geoptr/model/params.hpp"
#include "geoptr/sequencing.hpp"

namespace geoptr::model {

// Longest sequence, sentinels included: a triangulation of m points has fewer
// than 2m triangles.
inline std::size_t default_max_len(std::size_t m) { return 6 * m + 2; }

struct DecodeResult {
  TokenSequence sequence;
  double log_prob = 0.0;           // summed log-probabilities of every decision
  std::size_t fallback_steps = 0;  // steps with every point blocked; point masks lifted
  bool truncated = false;          // stopped at max_len without choosing End

  bool fallback() const { return fallback_steps > 0; }
};

// max_len 0 selects default_max_len. A decode stops at End or once the body
// holds max_len - 2 indices; a truncated sequence still carries both sentinels.
DecodeResult greedy_decode(const PointSet& points, const ModelParams& params,
                           const ModelConfig& config, std::size_t max_len = 0);

enum class BeamVariant { Joint, ShortestTour };

// Keeps the `width` best expansions per step by summed log-probability;
// finished hypotheses leave the beam. Joint returns the most probable finished
// sequence, ShortestTour the shortest valid TSP tour among the finished ones
// (Joint when none is valid). Ties go to the earlier parent, then the lower slot.
DecodeResult beam_decode(const PointSet& points, const ModelParams& params,
                         const ModelConfig& config, std::size_t width,
                         BeamVariant variant = BeamVariant::Joint, std::size_t max_len = 0);

}  // namespace geoptr::model
