#include "geoptr/model/masking.hpp"

#include <algorithm>

#include "geoptr/error.hpp"
#include "geoptr/nn/ops.hpp"

namespace geoptr::model {

void DecodeState::push(std::size_t index) {
  emitted_.push_back(index);
  if (index < m_ && !visited_[index]) {
    visited_[index] = 1;
    ++visited_count_;
  }
}

bool SlotMask::all_blocked() const {
  return end_blocked && std::all_of(blocked.begin(), blocked.end(), [](char b) { return b != 0; });
}

SlotMask compute_mask(const DecodeState& state, const PointSet& points) {
  const std::size_t m = state.m();
  SlotMask mask;
  mask.blocked.assign(m, 0);
  const auto& emitted = state.emitted();

  switch (state.task()) {
    case Task::DT: {
      mask.end_blocked = state.phase() != 1;
      if (state.phase() == 0) {
        const std::size_t a = emitted[emitted.size() - 2];
        const std::size_t b = emitted[emitted.size() - 1];
        for (std::size_t j = 0; j < m; ++j) {
          if (j == a || j == b || a == b || a >= m || b >= m) {
            mask.blocked[j] = 1;
            continue;
          }
          mask.blocked[j] = has_empty_circumcircle(points, {a, b, j}) ? 0 : 1;
        }
      }
      break;
    }
    case Task::Hull: {
      for (std::size_t j = 0; j < m; ++j) mask.blocked[j] = state.visited(j) ? 1 : 0;
      const std::size_t n = emitted.size();
      if (n >= 3) {
        const Orientation reference =
            orient2d(points[emitted[0]], points[emitted[1]], points[emitted[2]]);
        const Point& p2 = points[emitted[n - 2]];
        const Point& p1 = points[emitted[n - 1]];
        for (std::size_t j = 0; j < m; ++j) {
          if (!mask.blocked[j] && orient2d(p2, p1, points[j]) != reference) mask.blocked[j] = 1;
        }
      }
      mask.end_blocked = n < 3;
      break;
    }
    case Task::TSP: {
      for (std::size_t j = 0; j < m; ++j) mask.blocked[j] = state.visited(j) ? 1 : 0;
      mask.end_blocked = state.visited_count() < m;
      break;
    }
  }
  return mask;
}

void apply_mask(const SlotMask& mask, std::span<double> scores) {
  const std::size_t m = mask.blocked.size();
  for (std::size_t j = 0; j < m; ++j) {
    if (mask.blocked[j]) scores[j] = nn::kMasked;
  }
  if (mask.end_blocked) scores[m] += nn::kMasked;
}

std::vector<double> mask_scores(const DecodeState& state, const PointSet& points,
                                std::span<const double> scores) {
  if (scores.size() != state.m() + 1) {
    throw Error(ErrorCode::ShapeMismatch, "expected m + 1 scores");
  }
  const SlotMask mask = compute_mask(state, points);
  if (mask.all_blocked()) throw Error(ErrorCode::AllMasked, "no feasible slot");
  std::vector<double> out(scores.begin(), scores.end());
  apply_mask(mask, out);
  return out;
}

}  // namespace geoptr::model
