#pragma once

// Feasibility masks applied to pointer scores before the softmax.

#include <cstddef>
#include <span>
#include <vector>

#include "geoptr/geometry.hpp"
#include "geoptr/task.hpp"

namespace geoptr::model {

// Task bookkeeping along a partially decoded sequence.
class DecodeState {
 public:
  DecodeState(Task task, std::size_t m) : task_(task), m_(m), visited_(m, 0) {}

  Task task() const { return task_; }
  std::size_t m() const { return m_; }
  // 1-based index of the step about to be decoded.
  std::size_t step() const { return emitted_.size() + 1; }
  const std::vector<std::size_t>& emitted() const { return emitted_; }
  bool visited(std::size_t i) const { return visited_[i] != 0; }
  std::size_t visited_count() const { return visited_count_; }
  // DT phase of the next step: 1, 2 or 0 (= third vertex of a triangle).
  std::size_t phase() const { return step() % 3; }

  void push(std::size_t index);

 private:
  Task task_;
  std::size_t m_;
  std::vector<std::size_t> emitted_;
  std::vector<char> visited_;
  std::size_t visited_count_ = 0;
};

struct SlotMask {
  std::vector<char> blocked;  // per point slot
  bool end_blocked = false;

  bool all_blocked() const;
};

// Which of the m + 1 slots are infeasible at the state's next step.
//  DT:   end blocked unless the step starts a triangle; on a triangle's third
//        vertex, block candidates that repeat a pending vertex, make a
//        degenerate triangle, or whose circumcircle strictly contains a point.
//  Hull: block emitted points; from the 4th point on, block turns whose
//        orientation differs from the first three; end needs >= 3 points.
//  TSP:  block visited cities; end blocked until every city is visited.
SlotMask compute_mask(const DecodeState& state, const PointSet& points);

// Blocked points are set to the mask value; a blocked end slot gets the mask
// value added (the gamma of the DT scheme).
void apply_mask(const SlotMask& mask, std::span<double> scores);

// compute_mask + apply_mask; throws AllMasked when nothing stays feasible.
std::vector<double> mask_scores(const DecodeState& state, const PointSet& points,
                                std::span<const double> scores);

}  // namespace geoptr::model
