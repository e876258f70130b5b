#include "geoptr/model/decode.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <vector>

#include "geoptr/error.hpp"
#include "geoptr/model/masking.hpp"
#include "geoptr/model/network.hpp"
#include "geoptr/nn/ops.hpp"

namespace geoptr::model {

using nn::Tensor;

namespace {

std::size_t body_limit(std::size_t m, std::size_t max_len) {
  if (max_len == 0) max_len = default_max_len(m);
  if (max_len < 2) throw Error(ErrorCode::ConfigInvalid, "max_len must leave room for sentinels");
  return max_len - 2;
}

struct StepDistribution {
  Tensor log_probs;  // 1 x (m + 1)
  std::vector<char> allowed;
  bool fallback = false;
};

StepDistribution step_distribution(Tensor scores, const DecodeState& state,
                                   const PointSet& points, const ModelConfig& config) {
  const std::size_t m = points.size();
  StepDistribution d;
  d.allowed.assign(m + 1, 1);
  if (config.mask_enabled) {
    const SlotMask mask = compute_mask(state, points);
    if (mask.all_blocked()) {
      // Point slots are released; the end slot keeps its penalty so that
      // sequence framing still holds.
      d.fallback = true;
      if (mask.end_blocked) {
        scores(0, static_cast<Eigen::Index>(m)) += nn::kMasked;
        d.allowed[m] = 0;
      }
    } else {
      apply_mask(mask, std::span<double>(scores.data(), m + 1));
      for (std::size_t j = 0; j < m; ++j) d.allowed[j] = mask.blocked[j] ? 0 : 1;
      d.allowed[m] = mask.end_blocked ? 0 : 1;
    }
  }
  d.log_probs = nn::log_softmax(scores);
  return d;
}

struct Hypothesis {
  std::vector<std::size_t> body;
  DecodeState state;
  double log_prob = 0.0;
  std::size_t fallback_steps = 0;
};

DecodeResult finish(const Hypothesis& h, bool truncated) {
  DecodeResult r;
  r.sequence = TokenSequence::from_body(h.body);
  r.log_prob = h.log_prob;
  r.fallback_steps = h.fallback_steps;
  r.truncated = truncated;
  return r;
}

}  // namespace

DecodeResult greedy_decode(const PointSet& points, const ModelParams& params,
                           const ModelConfig& config, std::size_t max_len) {
  const std::size_t m = points.size();
  const std::size_t limit = body_limit(m, max_len);
  const EncoderOutput enc = encode(points, params, config);
  nn::LstmState lstm = enc.final_state;
  Hypothesis h{{}, DecodeState(config.task, m), 0.0, 0};
  std::optional<std::size_t> previous;

  while (h.body.size() < limit) {
    lstm = nn::lstm_step(params.decoder, decoder_input(points, previous, params, config), lstm);
    const StepDistribution d =
        step_distribution(pointer_scores(lstm.h, enc, params), h.state, points, config);
    std::size_t best = m + 1;
    for (std::size_t j = 0; j <= m; ++j) {
      if (!d.allowed[j]) continue;
      if (best > m || d.log_probs(0, static_cast<Eigen::Index>(j)) >
                          d.log_probs(0, static_cast<Eigen::Index>(best))) {
        best = j;
      }
    }
    h.log_prob += d.log_probs(0, static_cast<Eigen::Index>(best));
    if (d.fallback) ++h.fallback_steps;
    if (best == m) return finish(h, false);
    h.body.push_back(best);
    h.state.push(best);
    previous = best;
  }
  return finish(h, true);
}

DecodeResult beam_decode(const PointSet& points, const ModelParams& params,
                         const ModelConfig& config, std::size_t width, BeamVariant variant,
                         std::size_t max_len) {
  if (width < 1) throw Error(ErrorCode::ConfigInvalid, "beam width must be >= 1");
  const std::size_t m = points.size();
  const std::size_t limit = body_limit(m, max_len);
  const EncoderOutput enc = encode(points, params, config);
  const Eigen::Index H = enc.memory.cols();

  std::vector<Hypothesis> alive{{{}, DecodeState(config.task, m), 0.0, 0}};
  nn::LstmState lstm = enc.final_state;
  std::vector<DecodeResult> finished;

  struct Candidate {
    double score;
    double step;
    std::size_t parent;
    std::size_t slot;
  };

  while (!alive.empty()) {
    const auto k = static_cast<Eigen::Index>(alive.size());
    Tensor x(k, H);
    for (Eigen::Index r = 0; r < k; ++r) {
      const auto& body = alive[static_cast<std::size_t>(r)].body;
      const std::optional<std::size_t> prev =
          body.empty() ? std::nullopt : std::optional<std::size_t>(body.back());
      x.row(r) = decoder_input(points, prev, params, config).row(0);
    }
    lstm = nn::lstm_step(params.decoder, x, lstm);
    const Tensor scores = pointer_scores(lstm.h, enc, params);

    std::vector<Candidate> candidates;
    std::vector<char> fell_back(alive.size(), 0);
    for (std::size_t r = 0; r < alive.size(); ++r) {
      const auto ri = static_cast<Eigen::Index>(r);
      const StepDistribution d = step_distribution(scores.row(ri), alive[r].state, points, config);
      fell_back[r] = d.fallback ? 1 : 0;
      for (std::size_t j = 0; j <= m; ++j) {
        if (!d.allowed[j]) continue;
        const double lp = d.log_probs(0, static_cast<Eigen::Index>(j));
        candidates.push_back({alive[r].log_prob + lp, lp, r, j});
      }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.parent != b.parent) return a.parent < b.parent;
      if (a.step != b.step) return a.step > b.step;
      return a.slot < b.slot;
    });
    if (candidates.size() > width) candidates.resize(width);

    std::vector<Hypothesis> next;
    std::vector<Eigen::Index> rows;
    for (const Candidate& c : candidates) {
      Hypothesis h = alive[c.parent];
      h.log_prob = c.score;
      h.fallback_steps += fell_back[c.parent];
      if (c.slot == m) {
        finished.push_back(finish(h, false));
        continue;
      }
      h.body.push_back(c.slot);
      h.state.push(c.slot);
      if (h.body.size() >= limit) {
        finished.push_back(finish(h, true));
        continue;
      }
      next.push_back(std::move(h));
      rows.push_back(static_cast<Eigen::Index>(c.parent));
    }
    nn::LstmState kept{Tensor(static_cast<Eigen::Index>(rows.size()), H),
                       Tensor(static_cast<Eigen::Index>(rows.size()), H)};
    for (std::size_t r = 0; r < rows.size(); ++r) {
      kept.h.row(static_cast<Eigen::Index>(r)) = lstm.h.row(rows[r]);
      kept.c.row(static_cast<Eigen::Index>(r)) = lstm.c.row(rows[r]);
    }
    lstm = std::move(kept);
    alive = std::move(next);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < finished.size(); ++i) {
    if (finished[i].log_prob > finished[best].log_prob) best = i;
  }
  if (variant == BeamVariant::ShortestTour) {
    double shortest = std::numeric_limits<double>::infinity();
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < finished.size(); ++i) {
      const ParsedOutput parsed = parse_output(Task::TSP, finished[i].sequence, m);
      if (!parsed.valid) continue;
      const double len = tour_length(points, parsed.tour());
      if (len < shortest || (len == shortest && finished[i].log_prob > finished[*pick].log_prob)) {
        shortest = len;
        pick = i;
      }
    }
    if (pick) best = *pick;
  }
  return finished[best];
}

}  // namespace geoptr::model
