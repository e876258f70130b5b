#include "geoptr/sequencing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "geoptr/error.hpp"

namespace geoptr {

TokenSequence TokenSequence::from_body(const std::vector<std::size_t>& body) {
  TokenSequence s;
  s.tokens_.clear();
  s.tokens_.reserve(body.size() + 2);
  s.tokens_.push_back(Token::begin());
  for (std::size_t i : body) s.tokens_.push_back(Token::at(i));
  s.tokens_.push_back(Token::end());
  return s;
}

TokenSequence TokenSequence::from_tokens(std::vector<Token> tokens) {
  if (tokens.size() < 2 || tokens.front().kind != TokenKind::Begin ||
      tokens.back().kind != TokenKind::End) {
    throw Error(ErrorCode::MalformedSequence, "sequence must start with Begin and end with End");
  }
  for (std::size_t i = 1; i + 1 < tokens.size(); ++i) {
    if (tokens[i].kind != TokenKind::Index) {
      throw Error(ErrorCode::MalformedSequence, "sentinel inside sequence body");
    }
  }
  TokenSequence s;
  s.tokens_ = std::move(tokens);
  return s;
}

std::vector<std::size_t> TokenSequence::body() const {
  std::vector<std::size_t> out;
  out.reserve(body_size());
  for (std::size_t i = 1; i + 1 < tokens_.size(); ++i) out.push_back(tokens_[i].index);
  return out;
}

std::string TokenSequence::to_display() const {
  std::string s = "(=>";
  for (const Token& t : tokens_) {
    if (t.kind == TokenKind::Index) s += " " + std::to_string(t.index + 1);
  }
  s += " <=)";
  return s;
}

CanonicalInstanceLayout sort_input(const PointSet& ps) {
  std::vector<std::size_t> order(ps.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return lex_less(ps[i], ps[j]); });
  CanonicalInstanceLayout layout;
  layout.sorted_points.reserve(ps.size());
  layout.permutation.resize(ps.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    layout.sorted_points.push_back(ps[order[pos]]);
    layout.permutation[order[pos]] = pos;
  }
  return layout;
}

std::vector<std::size_t> remap_indices(const std::vector<std::size_t>& indices,
                                       const std::vector<std::size_t>& permutation) {
  std::vector<std::size_t> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(permutation.at(i));
  return out;
}

std::vector<std::size_t> invert_permutation(const std::vector<std::size_t>& permutation) {
  std::vector<std::size_t> inv(permutation.size());
  for (std::size_t i = 0; i < permutation.size(); ++i) inv.at(permutation[i]) = i;
  return inv;
}

TokenSequence canonicalize_dt(const std::vector<TriangleIdx>& tris, const PointSet& ps) {
  struct Keyed {
    Point key;
    TriangleIdx tri;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(tris.size());
  for (const TriangleIdx& t : tris) {
    const TriangleIdx c = t.canonical();
    keyed.push_back({incenter(ps.at(c.a), ps.at(c.b), ps.at(c.c)), c});
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& l, const Keyed& r) {
    return std::tie(l.key.x, l.key.y, l.tri) < std::tie(r.key.x, r.key.y, r.tri);
  });
  std::vector<std::size_t> body;
  body.reserve(3 * keyed.size());
  for (const Keyed& k : keyed) {
    body.push_back(k.tri.a);
    body.push_back(k.tri.b);
    body.push_back(k.tri.c);
  }
  return TokenSequence::from_body(body);
}

namespace {

// Rotate to the lexicographically smallest vertex, CCW.
std::vector<std::size_t> normalize_cycle(std::vector<std::size_t> cycle, const PointSet& ps,
                                         double area) {
  if (cycle.empty()) return cycle;
  if (area < 0.0) std::reverse(cycle.begin(), cycle.end());
  const auto start = std::min_element(cycle.begin(), cycle.end(), [&](std::size_t i, std::size_t j) {
    return lex_less(ps.at(i), ps.at(j)) || (ps.at(i) == ps.at(j) && i < j);
  });
  std::rotate(cycle.begin(), start, cycle.end());
  return cycle;
}

}  // namespace

TokenSequence canonicalize_hull(const std::vector<std::size_t>& hull, const PointSet& ps) {
  return TokenSequence::from_body(normalize_cycle(hull, ps, signed_area(ps, hull)));
}

TokenSequence canonicalize_tour(const Tour& tour, const PointSet& ps) {
  validate_tour(tour, ps.size());
  const double area = signed_area(ps, tour);
  if (std::abs(area) <= kGeoEpsilon) {
    throw Error(ErrorCode::ZeroSignedArea, "tour orientation is undefined");
  }
  return TokenSequence::from_body(normalize_cycle(tour, ps, area));
}

ParsedOutput parse_output(Task task, const TokenSequence& seq, std::size_t m) {
  // Re-validate the frame: sequences can be assembled token by token.
  TokenSequence::from_tokens(seq.tokens());

  ParsedOutput out;
  out.task = task;
  out.indices = seq.body();
  for (std::size_t i : out.indices) {
    if (i >= m) out.out_of_range = true;
  }

  switch (task) {
    case Task::DT: {
      const std::size_t whole = out.indices.size() / 3;
      out.excluded_tokens = out.indices.size() - 3 * whole;
      for (std::size_t t = 0; t < whole; ++t) {
        out.triangles.push_back(
            {out.indices[3 * t], out.indices[3 * t + 1], out.indices[3 * t + 2]});
      }
      break;
    }
    case Task::Hull:
    case Task::TSP: {
      std::vector<char> seen(m, 0);
      for (std::size_t i : out.indices) {
        if (i >= m) continue;
        if (seen[i]) out.has_duplicates = true;
        seen[i] = 1;
      }
      if (task == Task::TSP) {
        out.missing = std::find(seen.begin(), seen.end(), 0) != seen.end();
        out.valid = !out.out_of_range && !out.has_duplicates && !out.missing &&
                    out.indices.size() == m;
      } else {
        out.valid = !out.out_of_range && !out.has_duplicates && out.indices.size() >= 3;
      }
      break;
    }
  }
  return out;
}

}  // namespace geoptr
