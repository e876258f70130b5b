#pragma once

// Canonical ordering of inputs and labels, and the token alphabet the decoder
// emits. Indices are 0-based everywhere; the 1-based form only shows up when
// a sequence is printed for people.

#include <cstddef>
#include <string>
#include <vector>

#include "geoptr/geometry.hpp"
#include "geoptr/task.hpp"

namespace geoptr {

enum class TokenKind { Begin, End, Index };

struct Token {
  TokenKind kind = TokenKind::Index;
  std::size_t index = 0;  // meaningful for Index only

  static Token begin() { return {TokenKind::Begin, 0}; }
  static Token end() { return {TokenKind::End, 0}; }
  static Token at(std::size_t i) { return {TokenKind::Index, i}; }

  friend bool operator==(const Token&, const Token&) = default;
};

// Begin, index tokens, End.
class TokenSequence {
 public:
  TokenSequence() : tokens_{Token::begin(), Token::end()} {}

  static TokenSequence from_body(const std::vector<std::size_t>& body);
  // Throws MalformedSequence unless framed by exactly one Begin and one End.
  static TokenSequence from_tokens(std::vector<Token> tokens);

  const std::vector<Token>& tokens() const { return tokens_; }
  std::vector<std::size_t> body() const;
  std::size_t body_size() const { return tokens_.size() - 2; }

  // "(=> 1 2 3 <=)" with 1-based indices.
  std::string to_display() const;

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;

 private:
  std::vector<Token> tokens_;
};

struct CanonicalInstanceLayout {
  PointSet sorted_points;
  // permutation[original index] = index in sorted_points.
  std::vector<std::size_t> permutation;
};

CanonicalInstanceLayout sort_input(const PointSet& ps);

// Maps label indices through an original->sorted permutation.
std::vector<std::size_t> remap_indices(const std::vector<std::size_t>& indices,
                                       const std::vector<std::size_t>& permutation);
std::vector<std::size_t> invert_permutation(const std::vector<std::size_t>& permutation);

TokenSequence canonicalize_dt(const std::vector<TriangleIdx>& tris, const PointSet& ps);
TokenSequence canonicalize_hull(const std::vector<std::size_t>& hull, const PointSet& ps);
TokenSequence canonicalize_tour(const Tour& tour, const PointSet& ps);

// Decoded output turned back into a task solution. Validity problems are
// reported through flags; only a missing frame is an error.
struct ParsedOutput {
  Task task = Task::DT;
  std::vector<std::size_t> indices;     // body as emitted
  std::vector<TriangleIdx> triangles;   // DT: consecutive triples as emitted
  std::size_t excluded_tokens = 0;      // DT: trailing 1-2 tokens dropped
  bool out_of_range = false;            // some index >= m
  bool has_duplicates = false;          // Hull/TSP: repeated index
  bool missing = false;                 // TSP: some city never visited
  bool valid = false;                   // TSP: a permutation of 0..m-1

  Tour tour() const { return indices; }
};

ParsedOutput parse_output(Task task, const TokenSequence& seq, std::size_t m);

}  // namespace geoptr
