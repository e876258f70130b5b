#pragma once

// Labeled instance generation and the line-delimited dataset file format.
//
// File layout (UTF-8, '\n' terminated lines):
//   line 1   {"format":"geoptr-dataset","format_version":1,"task":"dt","m":5,
//             "count":N,"seed":S,"ordering":"sorted","hk_max":13,"rng":"mt19937_64/splitmix64"}
//   line 2.. {"seed":...,"optimal":true,"points":[[x,y],...],"label":[i,...]}
// Coordinates are written with 17 significant digits; labels are 0-based point
// indices with the Begin/End sentinels left implicit.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "geoptr/geometry.hpp"
#include "geoptr/sequencing.hpp"
#include "geoptr/task.hpp"

namespace geoptr {

enum class Ordering { Sorted, Random };

std::string_view to_string(Ordering o);

inline constexpr int kDatasetFormatVersion = 1;

struct InstanceMeta {
  std::uint64_t seed = 0;  // substream seed the instance was drawn from
  bool optimal = true;     // false when the label came from a heuristic
};

struct Instance {
  Task task = Task::DT;
  PointSet points;
  TokenSequence label;
  InstanceMeta meta;
};

struct DatasetHeader {
  Task task = Task::DT;
  std::size_t m = 0;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  Ordering ordering = Ordering::Sorted;
  int format_version = kDatasetFormatVersion;
  std::size_t hk_max = kDefaultHeldKarpMax;
};

struct Dataset {
  DatasetHeader header;
  std::vector<Instance> instances;
};

struct GenerateOptions {
  Task task = Task::DT;
  std::size_t m = 5;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  Ordering ordering = Ordering::Sorted;
  std::size_t hk_max = kDefaultHeldKarpMax;
  unsigned workers = 1;
};

// Builds instance `index` of the run described by opts. Deterministic in
// (task, m, seed, ordering, index).
Instance generate_instance(const GenerateOptions& opts, std::uint64_t index);

Dataset generate(const GenerateOptions& opts);

// Seeded shuffle, then the first floor(count * fraction) instances train.
std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction, std::uint64_t seed);

// Checks a single instance against the header: sizes, index ranges, label
// structure, canonical form (sorted ordering), and label feasibility.
// Throws InvariantViolation.
void validate_instance(const DatasetHeader& header, const Instance& inst);

void write_dataset(std::ostream& os, const Dataset& data);
Dataset read_dataset(std::istream& is);
void save(const Dataset& data, const std::filesystem::path& path);
Dataset load(const std::filesystem::path& path);

// Reference tour length of a TSP label.
double label_tour_length(const Instance& inst);

}  // namespace geoptr
