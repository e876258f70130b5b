#pragma once

// Train/evaluate orchestration: a JSON experiment file describes the data,
// the model and the decoders; ablations expand it into several runs.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geoptr/dataset.hpp"
#include "geoptr/harness/report.hpp"
#include "geoptr/model/config.hpp"
#include "geoptr/model/decode.hpp"
#include "geoptr/model/params.hpp"

namespace geoptr::harness {

struct DecoderSpec {
  bool beam = false;
  std::size_t width = 4;
  model::BeamVariant variant = model::BeamVariant::Joint;

  // "greedy", "beam4-joint", "beam4-shortest"
  std::string name() const;
};

struct Evaluation {
  MetricsReport report;
  std::vector<model::DecodeResult> decodes;
  std::vector<ParsedOutput> parsed;
};

// Decodes every test instance (instance-parallel over `workers` threads) and
// scores the outputs against the labels.
Evaluation evaluate(const Dataset& test, const model::ModelParams& params,
                    const model::ModelConfig& config, const DecoderSpec& decoder,
                    unsigned workers = 1);

MetricsReport score(const Dataset& test, std::span<const model::DecodeResult> decodes,
                    std::vector<ParsedOutput>* parsed = nullptr);

enum class Ablation { None, Ordering, SelfAttention, Decoder };

struct DataSpec {
  std::size_t count = 1000;
  std::uint64_t seed = 1;
};

struct ExperimentConfig {
  std::string name = "experiment";
  Task task = Task::DT;
  std::size_t m = 5;
  Ordering ordering = Ordering::Sorted;
  DataSpec train{100000, 1};
  DataSpec test{10000, 2};
  model::ModelConfig model;
  std::size_t epochs = 10;
  double lr_decay = 1.0;
  std::vector<DecoderSpec> decoders{DecoderSpec{}};
  Ablation ablation = Ablation::None;
  std::filesystem::path out_dir = "runs";
  // Trained checkpoints are reused from here when the training setup matches.
  std::filesystem::path cache_dir;
  std::optional<std::filesystem::path> checkpoint;  // evaluate this model instead of training
  std::size_t svg_count = 0;
  unsigned workers = 1;

  // Throws ConfigInvalid.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
};

struct RunResult {
  std::string label;
  model::ModelConfig model;
  Ordering ordering = Ordering::Sorted;
  std::vector<double> epoch_loss;
  bool from_cache = false;
  std::filesystem::path checkpoint;
  std::vector<MetricsReport> reports;  // one per decoder
};

struct ExperimentResult {
  std::vector<RunResult> runs;
  std::vector<MetricsReport> table;  // every report of every run
};

// Writes <out_dir>/<name>/{<run>-<decoder>.json,.csv, <run>-loss.csv,
// comparison.csv, svg/...}. Progress goes to log when given.
ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);
ExperimentResult run_experiment(const std::filesystem::path& config_file,
                                std::ostream* log = nullptr);

// Identifies a training setup (data, model, schedule); used for cache names.
std::string training_key(const ExperimentConfig& config, const model::ModelConfig& model,
                         Ordering ordering);

}  // namespace geoptr::harness
