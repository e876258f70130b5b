#include "geoptr/harness/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <thread>

#include "geoptr/error.hpp"
#include "geoptr/harness/svg.hpp"
#include "geoptr/model/trainer.hpp"

namespace geoptr::harness {

namespace fs = std::filesystem;
using model::BeamVariant;
using model::DecodeResult;

std::string DecoderSpec::name() const {
  if (!beam) return "greedy";
  return "beam" + std::to_string(width) +
         (variant == BeamVariant::Joint ? "-joint" : "-shortest");
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

DecodeResult decode_one(const PointSet& points, const model::ModelParams& params,
                        const model::ModelConfig& config, const DecoderSpec& decoder) {
  if (!decoder.beam) return model::greedy_decode(points, params, config);
  return model::beam_decode(points, params, config, decoder.width, decoder.variant);
}

}  // namespace

MetricsReport score(const Dataset& test, std::span<const DecodeResult> decodes,
                    std::vector<ParsedOutput>* parsed_out) {
  const std::size_t n = test.instances.size();
  if (decodes.size() != n) throw Error(ErrorCode::SampleMismatch, "decode count mismatch");
  const Task task = test.header.task;
  std::vector<ParsedOutput> parsed;
  std::vector<TokenSequence> truth;
  std::vector<PointSet> points;
  std::vector<char> fallback;
  parsed.reserve(n);
  std::size_t fallbacks = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Instance& inst = test.instances[i];
    parsed.push_back(parse_output(task, decodes[i].sequence, inst.points.size()));
    truth.push_back(inst.label);
    points.push_back(inst.points);
    fallback.push_back(decodes[i].fallback() ? 1 : 0);
    fallbacks += decodes[i].fallback() ? 1 : 0;
  }

  MetricsReport report;
  report.task = task;
  report.samples = n;
  report.fallback_decode_rate = n ? 100.0 * static_cast<double>(fallbacks) / static_cast<double>(n) : 0.0;
  switch (task) {
    case Task::DT:
      report.dt = metrics_dt(parsed, truth, points, fallback);
      break;
    case Task::Hull:
      report.hull = metrics_hull(parsed, truth, points);
      break;
    case Task::TSP: {
      std::vector<double> reference;
      std::vector<char> optimal;
      for (const Instance& inst : test.instances) {
        reference.push_back(label_tour_length(inst));
        optimal.push_back(inst.meta.optimal ? 1 : 0);
      }
      report.tsp = metrics_tsp(parsed, points, reference, optimal);
      break;
    }
  }
  if (parsed_out) *parsed_out = std::move(parsed);
  return report;
}

Evaluation evaluate(const Dataset& test, const model::ModelParams& params,
                    const model::ModelConfig& config, const DecoderSpec& decoder,
                    unsigned workers) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = test.instances.size();
  Evaluation ev;
  ev.decodes.resize(n);
  const unsigned threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      ev.decodes[i] = decode_one(test.instances[i].points, params, config, decoder);
    }
  } else {
    std::vector<std::exception_ptr> errors(threads);
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t i = w; i < n; i += threads) {
              ev.decodes[i] = decode_one(test.instances[i].points, params, config, decoder);
            }
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  ev.report = score(test, ev.decodes, &ev.parsed);
  ev.report.decoder = decoder.name();
  ev.report.decode_seconds = seconds_since(t0);
  return ev;
}

namespace {

nlohmann::ordered_json decoder_to_json(const DecoderSpec& d) {
  nlohmann::ordered_json j;
  j["kind"] = d.beam ? "beam" : "greedy";
  if (d.beam) {
    j["width"] = d.width;
    j["variant"] = d.variant == BeamVariant::Joint ? "joint" : "shortest";
  }
  return j;
}

DecoderSpec decoder_from_json(const nlohmann::json& j) {
  DecoderSpec d;
  const std::string kind = j.value("kind", std::string("greedy"));
  if (kind != "greedy" && kind != "beam") throw Error(ErrorCode::ConfigInvalid, "unknown decoder " + kind);
  d.beam = kind == "beam";
  d.width = j.value("width", d.width);
  const std::string variant = j.value("variant", std::string("joint"));
  if (variant != "joint" && variant != "shortest") {
    throw Error(ErrorCode::ConfigInvalid, "unknown beam variant " + variant);
  }
  d.variant = variant == "joint" ? BeamVariant::Joint : BeamVariant::ShortestTour;
  if (d.width < 1) throw Error(ErrorCode::ConfigInvalid, "beam width must be >= 1");
  return d;
}

const char* ablation_name(Ablation a) {
  switch (a) {
    case Ablation::None: return "none";
    case Ablation::Ordering: return "ordering";
    case Ablation::SelfAttention: return "self_attention";
    case Ablation::Decoder: return "decoder";
  }
  return "none";
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    c.name = j.value("name", c.name);
    const auto task = parse_task(j.at("task").get<std::string>());
    if (!task) throw Error(ErrorCode::ConfigInvalid, "unknown task");
    c.task = *task;
    c.m = j.value("m", c.m);
    const std::string ordering = j.value("ordering", std::string("sorted"));
    if (ordering != "sorted" && ordering != "random") {
      throw Error(ErrorCode::ConfigInvalid, "ordering must be sorted or random");
    }
    c.ordering = ordering == "sorted" ? Ordering::Sorted : Ordering::Random;
    if (j.contains("train")) {
      c.train.count = j["train"].value("count", c.train.count);
      c.train.seed = j["train"].value("seed", c.train.seed);
    }
    if (j.contains("test")) {
      c.test.count = j["test"].value("count", c.test.count);
      c.test.seed = j["test"].value("seed", c.test.seed);
    }
    nlohmann::json model = j.value("model", nlohmann::json::object());
    model["task"] = std::string(to_string(c.task));
    c.model = model::ModelConfig::from_json(model);
    c.epochs = j.value("epochs", c.epochs);
    c.lr_decay = j.value("lr_decay", c.lr_decay);
    if (j.contains("decoders")) {
      c.decoders.clear();
      for (const auto& d : j["decoders"]) c.decoders.push_back(decoder_from_json(d));
    }
    const std::string ablation = j.value("ablation", std::string("none"));
    if (ablation == "none") c.ablation = Ablation::None;
    else if (ablation == "ordering") c.ablation = Ablation::Ordering;
    else if (ablation == "self_attention") c.ablation = Ablation::SelfAttention;
    else if (ablation == "decoder") c.ablation = Ablation::Decoder;
    else throw Error(ErrorCode::ConfigInvalid, "unknown ablation " + ablation);
    c.out_dir = j.value("out_dir", c.out_dir.string());
    c.cache_dir = j.value("cache_dir", std::string());
    if (j.contains("checkpoint")) c.checkpoint = j["checkpoint"].get<std::string>();
    c.svg_count = j.value("svg", c.svg_count);
    c.workers = j.value("workers", c.workers);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
  if (c.decoders.empty()) throw Error(ErrorCode::ConfigInvalid, "no decoders given");
  if (c.m < 3 || c.train.count < 1 || c.test.count < 1) {
    throw Error(ErrorCode::ConfigInvalid, "need m >= 3 and non-empty train/test sets");
  }
  if (c.ablation == Ablation::Decoder && c.decoders.size() < 2) {
    c.decoders = {DecoderSpec{}, DecoderSpec{true, 4, BeamVariant::Joint}};
    if (c.task == Task::TSP) c.decoders.push_back({true, 4, BeamVariant::ShortestTour});
  }
  return c;
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["task"] = std::string(to_string(task));
  j["m"] = m;
  j["ordering"] = std::string(to_string(ordering));
  j["train"] = {{"count", train.count}, {"seed", train.seed}};
  j["test"] = {{"count", test.count}, {"seed", test.seed}};
  j["model"] = model.to_json();
  j["epochs"] = epochs;
  j["lr_decay"] = lr_decay;
  j["decoders"] = nlohmann::json::array();
  for (const DecoderSpec& d : decoders) j["decoders"].push_back(decoder_to_json(d));
  j["ablation"] = ablation_name(ablation);
  j["out_dir"] = out_dir.string();
  j["cache_dir"] = cache_dir.string();
  if (checkpoint) j["checkpoint"] = checkpoint->string();
  j["svg"] = svg_count;
  j["workers"] = workers;
  return j;
}

std::string training_key(const ExperimentConfig& config, const model::ModelConfig& model,
                         Ordering ordering) {
  nlohmann::ordered_json j;
  j["task"] = std::string(to_string(config.task));
  j["m"] = config.m;
  j["ordering"] = std::string(to_string(ordering));
  j["train"] = {{"count", config.train.count}, {"seed", config.train.seed}};
  j["model"] = model.to_json();
  j["epochs"] = config.epochs;
  j["lr_decay"] = config.lr_decay;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

namespace {

struct RunPlan {
  std::string label;
  model::ModelConfig model;
  Ordering ordering;
};

std::vector<RunPlan> plan_runs(const ExperimentConfig& c) {
  switch (c.ablation) {
    case Ablation::Ordering:
      return {{"sorted", c.model, Ordering::Sorted}, {"random", c.model, Ordering::Random}};
    case Ablation::SelfAttention: {
      model::ModelConfig off = c.model;
      off.self_attention = false;
      model::ModelConfig on = c.model;
      on.self_attention = true;
      return {{"self-attention", on, c.ordering}, {"ptr-net", off, c.ordering}};
    }
    case Ablation::None:
    case Ablation::Decoder:
      break;
  }
  return {{"model", c.model, c.ordering}};
}

Dataset make_data(const ExperimentConfig& c, const DataSpec& spec, Ordering ordering) {
  GenerateOptions g;
  g.task = c.task;
  g.m = c.m;
  g.count = spec.count;
  g.seed = spec.seed;
  g.ordering = ordering;
  g.workers = c.workers;
  return generate(g);
}

void write_loss_curve(const fs::path& path, const std::vector<double>& losses) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::Io, "cannot write " + path.string());
  os << "epoch,mean_loss\n";
  for (std::size_t e = 0; e < losses.size(); ++e) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu,%.10g\n", e + 1, losses[e]);
    os << buf;
  }
}

std::vector<double> read_loss_curve(const fs::path& path) {
  std::vector<double> out;
  std::ifstream is(path);
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    const auto comma = line.find(',');
    if (comma != std::string::npos) out.push_back(std::stod(line.substr(comma + 1)));
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream* log) {
  config.model.validate();
  const fs::path dir = config.out_dir / config.name;
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "config.json");
    os << config.to_json().dump(2) << '\n';
  }
  if (!config.cache_dir.empty()) fs::create_directories(config.cache_dir);

  ExperimentResult result;
  for (const RunPlan& plan : plan_runs(config)) {
    RunResult run;
    run.label = plan.label;
    run.model = plan.model;
    run.ordering = plan.ordering;

    const Dataset test = make_data(config, config.test, plan.ordering);
    model::ModelParams params;
    double train_seconds = 0.0;

    if (config.checkpoint) {
      model::LoadedModel loaded = model::load_model(*config.checkpoint);
      if (loaded.config.task != config.task) {
        throw Error(ErrorCode::CheckpointMismatch, "checkpoint task differs from the experiment");
      }
      run.model = loaded.config;
      params = std::move(loaded.params);
      run.checkpoint = *config.checkpoint;
      run.from_cache = true;
    } else {
      const std::string key = training_key(config, plan.model, plan.ordering);
      const fs::path cache_root = config.cache_dir.empty() ? dir : config.cache_dir;
      run.checkpoint = cache_root / (config.name + "-" + plan.label + "-" + key + ".ckpt");
      const fs::path loss_path = cache_root / (config.name + "-" + plan.label + "-" + key + "-loss.csv");
      if (!config.cache_dir.empty() && fs::exists(run.checkpoint) && fs::exists(loss_path)) {
        params = model::load_model(run.checkpoint).params;
        run.epoch_loss = read_loss_curve(loss_path);
        run.from_cache = true;
        if (log) *log << "[" << config.name << "/" << plan.label << "] reusing " << run.checkpoint.string() << '\n';
      } else {
        const Dataset train = make_data(config, config.train, plan.ordering);
        params = model::ModelParams::init(plan.model, plan.model.seed);
        nn::AdamState adam = model::make_optimizer(plan.model);
        model::TrainOptions opts;
        opts.epochs = config.epochs;
        opts.shuffle_seed = plan.model.seed;
        opts.lr_decay = config.lr_decay;
        opts.on_epoch = [&](const model::EpochStats& s) {
          if (log) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "[%s/%s] epoch %zu/%zu loss %.5f (%.1fs)\n",
                          config.name.c_str(), plan.label.c_str(), s.epoch, config.epochs,
                          s.mean_loss, s.seconds);
            *log << buf << std::flush;
          }
        };
        const model::TrainHistory history = model::train(train, params, adam, plan.model, opts);
        for (const auto& e : history.epochs) {
          run.epoch_loss.push_back(e.mean_loss);
          train_seconds += e.seconds;
        }
        model::save_model(run.checkpoint, plan.model, params, &adam);
        write_loss_curve(loss_path, run.epoch_loss);
      }
    }
    write_loss_curve(dir / (plan.label + "-loss.csv"), run.epoch_loss);

    for (const DecoderSpec& decoder : config.decoders) {
      Evaluation ev = evaluate(test, params, run.model, decoder, config.workers);
      ev.report.label = plan.label;
      ev.report.train_seconds = train_seconds;
      const std::string stem = plan.label + "-" + decoder.name();
      write_report(ev.report, dir / (stem + ".json"), dir / (stem + ".csv"));
      if (config.svg_count > 0) {
        fs::create_directories(dir / "svg");
        for (std::size_t i = 0; i < std::min(config.svg_count, test.instances.size()); ++i) {
          const Instance& inst = test.instances[i];
          write_svg(dir / "svg" / (stem + "-" + std::to_string(i) + ".svg"),
                    render_svg(config.task, inst.points, inst.label, ev.parsed[i]));
        }
      }
      if (log) *log << format_table({ev.report});
      run.reports.push_back(ev.report);
      result.table.push_back(std::move(ev.report));
    }
    result.runs.push_back(std::move(run));
  }

  std::ofstream os(dir / "comparison.csv");
  write_comparison_csv(os, result.table);
  return result;
}

ExperimentResult run_experiment(const fs::path& config_file, std::ostream* log) {
  std::ifstream is(config_file);
  if (!is) throw Error(ErrorCode::Io, "cannot read " + config_file.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
  return run_experiment(ExperimentConfig::from_json(j), log);
}

}  // namespace geoptr::harness
