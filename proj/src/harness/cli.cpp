#include "geoptr/harness/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "geoptr/dataset.hpp"
#include "geoptr/error.hpp"
#include "geoptr/harness/experiment.hpp"
#include "geoptr/harness/svg.hpp"
#include "geoptr/model/decode.hpp"
#include "geoptr/model/trainer.hpp"

namespace geoptr::harness {

namespace fs = std::filesystem;

namespace {

struct GenArgs {
  std::string task = "dt";
  std::size_t m = 5;
  std::size_t count = 1000;
  std::uint64_t seed = 0;
  std::string ordering = "sorted";
  std::size_t hk_max = kDefaultHeldKarpMax;
  unsigned workers = 1;
  std::string out;
};

struct TrainArgs {
  std::string data;
  std::size_t hidden = 256;
  std::string self_attention = "on";
  std::string mask = "on";
  std::string start_token = "zero";
  double lr = 0.002;
  std::size_t batch = 128;
  std::size_t epochs = 10;
  double lr_decay = 1.0;
  std::uint64_t seed = 0;
  std::string precision = "double";
  std::string out;
};

struct EvalArgs {
  std::string ckpt;
  std::string data;
  std::string decoder = "greedy";
  std::size_t beam_width = 4;
  std::string variant = "joint";
  std::string report;
  std::string svg_dir;
  std::size_t svg_count = 5;
  unsigned workers = 1;
};

struct SolveArgs {
  std::string ckpt;
  std::string points;
  std::string svg;
  std::string decoder = "greedy";
  std::size_t beam_width = 4;
  std::string variant = "joint";
};

struct ExperimentArgs {
  std::string config;
  std::string out_dir;
};

DecoderSpec decoder_spec(const std::string& kind, std::size_t width, const std::string& variant) {
  DecoderSpec d;
  d.beam = kind == "beam";
  d.width = width;
  d.variant = variant == "shortest" ? model::BeamVariant::ShortestTour : model::BeamVariant::Joint;
  return d;
}

PointSet read_points(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::stringstream buf;
  buf << is.rdbuf();
  const std::string text = buf.str();
  PointSet ps;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') {
    try {
      for (const auto& p : nlohmann::json::parse(text)) {
        ps.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::CorruptFile, std::string("bad point list: ") + e.what());
    }
  } else {
    std::istringstream in(text);
    double x = 0.0, y = 0.0;
    while (in >> x >> y) ps.push_back({x, y});
    in.clear();
    std::string rest;
    if (in >> rest) throw Error(ErrorCode::CorruptFile, "bad point list near '" + rest + "'");
  }
  return ps;
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
  GenerateOptions g;
  g.task = *parse_task(a.task);
  g.m = a.m;
  g.count = a.count;
  g.seed = a.seed;
  g.ordering = a.ordering == "sorted" ? Ordering::Sorted : Ordering::Random;
  g.hk_max = a.hk_max;
  g.workers = a.workers;
  const Dataset data = generate(g);
  save(data, a.out);
  out << "wrote " << data.instances.size() << " " << a.task << " instances (m=" << a.m << ") to "
      << a.out << '\n';
  return 0;
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const Dataset data = load(a.data);
  model::ModelConfig c;
  c.task = data.header.task;
  c.hidden = a.hidden;
  c.self_attention = a.self_attention == "on";
  c.mask_enabled = a.mask == "on";
  c.start_token = a.start_token == "zero" ? model::StartToken::Zero : model::StartToken::Learned;
  c.lr = a.lr;
  c.batch_size = a.batch;
  c.seed = a.seed;
  c.precision = a.precision == "double" ? model::Precision::Double : model::Precision::Single;
  c.validate();
  model::ModelParams params = model::ModelParams::init(c, c.seed);
  nn::AdamState adam = model::make_optimizer(c);
  model::TrainOptions opts;
  opts.epochs = a.epochs;
  opts.shuffle_seed = a.seed;
  opts.lr_decay = a.lr_decay;
  opts.on_epoch = [&](const model::EpochStats& s) {
    out << "epoch " << s.epoch << "/" << a.epochs << " loss " << s.mean_loss << " (" << s.seconds
        << "s)\n"
        << std::flush;
  };
  model::train(data, params, adam, c, opts);
  model::save_model(a.out, c, params, &adam);
  out << "saved " << params.count() << " parameters to " << a.out << '\n';
  return 0;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const model::LoadedModel m = model::load_model(a.ckpt);
  const Dataset data = load(a.data);
  if (data.header.task != m.config.task) {
    throw Error(ErrorCode::CheckpointMismatch, "dataset task differs from the checkpoint");
  }
  Evaluation ev = evaluate(data, m.params, m.config,
                           decoder_spec(a.decoder, a.beam_width, a.variant), a.workers);
  ev.report.label = fs::path(a.ckpt).stem().string();
  out << format_table({ev.report});
  if (!a.report.empty()) {
    fs::path csv = a.report;
    csv.replace_extension(".csv");
    write_report(ev.report, a.report, csv);
  }
  if (!a.svg_dir.empty()) {
    fs::create_directories(a.svg_dir);
    for (std::size_t i = 0; i < std::min(a.svg_count, data.instances.size()); ++i) {
      const Instance& inst = data.instances[i];
      write_svg(fs::path(a.svg_dir) / ("instance-" + std::to_string(i) + ".svg"),
                render_svg(data.header.task, inst.points, inst.label, ev.parsed[i]));
    }
  }
  return 0;
}

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  const model::LoadedModel m = model::load_model(a.ckpt);
  const PointSet raw = read_points(a.points);
  if (raw.size() < 3) throw Error(ErrorCode::TooFewPoints, "need at least 3 points");
  require_distinct(raw);
  const CanonicalInstanceLayout layout = sort_input(raw);
  const PointSet& ps = layout.sorted_points;
  const DecoderSpec d = decoder_spec(a.decoder, a.beam_width, a.variant);
  const model::DecodeResult r =
      d.beam ? model::beam_decode(ps, m.params, m.config, d.width, d.variant)
             : model::greedy_decode(ps, m.params, m.config);
  const Task task = m.config.task;
  const ParsedOutput parsed = parse_output(task, r.sequence, ps.size());

  // Report indices against the order the points were given in.
  const std::vector<std::size_t> to_original = invert_permutation(layout.permutation);
  std::vector<std::size_t> body;
  for (std::size_t i : r.sequence.body()) body.push_back(i < ps.size() ? to_original[i] : i);
  out << "model:  " << TokenSequence::from_body(body).to_display() << "  log p = " << r.log_prob
      << (r.fallback() ? "  [fallback]" : "") << '\n';

  std::optional<TokenSequence> truth;
  switch (task) {
    case Task::DT:
      truth = canonicalize_dt(delaunay_triangulate(ps), ps);
      break;
    case Task::Hull:
      truth = canonicalize_hull(convex_hull(ps), ps);
      break;
    case Task::TSP:
      if (ps.size() <= kDefaultHeldKarpMax) truth = canonicalize_tour(held_karp(ps).tour, ps);
      break;
  }
  if (truth) {
    std::vector<std::size_t> exact;
    for (std::size_t i : truth->body()) exact.push_back(to_original[i]);
    out << "exact:  " << TokenSequence::from_body(exact).to_display() << '\n';
  }
  if (task == Task::TSP && parsed.valid) out << "tour length " << tour_length(ps, parsed.tour()) << '\n';
  if (!a.svg.empty()) write_svg(a.svg, render_svg(task, ps, truth, parsed));
  return 0;
}

int cmd_experiment(const ExperimentArgs& a, std::ostream& out) {
  std::ifstream is(a.config);
  if (!is) throw Error(ErrorCode::Io, "cannot read " + a.config);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
  ExperimentConfig c = ExperimentConfig::from_json(j);
  if (!a.out_dir.empty()) c.out_dir = a.out_dir;
  const ExperimentResult r = run_experiment(c, &out);
  out << '\n' << format_table(r.table);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pointer-network solver for Delaunay triangulation, convex hull and TSP"};
  app.require_subcommand(1);
  const auto on_off = CLI::IsMember({"on", "off"});

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a labeled dataset");
  g->add_option("--task", gen.task)->required()->check(CLI::IsMember({"dt", "hull", "tsp"}));
  g->add_option("--m", gen.m, "Points per instance")->required();
  g->add_option("--count", gen.count, "Number of instances")->required();
  g->add_option("--seed", gen.seed);
  g->add_option("--ordering", gen.ordering)->check(CLI::IsMember({"sorted", "random"}));
  g->add_option("--hk-max", gen.hk_max, "Largest m labeled exactly for TSP");
  g->add_option("--workers", gen.workers);
  g->add_option("--out", gen.out)->required();

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train a model on a dataset");
  t->add_option("--data", train.data)->required();
  t->add_option("--hidden", train.hidden);
  t->add_option("--self-attention", train.self_attention)->check(on_off);
  t->add_option("--mask", train.mask)->check(on_off);
  t->add_option("--start-token", train.start_token)->check(CLI::IsMember({"zero", "learned"}));
  t->add_option("--lr", train.lr);
  t->add_option("--batch", train.batch);
  t->add_option("--epochs", train.epochs);
  t->add_option("--lr-decay", train.lr_decay, "Learning-rate factor applied after each epoch");
  t->add_option("--seed", train.seed);
  t->add_option("--precision", train.precision)->check(CLI::IsMember({"double", "single"}));
  t->add_option("--out", train.out)->required();

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Decode a dataset and report metrics");
  e->add_option("--ckpt", ev.ckpt)->required();
  e->add_option("--data", ev.data)->required();
  e->add_option("--decoder", ev.decoder)->check(CLI::IsMember({"greedy", "beam"}));
  e->add_option("--beam-width", ev.beam_width)->check(CLI::PositiveNumber);
  e->add_option("--variant", ev.variant)->check(CLI::IsMember({"joint", "shortest"}));
  e->add_option("--report", ev.report, "JSON report path; a CSV is written next to it");
  e->add_option("--svg-dir", ev.svg_dir);
  e->add_option("--svg-count", ev.svg_count);
  e->add_option("--workers", ev.workers);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Run a model on one point set");
  s->add_option("--ckpt", solve.ckpt)->required();
  s->add_option("--points", solve.points, "Text file of 'x y' lines or a JSON [[x,y],...] list")
      ->required();
  s->add_option("--svg", solve.svg);
  s->add_option("--decoder", solve.decoder)->check(CLI::IsMember({"greedy", "beam"}));
  s->add_option("--beam-width", solve.beam_width)->check(CLI::PositiveNumber);
  s->add_option("--variant", solve.variant)->check(CLI::IsMember({"joint", "shortest"}));

  ExperimentArgs ex;
  auto* x = app.add_subcommand("experiment", "Run a JSON-described experiment");
  x->add_option("--config", ex.config)->required();
  x->add_option("--out-dir", ex.out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& h) {
    return app.exit(h, out, err);
  } catch (const CLI::CallForAllHelp& h) {
    return app.exit(h, out, err);
  } catch (const CLI::ParseError& p) {
    app.exit(p, out, err);
    err << app.help();
    return 2;
  }

  try {
    if (*g) return cmd_gen(gen, out);
    if (*t) return cmd_train(train, out);
    if (*e) return cmd_eval(ev, out);
    if (*s) return cmd_solve(solve, out);
    if (*x) return cmd_experiment(ex, out);
  } catch (const Error& error) {
    err << "error [" << to_string(error.code()) << "]: " << error.what() << '\n';
    return 1;
  } catch (const std::exception& ex_) {
    err << "error: " << ex_.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace geoptr::harness
