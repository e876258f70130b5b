#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "geoptr/dataset.hpp"
#include "geoptr/error.hpp"
#include "geoptr/harness/cli.hpp"
#include "geoptr/harness/experiment.hpp"
#include "geoptr/harness/metrics.hpp"
#include "geoptr/harness/report.hpp"
#include "geoptr/harness/svg.hpp"
#include "geoptr/model/params.hpp"

using namespace geoptr;
using namespace geoptr::harness;

namespace {

std::vector<std::size_t> flatten(const std::vector<TriangleIdx>& tris) {
  std::vector<std::size_t> out;
  for (const TriangleIdx& t : tris) out.insert(out.end(), {t.a, t.b, t.c});
  return out;
}

// A six-point set whose triangulation has exactly five triangles.
PointSet five_triangle_points() {
  Rng rng(1);
  for (;;) {
    PointSet ps;
    for (int i = 0; i < 6; ++i) ps.push_back({rng.uniform(), rng.uniform()});
    ps = sort_input(ps).sorted_points;
    if (delaunay_triangulate(ps).size() == 5) return ps;
  }
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "geoptr");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("geoptr-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("DT metrics worked example: TC 90, ACC 50") {
  const PointSet ps = five_triangle_points();
  const auto tris = delaunay_triangulate(ps);
  const TokenSequence truth = canonicalize_dt(tris, ps);

  std::set<TriangleIdx> truth_set(tris.begin(), tris.end());
  TriangleIdx wrong{0, 0, 0};
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = a + 1; b < 6; ++b)
      for (std::size_t c = b + 1; c < 6; ++c)
        if (wrong.c == 0 && !truth_set.count({a, b, c})) wrong = {a, b, c};
  REQUIRE(wrong.c != 0);
  auto four = tris;
  four[2] = wrong;

  const std::vector<ParsedOutput> pred = {
      parse_output(Task::DT, truth, 6),
      parse_output(Task::DT, TokenSequence::from_body(flatten(four)), 6)};
  const std::vector<TokenSequence> truths = {truth, truth};
  const std::vector<PointSet> points = {ps, ps};
  const DtMetrics m = metrics_dt(pred, truths, points);
  CHECK(m.tc == doctest::Approx(90.0));
  CHECK(m.acc == doctest::Approx(50.0));
  CHECK(m.tca == doctest::Approx(100.0));
  CHECK(m.truth_triangles == 10);
  CHECK(m.matched_triangles == 9);
  CHECK(m.dtr == doctest::Approx(90.0));
  CHECK(m.samples == 2);
}

TEST_CASE("DT metrics: trailing tokens are excluded from the count") {
  const PointSet ps = {{0, 0}, {0.5, 1}, {1, 0}};
  const TokenSequence truth = TokenSequence::from_body({0, 1, 2});
  const ParsedOutput five = parse_output(Task::DT, TokenSequence::from_body({0, 1, 2, 0, 1}), 3);
  CHECK(five.excluded_tokens == 2);
  CHECK(five.triangles.size() == 1);
  const std::vector<ParsedOutput> pred = {five};
  const std::vector<TokenSequence> truths = {truth};
  const std::vector<PointSet> points = {ps};
  const DtMetrics m = metrics_dt(pred, truths, points);
  CHECK(m.tca == 100.0);
  CHECK(m.tc == 100.0);
  CHECK(m.excluded_tokens == 2);
}

TEST_CASE("metrics of labels against themselves are perfect") {
  for (Task task : {Task::DT, Task::Hull, Task::TSP}) {
    GenerateOptions g;
    g.task = task;
    g.m = 7;
    g.count = 30;
    g.seed = 5;
    const Dataset d = generate(g);
    std::vector<ParsedOutput> pred;
    std::vector<TokenSequence> truth;
    std::vector<PointSet> points;
    std::vector<double> refs;
    for (const Instance& inst : d.instances) {
      pred.push_back(parse_output(task, inst.label, 7));
      truth.push_back(inst.label);
      points.push_back(inst.points);
      if (task == Task::TSP) refs.push_back(label_tour_length(inst));
    }
    if (task == Task::DT) {
      const DtMetrics m = metrics_dt(pred, truth, points);
      CHECK(m.tc == 100.0);
      CHECK(m.acc == 100.0);
      CHECK(m.tca == 100.0);
      CHECK(m.dtr == 100.0);
    } else if (task == Task::Hull) {
      const HullMetrics m = metrics_hull(pred, truth, points);
      CHECK(m.acc == 100.0);
      CHECK(m.ac == doctest::Approx(100.0));
    } else {
      const TspMetrics m = metrics_tsp(pred, points, refs);
      CHECK(m.vtr == 100.0);
      CHECK(m.atl == doctest::Approx(m.reference_atl));
      CHECK(m.optimality_gap == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("DT metrics: ACC never exceeds TC and mismatched inputs throw") {
  const PointSet ps = five_triangle_points();
  const TokenSequence truth = canonicalize_dt(delaunay_triangulate(ps), ps);
  const std::vector<ParsedOutput> pred = {
      parse_output(Task::DT, TokenSequence::from_body({0, 1, 2}), 6)};
  const std::vector<TokenSequence> truths = {truth};
  const std::vector<PointSet> points = {ps};
  const DtMetrics m = metrics_dt(pred, truths, points);
  CHECK(m.acc <= m.tc);
  CHECK(m.acc == 0.0);
  const std::vector<TokenSequence> two = {truth, truth};
  CHECK_THROWS_AS(metrics_dt(pred, two, points), Error);
}

TEST_CASE("same_polygon") {
  const std::vector<std::size_t> a = {0, 3, 5, 2};
  CHECK(same_polygon(a, std::vector<std::size_t>{5, 2, 0, 3}));
  CHECK(same_polygon(a, std::vector<std::size_t>{2, 5, 3, 0}));
  CHECK(same_polygon(a, std::vector<std::size_t>{3, 0, 2, 5}));
  CHECK_FALSE(same_polygon(a, std::vector<std::size_t>{0, 5, 3, 2}));
  CHECK_FALSE(same_polygon(a, std::vector<std::size_t>{0, 3, 5}));
}

TEST_CASE("hull metrics") {
  const PointSet ps = {{0, 0}, {0, 1}, {0.5, 0.5}, {0.55, 0.8}, {1, 0}, {1, 1}};
  const TokenSequence truth = canonicalize_hull(convex_hull(ps), ps);
  const std::vector<TokenSequence> truths = {truth, truth, truth};
  const std::vector<PointSet> points = {ps, ps, ps};

  // Reversed and rotated: still the same polygon.
  auto body = truth.body();
  std::reverse(body.begin(), body.end());
  std::rotate(body.begin(), body.begin() + 1, body.end());
  // An extra interior vertex cuts a notch out of the hull.
  const std::vector<std::size_t> notched = {0, 4, 5, 3, 1};
  const std::vector<ParsedOutput> pred = {
      parse_output(Task::Hull, TokenSequence::from_body(body), 6),
      parse_output(Task::Hull, TokenSequence::from_body(notched), 6),
      parse_output(Task::Hull, TokenSequence::from_body({0, 4}), 6)};
  const HullMetrics m = metrics_hull(pred, truths, points);
  CHECK(m.acc == doctest::Approx(100.0 / 3.0));
  const double notch_area = polygon_area(ps, notched);
  CHECK(notch_area < 1.0);
  CHECK(m.ac == doctest::Approx((100.0 + 100.0 * notch_area) / 3.0));
  CHECK(m.degenerate == 1);
}

TEST_CASE("TSP metrics") {
  const PointSet ps = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  const std::vector<ParsedOutput> pred = {
      parse_output(Task::TSP, TokenSequence::from_body({0, 1, 2, 3}), 4),
      parse_output(Task::TSP, TokenSequence::from_body({0, 2, 1, 3}), 4),
      parse_output(Task::TSP, TokenSequence::from_body({0, 1, 1, 3}), 4)};
  const std::vector<PointSet> points = {ps, ps, ps};
  const std::vector<double> refs = {4.0, 4.0, 4.0};
  const TspMetrics m = metrics_tsp(pred, points, refs);
  CHECK(m.valid == 2);
  CHECK(m.vtr == doctest::Approx(200.0 / 3.0));
  CHECK(m.atl == doctest::Approx((4.0 + 2.0 + 2.0 * std::sqrt(2.0)) / 2.0));
  CHECK(m.reference_atl == doctest::Approx(4.0));
  CHECK(m.optimality_gap == doctest::Approx(100.0 * ((2.0 + 2.0 * std::sqrt(2.0)) / 4.0 - 1.0) / 2.0));
}

TEST_CASE("mean optimal TSP5 tour length") {
  GenerateOptions g;
  g.task = Task::TSP;
  g.m = 5;
  g.count = 4000;
  g.seed = 31;
  g.workers = 4;
  double total = 0.0;
  for (const Instance& inst : generate(g).instances) total += label_tour_length(inst);
  CHECK(total / 4000.0 == doctest::Approx(2.12).epsilon(0.015));
}

TEST_CASE("report serialization") {
  MetricsReport r;
  r.task = Task::TSP;
  r.label = "model";
  r.decoder = "greedy";
  r.samples = 3;
  TspMetrics t;
  t.atl = 2.5;
  t.vtr = 100.0;
  r.tsp = t;
  r.decode_seconds = 1.5;
  const auto j = to_json(r);
  CHECK(j["schema_version"] == kReportSchemaVersion);
  CHECK(j["task"] == "tsp");
  CHECK(j["tsp"]["ATL"] == 2.5);
  CHECK(j["timings"]["decode_seconds"] == 1.5);
  CHECK_FALSE(to_json(r, false).contains("timings"));

  std::ostringstream csv;
  write_csv(csv, r);
  CHECK(csv.str().rfind("metric,value\n", 0) == 0);
  CHECK(csv.str().find("ATL,2.5") != std::string::npos);

  std::ostringstream cmp;
  write_comparison_csv(cmp, {r, r});
  std::size_t lines = 0;
  for (char ch : cmp.str()) lines += ch == '\n';
  CHECK(lines == 3);
  CHECK(format_table({r}).find("greedy") != std::string::npos);
}

TEST_CASE("svg rendering") {
  const PointSet ps = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  const TokenSequence truth = TokenSequence::from_body({0, 3, 2, 1});
  const ParsedOutput pred = parse_output(Task::TSP, TokenSequence::from_body({0, 2, 3, 1}), 4);
  const std::string svg = render_svg(Task::TSP, ps, truth, pred);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find(">4<") != std::string::npos);
}

TEST_CASE("cli usage errors exit 2") {
  const CliResult r = cli({"gen", "--bogus"});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
  CHECK(cli({}).code == 2);
  CHECK(cli({"gen", "--task", "nope", "--m", "5", "--count", "1", "--out", "x"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("cli binary exit status") {
  const std::string cli_path = GEOPTR_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int raw = std::system((cli_path + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("gen --task dt --m 5 --count 1 --bogus") == 2);
  CHECK(status("--help") == 0);
  CHECK(status("solve --ckpt /nonexistent.ckpt --points /nonexistent.txt") == 1);
}

TEST_CASE("shipped experiment configs parse") {
  std::size_t n = 0;
  for (const auto& entry :
       std::filesystem::directory_iterator(std::filesystem::path(GEOPTR_SOURCE_DIR) / "tools" / "experiments")) {
    INFO(entry.path().string());
    const auto c = ExperimentConfig::from_json(nlohmann::json::parse(slurp(entry.path())));
    CHECK(c.train.count > 0);
    ++n;
  }
  CHECK(n >= 3);
}

TEST_CASE("cli runtime errors exit 1") {
  const auto dir = scratch_dir("cli-errors");
  const CliResult r = cli({"eval", "--ckpt", (dir / "missing.ckpt").string(), "--data",
                           (dir / "missing.jsonl").string(), "--report",
                           (dir / "r.json").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("cli end to end: gen, train, eval, solve") {
  const auto dir = scratch_dir("cli-e2e");
  const std::string a = (dir / "a.jsonl").string(), b = (dir / "b.jsonl").string();
  for (const std::string& path : {a, b}) {
    REQUIRE(cli({"gen", "--task", "tsp", "--m", "5", "--count", "60", "--seed", "7", "--out", path})
                .code == 0);
  }
  CHECK(slurp(a) == slurp(b));
  CHECK(load(a).instances.size() == 60);

  const std::string ckpt = (dir / "m.ckpt").string();
  const CliResult tr = cli({"train", "--data", a, "--hidden", "8", "--epochs", "1", "--batch",
                            "16", "--seed", "3", "--out", ckpt});
  REQUIRE(tr.code == 0);

  const auto greedy = dir / "greedy.json", beam = dir / "beam.json";
  REQUIRE(cli({"eval", "--ckpt", ckpt, "--data", a, "--decoder", "greedy", "--report",
               greedy.string()})
              .code == 0);
  REQUIRE(cli({"eval", "--ckpt", ckpt, "--data", a, "--decoder", "beam", "--beam-width", "1",
               "--report", beam.string()})
              .code == 0);
  auto strip = [](nlohmann::json j) {
    j.erase("decoder");
    j.erase("timings");
    return j;
  };
  const auto jg = nlohmann::json::parse(slurp(greedy));
  const auto jb = nlohmann::json::parse(slurp(beam));
  CHECK(strip(jg) == strip(jb));
  CHECK(jg["tsp"]["VTR"] == 100.0);
  CHECK(std::filesystem::exists(dir / "greedy.csv"));

  const auto pts = dir / "pts.txt";
  std::ofstream(pts) << "0.9 0.1\n0.1 0.1\n0.5 0.9\n0.2 0.6\n0.8 0.7\n";
  const auto svg = dir / "solve.svg";
  const CliResult s = cli({"solve", "--ckpt", ckpt, "--points", pts.string(), "--svg", svg.string()});
  CHECK(s.code == 0);
  CHECK(s.out.find("(=>") != std::string::npos);
  CHECK(std::filesystem::exists(svg));
}

TEST_CASE("experiment runs an ordering ablation") {
  const auto dir = scratch_dir("experiment");
  ExperimentConfig c;
  c.name = "tiny";
  c.task = Task::Hull;
  c.m = 6;
  c.train = {64, 1};
  c.test = {16, 2};
  c.model.task = Task::Hull;
  c.model.hidden = 8;
  c.model.batch_size = 16;
  c.epochs = 1;
  c.ablation = Ablation::Ordering;
  c.out_dir = dir;
  c.cache_dir = dir / "cache";
  c.svg_count = 2;
  const ExperimentResult r = run_experiment(c);
  REQUIRE(r.runs.size() == 2);
  CHECK(r.runs[0].label == "sorted");
  CHECK(r.runs[1].label == "random");
  CHECK(r.table.size() == 2);
  CHECK(std::filesystem::exists(dir / "tiny" / "comparison.csv"));
  CHECK(std::filesystem::exists(dir / "tiny" / "sorted-greedy.json"));
  CHECK(std::filesystem::exists(dir / "tiny" / "random-loss.csv"));

  // Second run reuses the cached checkpoints and reproduces the reports.
  const ExperimentResult again = run_experiment(c);
  CHECK(again.runs[0].from_cache);
  CHECK(to_json(again.table[0], false) == to_json(r.table[0], false));

  c.ablation = Ablation::SelfAttention;
  const auto ablation = run_experiment(c);
  CHECK(ablation.runs[0].label == "self-attention");
  CHECK(ablation.runs[1].label == "ptr-net");
  CHECK_FALSE(ablation.runs[1].model.self_attention);

  const auto back = ExperimentConfig::from_json(nlohmann::json(c.to_json()));
  CHECK(back.to_json() == c.to_json());
}

}  // TEST_SUITE
