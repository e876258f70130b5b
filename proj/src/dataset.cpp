#include "geoptr/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "geoptr/error.hpp"
#include "geoptr/rng.hpp"

namespace geoptr {

namespace {

using nlohmann::json;

constexpr const char* kFormatName = "geoptr-dataset";
constexpr const char* kRngName = "mt19937_64/splitmix64";

bool has_collinear_triple(const PointSet& ps) {
  const std::size_t m = ps.size();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      for (std::size_t k = j + 1; k < m; ++k)
        if (orient2d(ps[i], ps[j], ps[k]) == Orientation::Collinear) return true;
  return false;
}

bool has_cocircular_quad(const PointSet& ps) {
  const std::size_t m = ps.size();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      for (std::size_t k = j + 1; k < m; ++k)
        for (std::size_t l = k + 1; l < m; ++l)
          if (std::abs(incircle_det(ps[i], ps[j], ps[k], ps[l])) <= kGeoEpsilon) return true;
  return false;
}

bool has_duplicates(const PointSet& ps) {
  try {
    require_distinct(ps);
  } catch (const Error&) {
    return true;
  }
  return false;
}

bool degenerate_for(Task task, const PointSet& ps) {
  if (has_duplicates(ps)) return true;
  if (task == Task::TSP) return false;
  if (has_collinear_triple(ps)) return true;
  return task == Task::DT && has_cocircular_quad(ps);
}

std::vector<std::size_t> rotate_and_maybe_reverse(std::vector<std::size_t> cycle, Rng& rng) {
  if (cycle.empty()) return cycle;
  const auto shift = static_cast<std::ptrdiff_t>(rng.below(cycle.size()));
  std::rotate(cycle.begin(), cycle.begin() + shift, cycle.end());
  if (rng.below(2) == 1) std::reverse(cycle.begin(), cycle.end());
  return cycle;
}

void append_double(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

std::string header_line(const DatasetHeader& h) {
  nlohmann::ordered_json j;
  j["format"] = kFormatName;
  j["format_version"] = h.format_version;
  j["task"] = std::string(to_string(h.task));
  j["m"] = h.m;
  j["count"] = h.count;
  j["seed"] = h.seed;
  j["ordering"] = std::string(to_string(h.ordering));
  j["hk_max"] = h.hk_max;
  j["rng"] = kRngName;
  return j.dump();
}

std::string record_line(const Instance& inst) {
  std::string out = "{\"seed\":" + std::to_string(inst.meta.seed) +
                    ",\"optimal\":" + (inst.meta.optimal ? "true" : "false") + ",\"points\":[";
  for (std::size_t i = 0; i < inst.points.size(); ++i) {
    if (i) out += ',';
    out += '[';
    append_double(out, inst.points[i].x);
    out += ',';
    append_double(out, inst.points[i].y);
    out += ']';
  }
  out += "],\"label\":[";
  const auto body = inst.label.body();
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(body[i]);
  }
  out += "]}";
  return out;
}

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorCode::CorruptFile, what); }
[[noreturn]] void violation(const std::string& what) {
  throw Error(ErrorCode::InvariantViolation, what);
}

DatasetHeader parse_header(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    corrupt(std::string("unreadable header: ") + e.what());
  }
  DatasetHeader h;
  try {
    if (j.at("format").get<std::string>() != kFormatName) corrupt("not a dataset file");
    h.format_version = j.at("format_version").get<int>();
    if (h.format_version != kDatasetFormatVersion) {
      throw Error(ErrorCode::VersionMismatch,
                  "format_version " + std::to_string(h.format_version) + ", expected " +
                      std::to_string(kDatasetFormatVersion));
    }
    const auto task = parse_task(j.at("task").get<std::string>());
    if (!task) corrupt("unknown task");
    h.task = *task;
    h.m = j.at("m").get<std::size_t>();
    h.count = j.at("count").get<std::size_t>();
    h.seed = j.at("seed").get<std::uint64_t>();
    const auto ordering = j.at("ordering").get<std::string>();
    if (ordering == "sorted") {
      h.ordering = Ordering::Sorted;
    } else if (ordering == "random") {
      h.ordering = Ordering::Random;
    } else {
      corrupt("unknown ordering '" + ordering + "'");
    }
    h.hk_max = j.value("hk_max", kDefaultHeldKarpMax);
  } catch (const json::exception& e) {
    corrupt(std::string("bad header field: ") + e.what());
  }
  return h;
}

Instance parse_record(const DatasetHeader& h, const std::string& line, std::size_t lineno) {
  Instance inst;
  inst.task = h.task;
  try {
    const json j = json::parse(line);
    inst.meta.seed = j.at("seed").get<std::uint64_t>();
    inst.meta.optimal = j.at("optimal").get<bool>();
    for (const auto& p : j.at("points")) {
      if (p.size() != 2) corrupt("point without two coordinates");
      inst.points.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    std::vector<std::size_t> body;
    for (const auto& i : j.at("label")) body.push_back(i.get<std::size_t>());
    inst.label = TokenSequence::from_body(body);
  } catch (const json::exception& e) {
    corrupt("record on line " + std::to_string(lineno) + ": " + e.what());
  }
  return inst;
}

}  // namespace

std::string_view to_string(Ordering o) { return o == Ordering::Sorted ? "sorted" : "random"; }

Instance generate_instance(const GenerateOptions& opts, std::uint64_t index) {
  const std::uint64_t sub_seed = Rng::substream_seed(opts.seed, index);
  Rng rng(sub_seed);
  Instance inst;
  inst.task = opts.task;
  inst.meta.seed = sub_seed;

  for (;;) {
    PointSet ps(opts.m);
    for (Point& p : ps) {
      p.x = rng.uniform();
      p.y = rng.uniform();
    }
    if (degenerate_for(opts.task, ps)) continue;

    if (opts.ordering == Ordering::Sorted) {
      CanonicalInstanceLayout layout = sort_input(ps);
      const PointSet& sp = layout.sorted_points;
      switch (opts.task) {
        case Task::DT:
          inst.label = canonicalize_dt(delaunay_triangulate(sp), sp);
          inst.meta.optimal = true;
          break;
        case Task::Hull:
          inst.label = canonicalize_hull(convex_hull(sp), sp);
          inst.meta.optimal = true;
          break;
        case Task::TSP: {
          Tour tour;
          if (opts.m <= opts.hk_max) {
            tour = held_karp(sp, opts.hk_max).tour;
            inst.meta.optimal = true;
          } else {
            tour = two_opt(sp, nearest_neighbor_tour(sp));
            inst.meta.optimal = false;
          }
          if (std::abs(signed_area(sp, tour)) <= kGeoEpsilon) continue;
          inst.label = canonicalize_tour(tour, sp);
          break;
        }
      }
      inst.points = std::move(layout.sorted_points);
      return inst;
    }

    // Random ordering: points stay in draw order, the label is emitted in an
    // arbitrary but seeded arrangement.
    switch (opts.task) {
      case Task::DT: {
        auto tris = delaunay_triangulate(ps);
        rng.shuffle(std::span<TriangleIdx>(tris));
        std::vector<std::size_t> body;
        for (const TriangleIdx& t : tris) {
          std::size_t v[3] = {t.a, t.b, t.c};
          rng.shuffle(std::span<std::size_t>(v, 3));
          body.insert(body.end(), v, v + 3);
        }
        inst.label = TokenSequence::from_body(body);
        inst.meta.optimal = true;
        break;
      }
      case Task::Hull:
        inst.label = TokenSequence::from_body(rotate_and_maybe_reverse(convex_hull(ps), rng));
        inst.meta.optimal = true;
        break;
      case Task::TSP: {
        Tour tour;
        if (opts.m <= opts.hk_max) {
          tour = held_karp(ps, opts.hk_max).tour;
          inst.meta.optimal = true;
        } else {
          tour = two_opt(ps, nearest_neighbor_tour(ps));
          inst.meta.optimal = false;
        }
        if (std::abs(signed_area(ps, tour)) <= kGeoEpsilon) continue;
        inst.label = TokenSequence::from_body(rotate_and_maybe_reverse(tour, rng));
        break;
      }
    }
    inst.points = std::move(ps);
    return inst;
  }
}

Dataset generate(const GenerateOptions& opts) {
  // Three points at least; for TSP fewer cities give a tour with no orientation.
  if (opts.m < 3) {
    throw Error(ErrorCode::InfeasibleConfig,
                "task " + std::string(to_string(opts.task)) + " needs m >= 3");
  }
  if (opts.count < 1) throw Error(ErrorCode::InfeasibleConfig, "count must be >= 1");

  Dataset data;
  data.header = {opts.task, opts.m, opts.count, opts.seed, opts.ordering, kDatasetFormatVersion,
                 opts.hk_max};
  data.instances.resize(opts.count);

  const unsigned workers = std::max(1u, std::min<unsigned>(opts.workers, 64));
  if (workers == 1) {
    for (std::size_t i = 0; i < opts.count; ++i) data.instances[i] = generate_instance(opts, i);
    return data;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < opts.count; i += workers) {
        data.instances[i] = generate_instance(opts, i);
      }
    });
  }
  pool.clear();
  return data;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::InfeasibleConfig, "train fraction must be in (0, 1)");
  }
  const std::size_t n = data.instances.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction));

  Dataset train, test;
  train.header = test.header = data.header;
  for (std::size_t k = 0; k < n; ++k) {
    (k < n_train ? train : test).instances.push_back(data.instances[order[k]]);
  }
  train.header.count = train.instances.size();
  test.header.count = test.instances.size();
  return {std::move(train), std::move(test)};
}

void validate_instance(const DatasetHeader& h, const Instance& inst) {
  const std::size_t m = h.m;
  if (inst.points.size() != m) {
    violation("instance has " + std::to_string(inst.points.size()) + " points, header says " +
              std::to_string(m));
  }
  for (const Point& p : inst.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) violation("non-finite coordinate");
  }
  if (has_duplicates(inst.points)) violation("duplicate points");
  const auto body = inst.label.body();
  for (std::size_t i : body) {
    if (i >= m) violation("label index " + std::to_string(i) + " >= m=" + std::to_string(m));
  }

  const bool sorted = h.ordering == Ordering::Sorted;
  if (sorted && !std::is_sorted(inst.points.begin(), inst.points.end(), lex_less)) {
    violation("points are not in lexicographic order");
  }

  switch (h.task) {
    case Task::DT: {
      if (body.empty() || body.size() % 3 != 0) violation("DT label length is not a multiple of 3");
      std::vector<TriangleIdx> tris;
      for (std::size_t t = 0; t < body.size(); t += 3) {
        const TriangleIdx tri{body[t], body[t + 1], body[t + 2]};
        if (!has_empty_circumcircle(inst.points, tri)) {
          violation("label triangle (" + std::to_string(tri.a) + "," + std::to_string(tri.b) +
                    "," + std::to_string(tri.c) + ") fails the empty-circumcircle check");
        }
        tris.push_back(tri);
      }
      if (sorted && !(canonicalize_dt(tris, inst.points) == inst.label)) {
        violation("DT label is not canonical");
      }
      break;
    }
    case Task::Hull: {
      const ParsedOutput parsed = parse_output(Task::Hull, inst.label, m);
      if (!parsed.valid) violation("hull label has repeats or fewer than 3 vertices");
      if (sorted && !(canonicalize_hull(body, inst.points) == inst.label)) {
        violation("hull label is not canonical");
      }
      break;
    }
    case Task::TSP: {
      const ParsedOutput parsed = parse_output(Task::TSP, inst.label, m);
      if (!parsed.valid) violation("TSP label is not a permutation");
      if (sorted && !(canonicalize_tour(body, inst.points) == inst.label)) {
        violation("TSP label is not canonical");
      }
      break;
    }
  }
}

void write_dataset(std::ostream& os, const Dataset& data) {
  DatasetHeader h = data.header;
  h.count = data.instances.size();
  os << header_line(h) << '\n';
  for (const Instance& inst : data.instances) os << record_line(inst) << '\n';
}

Dataset read_dataset(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.empty()) corrupt("missing header line");
  Dataset data;
  data.header = parse_header(line);
  data.instances.reserve(data.header.count);
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (is.eof()) corrupt("line " + std::to_string(lineno) + " is not newline-terminated");
    if (data.instances.size() == data.header.count) corrupt("more records than header count");
    Instance inst = parse_record(data.header, line, lineno);
    validate_instance(data.header, inst);
    data.instances.push_back(std::move(inst));
  }
  if (data.instances.size() != data.header.count) {
    corrupt("expected " + std::to_string(data.header.count) + " records, found " +
            std::to_string(data.instances.size()));
  }
  return data;
}

void save(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  write_dataset(os, data);
  if (!os) throw Error(ErrorCode::Io, "write to " + path.string() + " failed");
}

Dataset load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_dataset(is);
}

double label_tour_length(const Instance& inst) { return tour_length(inst.points, inst.label.body()); }

}  // namespace geoptr
