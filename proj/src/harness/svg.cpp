#include "geoptr/harness/svg.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <utility>

#include "geoptr/error.hpp"

namespace geoptr::harness {

namespace {

constexpr const char* kTruth = "#9e9e9e";
constexpr const char* kCorrect = "#1f5fd6";
constexpr const char* kWrong = "#d62728";

using Edge = std::pair<std::size_t, std::size_t>;

Edge edge(std::size_t a, std::size_t b) { return a < b ? Edge{a, b} : Edge{b, a}; }

class Canvas {
 public:
  explicit Canvas(int size) : size_(size) {
    out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(size) +
            "\" height=\"" + std::to_string(size) + "\" viewBox=\"0 0 " + std::to_string(size) +
            " " + std::to_string(size) + "\">\n";
    out_ += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }

  void line(const Point& a, const Point& b, const char* color, double width, bool dashed) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\" "
                  "stroke-width=\"%.1f\"%s/>\n",
                  sx(a.x), sy(a.y), sx(b.x), sy(b.y), color, width,
                  dashed ? " stroke-dasharray=\"5,4\"" : "");
    out_ += buf;
  }

  void point(const Point& p, std::size_t label) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3.5\" fill=\"black\"/>\n"
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"11\" font-family=\"sans-serif\">%zu</text>\n",
                  sx(p.x), sy(p.y), sx(p.x) + 5.0, sy(p.y) - 5.0, label);
    out_ += buf;
  }

  std::string finish() { return out_ + "</svg>\n"; }

 private:
  double sx(double x) const { return margin_ + x * (size_ - 2 * margin_); }
  double sy(double y) const { return size_ - margin_ - y * (size_ - 2 * margin_); }

  int size_;
  double margin_ = 20.0;
  std::string out_;
};

void draw_cycle(Canvas& c, const PointSet& ps, const std::vector<std::size_t>& cycle,
                const std::set<Edge>* truth, const char* fixed_color, bool dashed) {
  const std::size_t n = cycle.size();
  if (n < 2) return;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t a = cycle[k];
    const std::size_t b = cycle[(k + 1) % n];
    if (a >= ps.size() || b >= ps.size()) continue;
    const char* color = fixed_color ? fixed_color : (truth->count(edge(a, b)) ? kCorrect : kWrong);
    c.line(ps[a], ps[b], color, dashed ? 1.0 : 2.0, dashed);
  }
}

}  // namespace

std::string render_svg(Task task, const PointSet& points, const std::optional<TokenSequence>& truth,
                       const ParsedOutput& prediction, int size) {
  Canvas canvas(size);
  const std::size_t m = points.size();
  if (task == Task::DT) {
    std::set<TriangleIdx> truth_tris;
    if (truth) {
      for (const TriangleIdx& t : parse_output(Task::DT, *truth, m).triangles) {
        truth_tris.insert(t.canonical());
        draw_cycle(canvas, points, {t.a, t.b, t.c}, nullptr, kTruth, true);
      }
    }
    for (const TriangleIdx& t : prediction.triangles) {
      const bool ok = !truth || truth_tris.count(t.canonical()) > 0;
      draw_cycle(canvas, points, {t.a, t.b, t.c}, nullptr, ok ? kCorrect : kWrong, false);
    }
  } else {
    std::set<Edge> truth_edges;
    if (truth) {
      const std::vector<std::size_t> body = truth->body();
      for (std::size_t k = 0; k < body.size(); ++k) {
        truth_edges.insert(edge(body[k], body[(k + 1) % body.size()]));
      }
      draw_cycle(canvas, points, body, nullptr, kTruth, true);
    }
    draw_cycle(canvas, points, prediction.indices, truth ? &truth_edges : nullptr,
               truth ? nullptr : kCorrect, false);
  }
  for (std::size_t i = 0; i < m; ++i) canvas.point(points[i], i + 1);
  return canvas.finish();
}

void write_svg(const std::filesystem::path& path, const std::string& svg) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::Io, "cannot write " + path.string());
  os << svg;
}

}  // namespace geoptr::harness
