#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "geoptr/geometry.hpp"
#include "geoptr/sequencing.hpp"
#include "geoptr/task.hpp"

namespace geoptr::harness {

// Unit-square rendering: ground truth dashed grey, predicted elements blue
// when they appear in the truth and red otherwise. Points are numbered 1..m.
std::string render_svg(Task task, const PointSet& points, const std::optional<TokenSequence>& truth,
                       const ParsedOutput& prediction, int size = 480);

void write_svg(const std::filesystem::path& path, const std::string& svg);

}  // namespace geoptr::harness
