#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace geoptr {

enum class Task { DT, Hull, TSP };

inline std::string_view to_string(Task t) {
  switch (t) {
    case Task::DT: return "dt";
    case Task::Hull: return "hull";
    case Task::TSP: return "tsp";
  }
  return "?";
}

inline std::optional<Task> parse_task(std::string_view s) {
  if (s == "dt") return Task::DT;
  if (s == "hull") return Task::Hull;
  if (s == "tsp") return Task::TSP;
  return std::nullopt;
}

}  // namespace geoptr
