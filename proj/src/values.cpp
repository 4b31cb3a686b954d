#include "tacgraph/values.hpp"

#include <algorithm>

namespace tacgraph {

double tangent_distance(const Values& a, const Values& b) {
  double worst = 0.0;
  for (const auto& [key, pose] : a.poses()) {
    if (!b.has(key)) continue;
    worst = std::max(worst, local_coordinates(pose, b.pose(key)).norm());
  }
  for (const auto& [key, vec] : a.vectors()) {
    if (!b.has(key)) continue;
    worst = std::max(worst, (vec - b.vec(key)).norm());
  }
  return worst;
}

}  // namespace tacgraph
