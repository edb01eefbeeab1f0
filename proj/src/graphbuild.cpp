#include "sglayout/graphbuild.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>
#include <tuple>

#include "sglayout/errors.hpp"

namespace sglayout {

int assign_predicate(const Box& a, const Box& b) {
  const bool a_contains_b =
      a.x0 < b.x0 && a.y0 < b.y0 && b.x1 < a.x1 && b.y1 < a.y1;
  if (a_contains_b) return pred::kSurrounding;
  const bool b_contains_a =
      b.x0 < a.x0 && b.y0 < a.y0 && a.x1 < b.x1 && a.y1 < b.y1;
  if (b_contains_a) return pred::kInside;

  // Centroid-delta quadrant, y down. Half-open 45-degree boundaries keep the
  // rule antisymmetric under argument swap.
  const double dx = b.cx() - a.cx();
  const double dy = b.cy() - a.cy();
  if (dx > 0.0 && -dx <= dy && dy < dx) return pred::kLeftOf;
  if (dx < 0.0 && dx < dy && dy <= -dx) return pred::kRightOf;
  if (dy > 0.0 && -dy < dx && dx <= dy) return pred::kAbove;
  if (dy < 0.0 && dy <= dx && dx < -dy) return pred::kBelow;
  return pred::kLeftOf;  // identical centroids, documented tie-break
}

double horizontal_overlap_ratio(const Box& a, const Box& b) {
  const double overlap =
      std::max(0.0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
  const double shorter = std::min(a.width(), b.width());
  return shorter <= 0.0 ? 0.0 : overlap / shorter;
}

SceneGraph build_scene_graph(const Scene& s, Rng& rng, int edges_per_node) {
  const int n = static_cast<int>(s.objects.size());
  if (n < 2) throw DataError("graph build: need at least 2 objects");
  if (edges_per_node < 1)
    throw DataError("graph build: edges_per_node must be >= 1");

  SceneGraph g;
  g.node_categories.reserve(n);
  for (const auto& o : s.objects) g.node_categories.push_back(o.category);

  const int k = std::min(edges_per_node, n - 1);
  std::set<std::pair<int, int>> seen;
  for (int i = 0; i < n; ++i) {
    std::vector<int> partners;
    partners.reserve(n - 1);
    for (int j = 0; j < n; ++j)
      if (j != i) partners.push_back(j);
    rng.shuffle(partners);
    for (int t = 0; t < k; ++t) {
      const int j = partners[t];
      const bool flip = rng.uniform_below(2) == 1;
      const int sub = flip ? j : i;
      const int obj = flip ? i : j;
      if (!seen.insert({sub, obj}).second) continue;
      g.edges.push_back(
          {sub, assign_predicate(s.objects[sub].box, s.objects[obj].box), obj});
      g.augmented.push_back(0);
    }
  }
  return g;
}

SceneGraph augment_graph(const Scene& s, const SceneGraph& g,
                         const AugmentConfig& cfg) {
  if (!cfg.enabled) return g;
  const int n = static_cast<int>(s.objects.size());
  const int cap = cfg.max_augmented >= 0 ? cfg.max_augmented
                                         : 2 * static_cast<int>(g.edges.size());

  // (ratio desc, pair asc) so the cap keeps the strongest overlaps.
  std::vector<std::tuple<double, int, int>> candidates;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Box& a = s.objects[i].box;
      const Box& b = s.objects[j].box;
      const double ratio = horizontal_overlap_ratio(a, b);
      if (ratio < cfg.overlap_threshold) continue;
      if (a.y1 == b.y1) continue;  // tie: no depth order
      candidates.emplace_back(ratio, i, j);
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const auto& lhs, const auto& rhs) {
              if (std::get<0>(lhs) != std::get<0>(rhs))
                return std::get<0>(lhs) > std::get<0>(rhs);
              return std::tie(std::get<1>(lhs), std::get<2>(lhs)) <
                     std::tie(std::get<1>(rhs), std::get<2>(rhs));
            });

  SceneGraph out = g;
  int added = 0;
  for (const auto& [ratio, i, j] : candidates) {
    (void)ratio;
    if (added + 2 > cap) break;
    const bool i_nearer = s.objects[i].box.y1 > s.objects[j].box.y1;
    const int nearer = i_nearer ? i : j;
    const int farther = i_nearer ? j : i;
    out.edges.push_back({nearer, pred::kInFrontOf, farther});
    out.augmented.push_back(1);
    out.edges.push_back({farther, pred::kBehind, nearer});
    out.augmented.push_back(1);
    added += 2;
  }
  return out;
}

bool relation_holds(int predicate, const Box& a, const Box& b,
                    const AugmentConfig& cfg) {
  if (predicate < 0 || predicate >= pred::kNumTotal)
    throw DataError("relation_holds: predicate index " +
                    std::to_string(predicate) + " out of range");
  if (predicate < pred::kNumBase) return assign_predicate(a, b) == predicate;
  const bool overlaps =
      horizontal_overlap_ratio(a, b) >= cfg.overlap_threshold;
  if (!overlaps) return false;
  if (predicate == pred::kInFrontOf) return a.y1 > b.y1;
  return a.y1 < b.y1;  // behind
}

}  // namespace sglayout
