#pragma once

#include "sglayout/core.hpp"
#include "sglayout/rng.hpp"

namespace sglayout {

struct AugmentConfig {
  bool enabled = false;
  // Minimal horizontal-interval overlap (relative to the shorter interval)
  // for a pair to receive depth edges.
  double overlap_threshold = 0.2;
  // Cap on augmented edges per scene; < 0 means 2x the base edge count.
  int max_augmented = -1;
};

// Exactly one of the six base predicates, such that "a <predicate> b" holds.
// Containment is checked first; otherwise the centroid delta quadrant
// decides. Identical centroids without containment fall back to "left of".
int assign_predicate(const Box& a, const Box& b);

// Overlap of the horizontal intervals divided by the shorter interval.
double horizontal_overlap_ratio(const Box& a, const Box& b);

// Nodes mirror scene objects in order. Each node draws edges_per_node
// distinct partners without replacement; edge direction is a coin flip and
// duplicate ordered pairs are dropped. Throws DataError for < 2 objects.
SceneGraph build_scene_graph(const Scene& s, Rng& rng, int edges_per_node);

// Adds <nearer, "in front of", farther> / <farther, "behind", nearer> edges
// for pairs whose horizontal overlap passes the threshold, ordered by
// descending overlap, up to the cap. The object with the larger bottom edge
// (y1) is nearer; ties produce no depth order. Base edges are untouched.
SceneGraph augment_graph(const Scene& s, const SceneGraph& g,
                         const AugmentConfig& cfg);

// True iff the rule that generates `predicate` also generates it for (a, b).
bool relation_holds(int predicate, const Box& a, const Box& b,
                    const AugmentConfig& cfg);

}  // namespace sglayout
