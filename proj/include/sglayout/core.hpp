#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sglayout {

// Predicate vocabulary positions are fixed: the six base geometric relations
// occupy indices 0-5, the two depth-augmentation relations 6-7.
namespace pred {
constexpr int kLeftOf = 0;
constexpr int kRightOf = 1;
constexpr int kAbove = 2;
constexpr int kBelow = 3;
constexpr int kInside = 4;
constexpr int kSurrounding = 5;
constexpr int kInFrontOf = 6;
constexpr int kBehind = 7;
constexpr int kNumBase = 6;
constexpr int kNumTotal = 8;
}  // namespace pred

struct Vocab {
  std::vector<std::string> object_categories;
  std::vector<std::string> predicates;

  // Standard predicate list plus the given categories.
  static Vocab make(std::vector<std::string> categories);

  int category_index(const std::string& name) const;  // -1 if unknown
  int predicate_index(const std::string& name) const;
  void validate() const;  // throws DataError on duplicate/misplaced names
};

// Axis-aligned box in the unit square. Image convention: y grows downward.
struct Box {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  bool valid() const;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double cx() const { return 0.5 * (x0 + x1); }
  double cy() const { return 0.5 * (y0 + y1); }
  bool operator==(const Box&) const = default;
};

double box_area(const Box& b);
double box_iou(const Box& a, const Box& b);

// Tight enclosing box of both arguments (the ground-truth superbox).
Box union_box(const Box& a, const Box& b);

// Row-major side x side grid. Binary masks use {0,1}; triplet masks use
// {0,1,2} = {background, subject, object}.
struct MaskGrid {
  int side = 0;
  std::vector<std::uint8_t> cells;

  static MaskGrid filled(int side, std::uint8_t value = 1);
  std::uint8_t at(int row, int col) const { return cells[static_cast<std::size_t>(row) * side + col]; }
  std::uint8_t& at(int row, int col) { return cells[static_cast<std::size_t>(row) * side + col]; }
  int foreground_count() const;
  bool operator==(const MaskGrid&) const = default;
};

// Nearest-cell resample onto a new resolution (samples source at the
// centers of the destination cells).
MaskGrid resample_mask(const MaskGrid& m, int side);

struct ObjectInstance {
  int category = 0;
  Box box;
  MaskGrid mask;  // aligned to the box extent
  bool operator==(const ObjectInstance&) const = default;
};

struct Scene {
  std::vector<ObjectInstance> objects;
  bool operator==(const Scene&) const = default;
};

// Scene invariants after ingestion filters: 3-8 objects, every box valid with
// area >= 0.02, masks non-empty, categories in range. Throws DataError.
void validate_scene(const Scene& s, int n_categories);

struct Triplet {
  int subject = 0;
  int predicate = 0;
  int object = 0;
  bool operator==(const Triplet&) const = default;
};

struct SceneGraph {
  std::vector<int> node_categories;
  std::vector<Triplet> edges;
  std::vector<std::uint8_t> augmented;  // parallel to edges

  int n_nodes() const { return static_cast<int>(node_categories.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
};

// Index ranges, subject != object, at most one base edge per ordered pair,
// every node covered by at least one edge. Throws DataError.
void validate_graph(const SceneGraph& g, const Vocab& vocab);

}  // namespace sglayout
