#include "sglayout/core.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "sglayout/errors.hpp"

namespace sglayout {

namespace {
const std::vector<std::string> kStandardPredicates = {
    "left of", "right of", "above",       "below",
    "inside",  "surrounding", "in front of", "behind"};
}

Vocab Vocab::make(std::vector<std::string> categories) {
  Vocab v;
  v.object_categories = std::move(categories);
  v.predicates = kStandardPredicates;
  v.validate();
  return v;
}

int Vocab::category_index(const std::string& name) const {
  const auto it = std::find(object_categories.begin(), object_categories.end(), name);
  return it == object_categories.end()
             ? -1
             : static_cast<int>(it - object_categories.begin());
}

int Vocab::predicate_index(const std::string& name) const {
  const auto it = std::find(predicates.begin(), predicates.end(), name);
  return it == predicates.end() ? -1 : static_cast<int>(it - predicates.begin());
}

void Vocab::validate() const {
  std::unordered_set<std::string> seen;
  for (const auto& c : object_categories) {
    if (!seen.insert(c).second)
      throw DataError("vocab: duplicate category name '" + c + "'");
  }
  seen.clear();
  for (const auto& p : predicates) {
    if (!seen.insert(p).second)
      throw DataError("vocab: duplicate predicate name '" + p + "'");
  }
  if (predicates.size() != kStandardPredicates.size())
    throw DataError("vocab: expected 8 predicates");
  for (std::size_t i = 0; i < kStandardPredicates.size(); ++i) {
    if (predicates[i] != kStandardPredicates[i])
      throw DataError("vocab: predicate '" + predicates[i] +
                      "' out of position " + std::to_string(i));
  }
}

bool Box::valid() const {
  return 0.0 <= x0 && x0 < x1 && x1 <= 1.0 && 0.0 <= y0 && y0 < y1 && y1 <= 1.0;
}

double box_area(const Box& b) { return (b.x1 - b.x0) * (b.y1 - b.y0); }

double box_iou(const Box& a, const Box& b) {
  const double ix0 = std::max(a.x0, b.x0);
  const double iy0 = std::max(a.y0, b.y0);
  const double ix1 = std::min(a.x1, b.x1);
  const double iy1 = std::min(a.y1, b.y1);
  const double iw = ix1 - ix0;
  const double ih = iy1 - iy0;
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = box_area(a) + box_area(b) - inter;
  return uni <= 0.0 ? 0.0 : inter / uni;
}

Box union_box(const Box& a, const Box& b) {
  return Box{std::min(a.x0, b.x0), std::min(a.y0, b.y0), std::max(a.x1, b.x1),
             std::max(a.y1, b.y1)};
}

MaskGrid MaskGrid::filled(int side, std::uint8_t value) {
  MaskGrid m;
  m.side = side;
  m.cells.assign(static_cast<std::size_t>(side) * side, value);
  return m;
}

int MaskGrid::foreground_count() const {
  int n = 0;
  for (const auto c : cells)
    if (c != 0) ++n;
  return n;
}

MaskGrid resample_mask(const MaskGrid& m, int side) {
  if (m.side == side) return m;
  MaskGrid out;
  out.side = side;
  out.cells.resize(static_cast<std::size_t>(side) * side);
  for (int r = 0; r < side; ++r) {
    const double v = (r + 0.5) / side;
    int sr = static_cast<int>(v * m.side);
    sr = std::min(sr, m.side - 1);
    for (int c = 0; c < side; ++c) {
      const double u = (c + 0.5) / side;
      int sc = static_cast<int>(u * m.side);
      sc = std::min(sc, m.side - 1);
      out.at(r, c) = m.at(sr, sc);
    }
  }
  return out;
}

void validate_scene(const Scene& s, int n_categories) {
  const int n = static_cast<int>(s.objects.size());
  if (n < 3 || n > 8)
    throw DataError("scene: object count " + std::to_string(n) +
                    " outside [3, 8]");
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    const auto& o = s.objects[i];
    const std::string tag = "scene object " + std::to_string(i);
    if (o.category < 0 || o.category >= n_categories)
      throw DataError(tag + ": category index out of range");
    if (!o.box.valid()) throw DataError(tag + ": invalid box");
    if (box_area(o.box) < 0.02) throw DataError(tag + ": box area < 0.02");
    if (o.mask.side < 1 ||
        o.mask.cells.size() != static_cast<std::size_t>(o.mask.side) * o.mask.side)
      throw DataError(tag + ": malformed mask grid");
    if (o.mask.foreground_count() == 0)
      throw DataError(tag + ": mask has no foreground cell");
    for (const auto c : o.mask.cells)
      if (c > 1) throw DataError(tag + ": mask cell outside {0,1}");
  }
}

void validate_graph(const SceneGraph& g, const Vocab& vocab) {
  const int n = g.n_nodes();
  if (g.augmented.size() != g.edges.size())
    throw DataError("graph: augmented flags not parallel to edges");
  for (const int c : g.node_categories) {
    if (c < 0 || c >= static_cast<int>(vocab.object_categories.size()))
      throw DataError("graph: node category out of range");
  }
  std::set<std::pair<int, int>> base_pairs;
  std::vector<char> covered(n, 0);
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    if (e.subject < 0 || e.subject >= n || e.object < 0 || e.object >= n)
      throw DataError("graph: edge endpoint out of range");
    if (e.subject == e.object) throw DataError("graph: self-edge");
    if (e.predicate < 0 ||
        e.predicate >= static_cast<int>(vocab.predicates.size()))
      throw DataError("graph: predicate index out of range");
    if (e.predicate < pred::kNumBase) {
      if (!base_pairs.insert({e.subject, e.object}).second)
        throw DataError("graph: duplicate base edge for ordered pair");
      if (g.augmented[i])
        throw DataError("graph: base predicate flagged as augmented");
    }
    covered[e.subject] = 1;
    covered[e.object] = 1;
  }
  for (int i = 0; i < n; ++i) {
    if (!covered[i])
      throw DataError("graph: node " + std::to_string(i) + " has no edge");
  }
}

}  // namespace sglayout
