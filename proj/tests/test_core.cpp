#include <doctest.h>

#include "sglayout/core.hpp"
#include "sglayout/errors.hpp"
#include "sglayout/rng.hpp"
#include "test_util.hpp"

using namespace sglayout;

TEST_CASE("box_area basics") {
  CHECK(box_area({0, 0, 1, 1}) == doctest::Approx(1.0));
  CHECK(box_area({0.25, 0.25, 0.75, 0.75}) == doctest::Approx(0.25));
  CHECK(box_area({0.1, 0.2, 0.3, 0.9}) == doctest::Approx(0.14));
}

TEST_CASE("box_iou examples") {
  const Box unit{0, 0, 1, 1};
  CHECK(box_iou(unit, unit) == 1.0);
  CHECK(box_iou(unit, {0.5, 0, 1, 1}) == doctest::Approx(0.5));
  CHECK(box_iou({0, 0, 0.4, 0.4}, {0.6, 0.6, 1, 1}) == 0.0);
}

TEST_CASE("box_iou properties") {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const Box a = testutil::random_box(rng);
    const Box b = testutil::random_box(rng);
    const double ab = box_iou(a, b);
    CHECK(ab == box_iou(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(box_iou(a, a) == 1.0);
    if (!(a == b)) CHECK(ab < 1.0);
  }
}

TEST_CASE("union_box examples and properties") {
  const Box a{0.1, 0.1, 0.3, 0.3};
  const Box b{0.2, 0.2, 0.6, 0.5};
  CHECK(union_box(a, a) == a);
  CHECK(union_box(a, b) == Box{0.1, 0.1, 0.6, 0.5});
  CHECK(union_box(a, b) == union_box(b, a));

  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    const Box x = testutil::random_box(rng);
    const Box y = testutil::random_box(rng);
    const Box u = union_box(x, y);
    CHECK(u.x0 <= std::min(x.x0, y.x0));
    CHECK(u.x1 >= std::max(x.x1, y.x1));
    CHECK(box_area(u) >= std::max(box_area(x), box_area(y)));
  }
}

TEST_CASE("mask resample keeps cell-center semantics") {
  MaskGrid m = MaskGrid::filled(2, 0);
  m.at(0, 0) = 1;  // top-left quadrant only
  const MaskGrid up = resample_mask(m, 4);
  CHECK(up.at(0, 0) == 1);
  CHECK(up.at(1, 1) == 1);
  CHECK(up.at(0, 2) == 0);
  CHECK(up.at(3, 3) == 0);
  CHECK(resample_mask(m, 2) == m);
}

TEST_CASE("scene validation") {
  Rng rng(5);
  Scene s = testutil::random_scene(rng, 4, 3);
  CHECK_NOTHROW(validate_scene(s, 3));

  Scene two = s;
  two.objects.resize(2);
  CHECK_THROWS_AS(validate_scene(two, 3), DataError);

  Scene tiny = s;
  tiny.objects[0].box = {0.1, 0.1, 0.15, 0.15};  // area 0.0025
  CHECK_THROWS_AS(validate_scene(tiny, 3), DataError);

  Scene empty_mask = s;
  empty_mask.objects[0].mask = MaskGrid::filled(4, 0);
  CHECK_THROWS_AS(validate_scene(empty_mask, 3), DataError);
}

TEST_CASE("vocab layout") {
  const Vocab v = Vocab::make({"sky", "road"});
  CHECK(v.predicates[pred::kLeftOf] == "left of");
  CHECK(v.predicates[pred::kSurrounding] == "surrounding");
  CHECK(v.predicates[pred::kInFrontOf] == "in front of");
  CHECK(v.predicates[pred::kBehind] == "behind");
  CHECK(v.category_index("road") == 1);
  CHECK(v.category_index("tree") == -1);
  CHECK_THROWS_AS(Vocab::make({"sky", "sky"}), DataError);
}

TEST_CASE("graph validation") {
  const Vocab v = testutil::test_vocab(3);
  SceneGraph g;
  g.node_categories = {0, 1, 2};
  g.edges = {{0, pred::kLeftOf, 1}, {2, pred::kAbove, 0}};
  g.augmented = {0, 0};
  CHECK_NOTHROW(validate_graph(g, v));

  SceneGraph dup = g;
  dup.edges.push_back({0, pred::kBelow, 1});
  dup.augmented.push_back(0);
  CHECK_THROWS_AS(validate_graph(dup, v), DataError);

  SceneGraph uncovered = g;
  uncovered.edges.pop_back();
  uncovered.augmented.pop_back();
  CHECK_THROWS_AS(validate_graph(uncovered, v), DataError);

  SceneGraph self_edge = g;
  self_edge.edges[0] = {1, pred::kLeftOf, 1};
  CHECK_THROWS_AS(validate_graph(self_edge, v), DataError);
}
