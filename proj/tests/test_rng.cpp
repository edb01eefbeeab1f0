#include <doctest.h>

#include <cstdint>
#include <vector>

#include "sglayout/rng.hpp"

using namespace sglayout;

TEST_CASE("identical seeds give identical streams") {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
  Rng a(7), b(8);
  int same = 0;
  for (int i = 0; i < 100; ++i)
    if (a.next_u32() == b.next_u32()) ++same;
  CHECK(same < 5);
}

// Frozen golden vectors pin the algorithm; any change to the generator or
// the seeding procedure must fail here.
TEST_CASE("pcg32 golden vectors") {
  Rng rng(42);
  const std::vector<std::uint32_t> expected = {
      GOLDEN_U32_0, GOLDEN_U32_1, GOLDEN_U32_2, GOLDEN_U32_3, GOLDEN_U32_4};
  for (const auto want : expected) CHECK(rng.next_u32() == want);

  Rng u(123);
  CHECK(u.uniform() == doctest::Approx(GOLDEN_UNIFORM_0).epsilon(1e-15));
  CHECK(u.uniform() == doctest::Approx(GOLDEN_UNIFORM_1).epsilon(1e-15));

  Rng n(9);
  CHECK(n.normal(0.0, 1.0) == doctest::Approx(GOLDEN_NORMAL_0).epsilon(1e-12));
}

TEST_CASE("uniform stays in range") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    const double y = rng.uniform(2.0, 5.0);
    CHECK(y >= 2.0);
    CHECK(y <= 5.0);
  }
}

TEST_CASE("uniform_below covers the range") {
  Rng rng(4);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 7000; ++i) ++counts[rng.uniform_below(7)];
  for (const int c : counts) {
    CHECK(c > 700);
    CHECK(c < 1300);
  }
}

TEST_CASE("mix_seed derives independent keyed streams") {
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
  CHECK(mix_seed(1, 0) != mix_seed(2, 0));
  CHECK(mix_seed(5, 9) == mix_seed(5, 9));

  // Keyed streams do not depend on evaluation order.
  Rng direct(mix_seed(77, 3));
  Rng after_others(mix_seed(77, 3));
  for (int k = 0; k < 10; ++k) (void)Rng(mix_seed(77, k)).next_u32();
  for (int i = 0; i < 20; ++i)
    CHECK(direct.next_u32() == after_others.next_u32());
}

TEST_CASE("shuffle is deterministic") {
  std::vector<int> a{0, 1, 2, 3, 4, 5, 6, 7};
  std::vector<int> b = a;
  Rng ra(21), rb(21);
  ra.shuffle(a);
  rb.shuffle(b);
  CHECK(a == b);
}
