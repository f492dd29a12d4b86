#include <doctest.h>

#include "tbrilab/tagged_memory.hpp"

using namespace tbrilab;

TEST_SUITE("tagged_memory") {

TEST_CASE("pad_pointee rounds up to the next granule") {
  CHECK(pad_pointee(1) == 16);
  CHECK(pad_pointee(24) == 32);
  CHECK(pad_pointee(256) == 256);
  CHECK_THROWS_WITH_AS(pad_pointee(0), doctest::Contains("size"), Error);
}

TEST_CASE("pad_pointee properties") {
  for (std::uint64_t n = 1; n <= 1024; ++n) {
    std::uint64_t padded = pad_pointee(n);
    CHECK(padded % 16 == 0);
    CHECK(padded - n < 16);
    CHECK(padded >= 16);
  }
}

TEST_CASE("alloc clears all granules of the padded allocation") {
  TaggedMemory mem;
  auto granules = mem.alloc(0, 20);
  REQUIRE(granules.size() == 2);
  for (GranuleId g : granules) {
    CHECK(mem.live(g));
    CHECK(mem.granule_tag(g).untagged());
  }
  auto single = mem.alloc(1, 16);
  CHECK(single.size() == 1);
}

TEST_CASE("duplicate allocation is rejected") {
  TaggedMemory mem;
  mem.alloc(0, 16);
  try {
    mem.alloc(0, 16);
    FAIL("expected duplicate-allocation error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DuplicateAllocation);
  }
}

TEST_CASE("set_granule_tag writes and rejects the reserved value") {
  TaggedMemory mem;
  auto g = mem.alloc(0, 16)[0];
  mem.set_granule_tag(g, Tag::of(3));
  CHECK(mem.granule_tag(g).value() == 3);
  mem.set_granule_tag(g, Tag::of(0));
  CHECK(mem.granule_tag(g).untagged());
  try {
    mem.set_granule_tag(g, Tag::of(15));
    FAIL("expected reserved-tag error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ReservedTag);
  }
}

TEST_CASE("dead granules are errors, not faults") {
  TaggedMemory mem;
  auto g = mem.alloc(0, 16)[0];
  mem.free_pointee(0);
  try {
    mem.set_granule_tag(g, Tag::of(1));
    FAIL("expected dead-granule error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DeadGranule);
  }
  TaggedRef ref{0, 0, g, Tag::of(2)};
  try {
    mem.access(ref, AccessKind::Read);
    FAIL("expected dead-granule error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DeadGranule);
  }
}

TEST_CASE("tag_check is plain tag equality") {
  TaggedMemory mem;
  auto g = mem.alloc(0, 16)[0];
  mem.set_granule_tag(g, Tag::of(3));
  CHECK(mem.tag_check(Tag::of(3), g));
  CHECK_FALSE(mem.tag_check(Tag::of(0), g));
  mem.set_granule_tag(g, Tag::of(0));
  CHECK(mem.tag_check(Tag::of(0), g));
}

TEST_CASE("access faults exactly when tag_check fails: full sweep") {
  TaggedMemory mem;
  auto g = mem.alloc(0, 16)[0];
  for (unsigned gt = 0; gt <= 14; ++gt) {
    mem.set_granule_tag(g, Tag::of(gt));
    for (unsigned rt = 0; rt <= 15; ++rt) {
      TaggedRef ref{0, 1, g, Tag::of(rt)};
      auto fault = mem.access(ref, AccessKind::Write);
      CHECK(fault.has_value() == !mem.tag_check(ref.tag, g));
      if (fault) {
        CHECK(fault->granule == g);
        CHECK(fault->ref_tag.value() == rt);
        CHECK(fault->granule_tag.value() == gt);
        CHECK(fault->thread == 1);
        CHECK(fault->kind == AccessKind::Write);
      }
    }
  }
}

TEST_CASE("matching access carries no fault") {
  TaggedMemory mem;
  auto g = mem.alloc(0, 16)[0];
  mem.set_granule_tag(g, Tag::of(2));
  TaggedRef ref{0, 0, g, Tag::of(2)};
  CHECK_FALSE(mem.access(ref, AccessKind::Read).has_value());
  ref.tag = Tag::of(0);
  auto fault = mem.access(ref, AccessKind::Read);
  REQUIRE(fault.has_value());
  CHECK(fault->ref_tag.value() == 0);
  CHECK(fault->granule_tag.value() == 2);
}

}  // TEST_SUITE
