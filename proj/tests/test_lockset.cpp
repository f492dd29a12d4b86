#include <doctest.h>

#include <algorithm>
#include <random>

#include "tbrilab/lockset.hpp"

using namespace tbrilab;

namespace {

Lockset ls(std::initializer_list<LockRef> refs) { return Lockset(refs); }

bool subset(const Lockset& a, const Lockset& b) {
  return std::all_of(a.begin(), a.end(),
                     [&](const LockRef& r) { return lockset_contains(b, r.lock); });
}

}  // namespace

TEST_SUITE("lockset") {

TEST_CASE("acquire unions, release subtracts") {
  ThreadLockset t;
  t.acquire(0, LockMode::Exclusive);
  CHECK(t.held() == ls({{0, LockMode::Exclusive}}));
  t.acquire(1, LockMode::Reader);
  CHECK(t.held().size() == 2);
  t.release(1);
  CHECK(t.held() == ls({{0, LockMode::Exclusive}}));
}

TEST_CASE("recursive acquire and unmatched release are errors") {
  ThreadLockset t;
  t.acquire(0, LockMode::Exclusive);
  try {
    t.acquire(0, LockMode::Reader);
    FAIL("expected recursive-lock error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::RecursiveLock);
  }
  ThreadLockset empty;
  try {
    empty.release(0);
    FAIL("expected unmatched-release error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnmatchedRelease);
  }
}

TEST_CASE("update_lockset_pointee: hand-executed transitions") {
  // empty meta, empty thread lockset: only the shared-prior-access flag flips
  PointeeMeta m1;
  update_lockset_pointee({}, m1);
  CHECK(m1.ls.empty());
  CHECK(m1.spa);

  // empty meta, non-empty lockset: assigned, spa reset
  PointeeMeta m2;
  update_lockset_pointee(ls({{0, LockMode::Exclusive}}), m2);
  CHECK(m2.ls == ls({{0, LockMode::Exclusive}}));
  CHECK_FALSE(m2.spa);

  // non-empty meta: intersection trims
  PointeeMeta m3;
  m3.ls = ls({{0, LockMode::Exclusive}, {1, LockMode::Reader}});
  update_lockset_pointee(ls({{0, LockMode::Exclusive}}), m3);
  CHECK(m3.ls == ls({{0, LockMode::Exclusive}}));
}

TEST_CASE("intersection is by lock id and keeps the weaker mode") {
  Lockset a = ls({{0, LockMode::Exclusive}});
  Lockset b = ls({{0, LockMode::Reader}});
  Lockset common = lockset_intersect(a, b);
  REQUIRE(common.size() == 1);
  CHECK(common[0].mode == LockMode::Reader);
  CHECK(lockset_intersect(ls({{0, LockMode::Exclusive}}), ls({{1, LockMode::Exclusive}})).empty());
}

TEST_CASE("lockset check: first access with a mutex is Exclusive") {
  PointeeMeta meta;
  CHECK(handle_lockset_check(ls({{0, LockMode::Exclusive}}), meta) == LocksetState::Exclusive);
  CHECK(meta.ls == ls({{0, LockMode::Exclusive}}));
  CHECK_FALSE(meta.spa);
}

TEST_CASE("lockset check: lock-free access against a locked history is Inconclusive") {
  PointeeMeta meta;
  meta.ls = ls({{0, LockMode::Exclusive}});
  CHECK(handle_lockset_check({}, meta) == LocksetState::Inconclusive);
  CHECK(meta.ls == ls({{0, LockMode::Exclusive}}));  // no trim on the inconclusive path
}

TEST_CASE("lockset check: reader lock against reader history is Shared") {
  PointeeMeta meta;
  meta.ls = ls({{2, LockMode::Reader}});
  CHECK(handle_lockset_check(ls({{2, LockMode::Reader}}), meta) == LocksetState::Shared);
}

TEST_CASE("lockset check: first-ever lock-free access is conclusive and sets spa") {
  PointeeMeta meta;
  CHECK(handle_lockset_check({}, meta) == LocksetState::Exclusive);
  CHECK(meta.spa);
  CHECK(meta.ls.empty());
  // every later check is Inconclusive, whatever the lockset
  CHECK(handle_lockset_check(ls({{0, LockMode::Exclusive}}), meta) == LocksetState::Inconclusive);
  CHECK(handle_lockset_check({}, meta) == LocksetState::Inconclusive);
}

TEST_CASE("spa=true and a non-empty history never co-occur") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 200; ++round) {
    PointeeMeta meta;
    for (int step = 0; step < 50; ++step) {
      Lockset held;
      for (std::uint32_t l = 0; l < 3; ++l)
        if (rng() % 2) held.push_back({l, rng() % 2 ? LockMode::Reader : LockMode::Exclusive});
      handle_lockset_check(held, meta);
      bool co_occur = meta.spa && !meta.ls.empty();
      CHECK_FALSE(co_occur);
    }
  }
}

TEST_CASE("trimming monotonicity: once non-empty, the history only shrinks") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 200; ++round) {
    PointeeMeta meta;
    Lockset previous;
    bool assigned = false;
    for (int step = 0; step < 60; ++step) {
      Lockset held;
      for (std::uint32_t l = 0; l < 4; ++l)
        if (rng() % 2) held.push_back({l, rng() % 2 ? LockMode::Reader : LockMode::Exclusive});
      handle_lockset_check(held, meta);
      if (assigned) CHECK(subset(meta.ls, previous));
      if (!meta.ls.empty()) {
        assigned = true;
        previous = meta.ls;
      }
    }
  }
}

TEST_CASE("repeated checks with identical inputs stabilize after the first mutation") {
  std::mt19937_64 rng(13);
  for (int round = 0; round < 100; ++round) {
    PointeeMeta meta;
    if (rng() % 2) meta.ls = ls({{0, rng() % 2 ? LockMode::Reader : LockMode::Exclusive}});
    else meta.spa = rng() % 2;
    Lockset held;
    for (std::uint32_t l = 0; l < 2; ++l)
      if (rng() % 2) held.push_back({l, rng() % 2 ? LockMode::Reader : LockMode::Exclusive});
    LocksetState first = handle_lockset_check(held, meta);
    LocksetState second = handle_lockset_check(held, meta);
    LocksetState third = handle_lockset_check(held, meta);
    (void)first;
    CHECK(second == third);
  }
}

TEST_CASE("conclusive states with prior history require a common-lock witness") {
  std::mt19937_64 rng(17);
  for (int round = 0; round < 300; ++round) {
    PointeeMeta meta;
    for (std::uint32_t l = 0; l < 3; ++l)
      if (rng() % 2) meta.ls.push_back({l, rng() % 2 ? LockMode::Reader : LockMode::Exclusive});
    Lockset before = meta.ls;
    Lockset held;
    for (std::uint32_t l = 0; l < 3; ++l)
      if (rng() % 2) held.push_back({l, rng() % 2 ? LockMode::Reader : LockMode::Exclusive});
    LocksetState state = handle_lockset_check(held, meta);
    if (!before.empty() && state != LocksetState::Inconclusive)
      CHECK_FALSE(lockset_intersect(held, before).empty());
  }
}

TEST_CASE("shared-exclusion predicate: reader-reader overlap excludes nothing") {
  CHECK(locksets_share_exclusion(ls({{0, LockMode::Exclusive}}), ls({{0, LockMode::Exclusive}})));
  CHECK(locksets_share_exclusion(ls({{0, LockMode::Exclusive}}), ls({{0, LockMode::Reader}})));
  CHECK_FALSE(locksets_share_exclusion(ls({{0, LockMode::Reader}}), ls({{0, LockMode::Reader}})));
  CHECK_FALSE(locksets_share_exclusion(ls({{0, LockMode::Exclusive}}), ls({{1, LockMode::Exclusive}})));
}

}  // TEST_SUITE
