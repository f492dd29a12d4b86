#include <doctest.h>

#include <set>
#include <sstream>

#include "tbrilab/interleave.hpp"
#include "tbrilab/json_io.hpp"

using namespace tbrilab;

namespace {

// k threads with one access each.
std::string independent_threads(int k) {
  std::ostringstream os;
  os << "pointee A size 16\n";
  for (int t = 1; t <= k; ++t) os << "thread t" << t << " {\n  write A\n}\n";
  return os.str();
}

std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

}  // namespace

TEST_SUITE("interleave") {

TEST_CASE("choice-point counts match the closed forms") {
  CHECK(enumerate_interleavings(parse_program(independent_threads(2)), 100).size() == 2);

  // 2 threads x 2 events each: C(4,2) = 6
  Program p2 = parse_program(
      "pointee A size 16\n"
      "thread t1 {\n read A\n write A\n}\n"
      "thread t2 {\n read A\n write A\n}\n");
  CHECK(enumerate_interleavings(p2, 100).size() == 6);

  // single thread: one order
  Program p1 = parse_program("pointee A size 16\nthread t1 {\n read A\n write A\n read A\n}\n");
  CHECK(enumerate_interleavings(p1, 100).size() == 1);

  for (int k = 2; k <= 4; ++k)
    CHECK(enumerate_interleavings(parse_program(independent_threads(k)), 100).size() ==
          factorial(k));
}

TEST_CASE("every enumerated trace is valid and distinct") {
  Program p = parse_program(
      "pointee A size 32\n"
      "lock m kind mutex\n"
      "thread t1 {\n acquire m\n write A\n release m\n}\n"
      "thread t2 {\n read A+16\n acquire m\n write A\n release m\n}\n");
  auto traces = enumerate_interleavings(p, 10000);
  REQUIRE(!traces.empty());
  std::set<std::string> seen;
  for (const Trace& t : traces) {
    validate_trace(p, t);
    CHECK(seen.insert(trace_to_json(p, t)).second);
  }
}

TEST_CASE("max_traces caps the enumeration") {
  Program p = parse_program(independent_threads(4));
  CHECK(enumerate_interleavings(p, 5).size() == 5);
}

TEST_CASE("random_schedule is deterministic and a member of the enumerable set") {
  Program p = parse_program(
      "pointee A size 16\n"
      "lock m kind mutex\n"
      "thread t1 {\n acquire m\n write A\n release m\n write A\n}\n"
      "thread t2 {\n write A\n}\n");
  Trace a = random_schedule(p, 7);
  Trace b = random_schedule(p, 7);
  CHECK(trace_to_json(p, a) == trace_to_json(p, b));
  validate_trace(p, a);

  std::set<std::string> all;
  for (const Trace& t : enumerate_interleavings(p, 100000)) all.insert(trace_to_json(p, t));
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    CHECK(all.count(trace_to_json(p, random_schedule(p, seed))) == 1);
}

TEST_CASE("a single-threaded program has one schedule for any seed") {
  Program p = parse_program("pointee A size 16\nthread t1 {\n write A\n read A\n}\n");
  std::string expect = trace_to_json(p, random_schedule(p, 1));
  for (std::uint64_t seed = 2; seed < 20; ++seed)
    CHECK(trace_to_json(p, random_schedule(p, seed)) == expect);
}

TEST_CASE("exclusive sections never overlap; reader sections may") {
  Program p = parse_program(
      "pointee A size 16\n"
      "lock rw kind rwlock\n"
      "thread t1 {\n acquire rw read\n read A\n release rw\n}\n"
      "thread t2 {\n acquire rw read\n read A\n release rw\n}\n"
      "thread t3 {\n acquire rw write\n write A\n release rw\n}\n");
  bool reader_overlap = false;
  for (const Trace& t : enumerate_interleavings(p, 100000)) {
    validate_trace(p, t);  // checks exclusion
    int readers = 0;
    for (const Event& e : t.events) {
      if (e.type == EventType::LockAcquire) {
        if (*e.lock_mode == LockMode::Reader) {
          ++readers;
          if (readers == 2) reader_overlap = true;
        }
      } else if (e.type == EventType::LockRelease && readers > 0) {
        --readers;
      }
    }
  }
  CHECK(reader_overlap);
}

TEST_CASE("programs whose every completion deadlocks are rejected") {
  Program p = parse_program(
      "pointee A size 16\n"
      "thread main {\n spawn t1\n spawn t2\n read A\n}\n"
      "thread t1 {\n join t2\n}\n"
      "thread t2 {\n join t1\n}\n");
  try {
    enumerate_interleavings(p, 100);
    FAIL("expected deadlock error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Deadlock);
  }
  CHECK_THROWS_AS(random_schedule(p, 3), Error);
}

TEST_CASE("the event-count guard rejects oversized programs") {
  std::ostringstream os;
  os << "pointee A size 16\n";
  for (int t = 1; t <= 3; ++t) {
    os << "thread t" << t << " {\n";
    for (int i = 0; i < 30; ++i) os << "  write A\n";
    os << "}\n";
  }
  Program p = parse_program(os.str());
  try {
    enumerate_interleavings(p, 10);
    FAIL("expected too-large error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TooLarge);
  }
}

TEST_CASE("validate_trace rejects corrupted traces") {
  Program p = parse_program(
      "pointee A size 16\n"
      "thread t1 {\n write A\n read A\n}\n"
      "thread t2 {\n write A\n}\n");
  Trace good = enumerate_interleavings(p, 1)[0];
  validate_trace(p, good);

  Trace reordered = good;  // swap t1's two accesses: violates program order
  std::size_t first = 0, second = 0;
  for (std::size_t i = 0; i < reordered.events.size(); ++i) {
    if (reordered.events[i].is_access() && reordered.events[i].tid == 1) {
      if (!first) first = i;
      else second = i;
    }
  }
  std::swap(reordered.events[first].type, reordered.events[second].type);
  CHECK_THROWS_AS(validate_trace(p, reordered), Error);

  Trace truncated = good;
  truncated.events.pop_back();
  CHECK_THROWS_AS(validate_trace(p, truncated), Error);

  Trace renumbered = good;
  renumbered.events.back().seq += 1;
  CHECK_THROWS_AS(validate_trace(p, renumbered), Error);
}

TEST_CASE("spawned threads only run between spawn and join") {
  Program p = parse_program(
      "pointee A size 16\n"
      "thread main {\n spawn t1\n join t1\n read A\n}\n"
      "thread t1 {\n write A\n}\n");
  auto traces = enumerate_interleavings(p, 100);
  REQUIRE(traces.size() == 1);
  const Trace& t = traces[0];
  // alloc, spawn, write, join, read, free
  REQUIRE(t.events.size() == 6);
  CHECK(t.events[1].type == EventType::Spawn);
  CHECK(t.events[2].type == EventType::Write);
  CHECK(t.events[2].tid == 1);
  CHECK(t.events[3].type == EventType::Join);
  CHECK(t.events[4].type == EventType::Read);
  CHECK(t.events[4].tid == 0);
}

}  // TEST_SUITE
