#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tbrilab/program.hpp"

namespace tbrilab {

/// Total-event guard for exhaustive enumeration.
constexpr std::uint32_t kMaxEnumerableEvents = 64;

/// Yields every distinct valid interleaving of `p`: program order per thread,
/// spawn/join ordering, lock mutual exclusion. Access and lock events are the
/// scheduling choice points, branched in ascending ThreadId order; structural
/// events (alloc/free/spawn/join) fire eagerly as soon as they are runnable.
/// Stops after `max_traces` or when `sink` returns false. Throws Deadlock if
/// every completion of the program deadlocks.
void enumerate_interleavings(const Program& p, std::size_t max_traces,
                             const std::function<bool(const Trace&)>& sink);

std::vector<Trace> enumerate_interleavings(const Program& p, std::size_t max_traces);

/// One valid interleaving drawn by seeded uniform choice among runnable
/// threads; identical seed, identical trace.
Trace random_schedule(const Program& p, std::uint64_t seed);

/// Checks the Trace invariants (per-thread program order, join-after-last,
/// nesting, lock exclusion, dense seq). Throws Validation on violation.
void validate_trace(const Program& p, const Trace& t);

}  // namespace tbrilab
