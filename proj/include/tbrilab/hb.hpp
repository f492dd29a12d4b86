#pragma once

#include <cstdint>
#include <vector>

#include "tbrilab/lockset.hpp"
#include "tbrilab/program.hpp"

namespace tbrilab {

/// Per-thread logical counters, dense by ThreadId.
using VectorClock = std::vector<std::uint64_t>;

VectorClock vc_join(const VectorClock& a, const VectorClock& b);
bool vc_leq(const VectorClock& a, const VectorClock& b);

struct AccessRecord {
  EventType etype = EventType::Read;  // RD or WR
  ThreadId tid = 0;
  GranuleId granule;
  VectorClock clock;   // snapshot including the event itself
  Lockset lockset;
  std::uint32_t seq = 0;
};

/// True iff x is ordered before y: same thread (earlier seq), or x's clock is
/// component-wise contained in y's, the sync edges having been folded into
/// the clocks at replay.
bool hb_precedes(const AccessRecord& x, const AccessRecord& y);

struct RacyPair {
  std::uint32_t first_seq = 0;
  std::uint32_t second_seq = 0;
  GranuleId granule;

  friend bool operator==(const RacyPair&, const RacyPair&) = default;
  friend auto operator<=>(const RacyPair&, const RacyPair&) = default;
};

enum class HistoryMode {
  Exact,    // full access history per granule
  Bounded,  // 4 records per granule, FIFO eviction: demonstrates
            // metadata-overwrite false negatives
};

constexpr std::size_t kShadowSlots = 4;

/// Replays the trace into clocked access records.
std::vector<AccessRecord> replay_access_records(const Program& p, const Trace& t);

/// All pairs (X, Y) on the same granule with X before Y in the trace, no
/// happens-before order, disjoint locksets (a common lock counts only when
/// one side held it exclusively), and at least one write.
std::vector<RacyPair> exact_race_check(const Program& p, const Trace& t,
                                       HistoryMode mode = HistoryMode::Exact);

/// True iff some enumerated interleaving contains a racy pair.
bool ground_truth(const Program& p, std::size_t max_traces = 10000);

}  // namespace tbrilab
