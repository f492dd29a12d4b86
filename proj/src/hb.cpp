#include "tbrilab/hb.hpp"

#include <algorithm>
#include <deque>

#include "tbrilab/interleave.hpp"

namespace tbrilab {

VectorClock vc_join(const VectorClock& a, const VectorClock& b) {
  VectorClock out(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t va = i < a.size() ? a[i] : 0;
    std::uint64_t vb = i < b.size() ? b[i] : 0;
    out[i] = std::max(va, vb);
  }
  return out;
}

bool vc_leq(const VectorClock& a, const VectorClock& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::uint64_t vb = i < b.size() ? b[i] : 0;
    if (a[i] > vb) return false;
  }
  return true;
}

bool hb_precedes(const AccessRecord& x, const AccessRecord& y) {
  if (x.tid == y.tid) return x.seq < y.seq;
  return vc_leq(x.clock, y.clock);
}

namespace {

struct LockClocks {
  VectorClock released_any;        // join over all releases
  VectorClock released_exclusive;  // join over exclusive releases only
};

}  // namespace

std::vector<AccessRecord> replay_access_records(const Program& p, const Trace& t) {
  std::uint32_t n = p.thread_count();
  std::vector<VectorClock> clocks(n, VectorClock(n, 0));
  std::vector<LockClocks> locks(p.locks.size(), LockClocks{VectorClock(n, 0), VectorClock(n, 0)});
  std::vector<Lockset> held(n);

  std::vector<AccessRecord> records;
  records.reserve(t.events.size());

  for (const Event& e : t.events) {
    VectorClock& c = clocks[e.tid];
    c[e.tid] += 1;
    switch (e.type) {
      case EventType::Read:
      case EventType::Write: {
        AccessRecord r;
        r.etype = e.type;
        r.tid = e.tid;
        r.granule = *e.target;
        r.clock = c;
        r.lockset = held[e.tid];
        r.seq = e.seq;
        records.push_back(std::move(r));
        break;
      }
      case EventType::LockAcquire: {
        LockMode mode = e.lock_mode.value_or(LockMode::Exclusive);
        const LockClocks& lc = locks[*e.lock];
        // A reader acquisition synchronizes only with exclusive releases;
        // reader-reader pairs create no edge.
        c = vc_join(c, mode == LockMode::Reader ? lc.released_exclusive : lc.released_any);
        held[e.tid].push_back(LockRef{*e.lock, mode});
        break;
      }
      case EventType::LockRelease: {
        LockMode mode = LockMode::Exclusive;
        auto& hs = held[e.tid];
        for (auto it = hs.begin(); it != hs.end(); ++it) {
          if (it->lock == *e.lock) {
            mode = it->mode;
            hs.erase(it);
            break;
          }
        }
        LockClocks& lc = locks[*e.lock];
        lc.released_any = vc_join(lc.released_any, c);
        if (mode == LockMode::Exclusive)
          lc.released_exclusive = vc_join(lc.released_exclusive, c);
        break;
      }
      case EventType::Spawn:
        clocks[*e.peer] = vc_join(clocks[*e.peer], c);
        break;
      case EventType::Join:
        c = vc_join(c, clocks[*e.peer]);
        break;
      case EventType::Alloc:
      case EventType::Free:
        break;
    }
  }
  return records;
}

namespace {

bool racy(const AccessRecord& x, const AccessRecord& y) {
  if (x.granule != y.granule) return false;
  if (x.etype != EventType::Write && y.etype != EventType::Write) return false;
  if (x.tid == y.tid) return false;
  if (locksets_share_exclusion(x.lockset, y.lockset)) return false;
  const AccessRecord& a = x.seq < y.seq ? x : y;
  const AccessRecord& b = x.seq < y.seq ? y : x;
  return !hb_precedes(a, b);
}

}  // namespace

std::vector<RacyPair> exact_race_check(const Program& p, const Trace& t, HistoryMode mode) {
  if (t.events.size() > kMaxEnumerableEvents)
    fail(Errc::TooLarge, "trace exceeds the event guard");
  auto records = replay_access_records(p, t);

  std::vector<RacyPair> pairs;
  if (mode == HistoryMode::Exact) {
    for (std::size_t j = 0; j < records.size(); ++j)
      for (std::size_t i = 0; i < j; ++i)
        if (racy(records[i], records[j]))
          pairs.push_back(RacyPair{records[i].seq, records[j].seq, records[j].granule});
  } else {
    // Shadow-cell mode: each incoming access is checked against at most
    // four retained records per granule; the oldest is evicted.
    std::vector<std::deque<std::size_t>> cells;
    auto cell_of = [&](GranuleId g) -> std::deque<std::size_t>& {
      std::size_t slot = 0;
      for (std::uint32_t pi = 0; pi < g.pointee; ++pi) slot += p.pointees[pi].granules;
      slot += g.index;
      if (cells.size() <= slot) cells.resize(slot + 1);
      return cells[slot];
    };
    for (std::size_t j = 0; j < records.size(); ++j) {
      auto& cell = cell_of(records[j].granule);
      for (std::size_t i : cell)
        if (racy(records[i], records[j]))
          pairs.push_back(RacyPair{records[i].seq, records[j].seq, records[j].granule});
      cell.push_back(j);
      if (cell.size() > kShadowSlots) cell.pop_front();
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

bool ground_truth(const Program& p, std::size_t max_traces) {
  bool found = false;
  enumerate_interleavings(p, max_traces, [&](const Trace& t) {
    if (!exact_race_check(p, t).empty()) {
      found = true;
      return false;
    }
    return true;
  });
  return found;
}

}  // namespace tbrilab
