#pragma once

#include <cstdint>
#include <vector>

#include "tbrilab/error.hpp"
#include "tbrilab/program.hpp"

namespace tbrilab {

/// A held lock with its acquisition mode.
struct LockRef {
  std::uint32_t lock = 0;
  LockMode mode = LockMode::Exclusive;

  friend bool operator==(const LockRef&, const LockRef&) = default;
};

/// Small sorted-by-lock-id set.
using Lockset = std::vector<LockRef>;

bool lockset_contains(const Lockset& ls, std::uint32_t lock);

/// Lock-id intersection. A lock common to both sides survives with the
/// weaker (reader) mode if either side held it as reader.
Lockset lockset_intersect(const Lockset& a, const Lockset& b);

bool has_reader_locks(const Lockset& ls);

/// Mutual-exclusion test for a lock common to two locksets: it synchronizes
/// the pair only if at least one side held it exclusively. Two overlapping
/// reader sections exclude nothing.
bool locksets_share_exclusion(const Lockset& a, const Lockset& b);

/// Currently held locks of one thread; driven by LA/LR events only.
class ThreadLockset {
public:
  const Lockset& held() const { return held_; }
  bool empty() const { return held_.empty(); }

  void acquire(std::uint32_t lock, LockMode mode) {
    if (lockset_contains(held_, lock))
      fail(Errc::RecursiveLock, "recursive acquire");
    insert_sorted(lock, mode);
  }

  void release(std::uint32_t lock) {
    for (auto it = held_.begin(); it != held_.end(); ++it) {
      if (it->lock == lock) {
        held_.erase(it);
        return;
      }
    }
    fail(Errc::UnmatchedRelease, "release of a lock that is not held");
  }

private:
  void insert_sorted(std::uint32_t lock, LockMode mode);
  Lockset held_;
};

/// Per-pointee minimal historical lockset plus the shared-prior-access flag.
/// `ls` only shrinks after its first non-empty assignment; spa and a
/// non-empty ls never co-occur. Updates need no lock: the detector replays
/// one totally ordered trace.
struct PointeeMeta {
  Lockset ls;
  bool spa = false;
};

enum class LocksetState { Inconclusive, Exclusive, Shared };

const char* to_string(LocksetState s);

/// Update-or-trim step of the lockset analysis.
void update_lockset_pointee(const Lockset& ls_tau, PointeeMeta& meta);

/// Tri-state lockset check run at segment setup. Mutates meta on the
/// conclusive paths exactly as update_lockset_pointee does.
LocksetState handle_lockset_check(const Lockset& ls_tau, PointeeMeta& meta);

}  // namespace tbrilab
