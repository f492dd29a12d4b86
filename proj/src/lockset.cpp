#include "tbrilab/lockset.hpp"

#include <algorithm>

namespace tbrilab {

bool lockset_contains(const Lockset& ls, std::uint32_t lock) {
  return std::any_of(ls.begin(), ls.end(),
                     [&](const LockRef& r) { return r.lock == lock; });
}

Lockset lockset_intersect(const Lockset& a, const Lockset& b) {
  Lockset out;
  for (const LockRef& ra : a) {
    for (const LockRef& rb : b) {
      if (ra.lock == rb.lock) {
        LockMode mode = (ra.mode == LockMode::Reader || rb.mode == LockMode::Reader)
                            ? LockMode::Reader
                            : LockMode::Exclusive;
        out.push_back(LockRef{ra.lock, mode});
        break;
      }
    }
  }
  return out;
}

bool has_reader_locks(const Lockset& ls) {
  return std::any_of(ls.begin(), ls.end(),
                     [](const LockRef& r) { return r.mode == LockMode::Reader; });
}

bool locksets_share_exclusion(const Lockset& a, const Lockset& b) {
  for (const LockRef& ra : a)
    for (const LockRef& rb : b)
      if (ra.lock == rb.lock &&
          (ra.mode == LockMode::Exclusive || rb.mode == LockMode::Exclusive))
        return true;
  return false;
}

void ThreadLockset::insert_sorted(std::uint32_t lock, LockMode mode) {
  auto it = std::lower_bound(held_.begin(), held_.end(), lock,
                             [](const LockRef& r, std::uint32_t l) { return r.lock < l; });
  held_.insert(it, LockRef{lock, mode});
}

const char* to_string(LocksetState s) {
  switch (s) {
    case LocksetState::Inconclusive: return "Inconclusive";
    case LocksetState::Exclusive: return "Exclusive";
    case LocksetState::Shared: return "Shared";
  }
  return "?";
}

void update_lockset_pointee(const Lockset& ls_tau, PointeeMeta& meta) {
  if (meta.ls.empty()) {
    if (ls_tau.empty()) {
      // Accessed before with reader-shared lock or no lock.
      meta.spa = true;
    } else {
      meta.spa = false;
      meta.ls = ls_tau;
    }
  } else {
    meta.ls = lockset_intersect(meta.ls, ls_tau);
  }
}

LocksetState handle_lockset_check(const Lockset& ls_tau, PointeeMeta& meta) {
  if (meta.ls.empty() && meta.spa) return LocksetState::Inconclusive;  // maybe-racy
  if (meta.ls.empty() || !lockset_intersect(ls_tau, meta.ls).empty()) {
    update_lockset_pointee(ls_tau, meta);
    if (has_reader_locks(lockset_intersect(ls_tau, meta.ls)))
      return LocksetState::Shared;
    return LocksetState::Exclusive;
  }
  return LocksetState::Inconclusive;  // maybe-racy
}

}  // namespace tbrilab
