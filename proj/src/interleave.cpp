#include "tbrilab/interleave.hpp"

#include <algorithm>
#include <random>

namespace tbrilab {

namespace {

Event event_for(const Program& p, ThreadId tid, const Stmt& s, std::uint32_t seq) {
  Event e;
  e.tid = tid;
  e.seq = seq;
  switch (s.kind) {
    case StmtKind::Read:
    case StmtKind::Write:
      e.type = s.kind == StmtKind::Read ? EventType::Read : EventType::Write;
      e.target = p.granule_for(s.pointee, s.offset);
      e.offset = s.offset;
      e.alias = s.alias;
      break;
    case StmtKind::Acquire:
      e.type = EventType::LockAcquire;
      e.lock = s.lock;
      e.lock_mode = s.mode;
      break;
    case StmtKind::Release:
      e.type = EventType::LockRelease;
      e.lock = s.lock;
      break;
    case StmtKind::Spawn:
      e.type = EventType::Spawn;
      e.peer = s.peer;
      break;
    case StmtKind::Join:
      e.type = EventType::Join;
      e.peer = s.peer;
      break;
    case StmtKind::Alloc:
      e.type = EventType::Alloc;
      e.pointee = s.pointee;
      break;
    case StmtKind::Free:
      e.type = EventType::Free;
      e.pointee = s.pointee;
      break;
  }
  return e;
}

bool is_structural(StmtKind k) {
  return k == StmtKind::Spawn || k == StmtKind::Join || k == StmtKind::Alloc ||
         k == StmtKind::Free;
}

struct LockState {
  int readers = 0;
  bool exclusive = false;
};

class Scheduler {
public:
  explicit Scheduler(const Program& p) : p_(p) {
    pc_.assign(p.thread_count(), 0);
    started_.assign(p.thread_count(), false);
    started_[0] = true;
    locks_.assign(p.locks.size(), LockState{});
  }

  bool finished(ThreadId t) const { return pc_[t] == p_.threads[t].size(); }

  bool all_finished() const {
    for (ThreadId t = 0; t < p_.thread_count(); ++t)
      if (!finished(t)) return false;
    return true;
  }

  bool runnable(ThreadId t) const {
    if (!started_[t] || finished(t)) return false;
    const Stmt& s = p_.threads[t][pc_[t]];
    switch (s.kind) {
      case StmtKind::Acquire: {
        const LockState& ls = locks_[s.lock];
        if (ls.exclusive) return false;
        return s.mode == LockMode::Reader || ls.readers == 0;
      }
      case StmtKind::Join:
        return started_[s.peer] && finished(s.peer);
      default:
        return true;
    }
  }

  /// Lowest runnable thread whose next statement is structural, if any.
  std::optional<ThreadId> forced() const {
    for (ThreadId t = 0; t < p_.thread_count(); ++t)
      if (runnable(t) && is_structural(p_.threads[t][pc_[t]].kind)) return t;
    return std::nullopt;
  }

  std::vector<ThreadId> choices() const {
    std::vector<ThreadId> out;
    for (ThreadId t = 0; t < p_.thread_count(); ++t)
      if (runnable(t)) out.push_back(t);
    return out;
  }

  Event step(ThreadId t) {
    const Stmt& s = p_.threads[t][pc_[t]];
    Event e = event_for(p_, t, s, static_cast<std::uint32_t>(trace_.events.size()));
    if (s.kind == StmtKind::Acquire) {
      if (s.mode == LockMode::Reader) ++locks_[s.lock].readers;
      else locks_[s.lock].exclusive = true;
    } else if (s.kind == StmtKind::Release) {
      if (locks_[s.lock].exclusive) locks_[s.lock].exclusive = false;
      else --locks_[s.lock].readers;
    } else if (s.kind == StmtKind::Spawn) {
      started_[s.peer] = true;
    }
    ++pc_[t];
    trace_.events.push_back(e);
    return e;
  }

  void unstep(ThreadId t) {
    --pc_[t];
    const Stmt& s = p_.threads[t][pc_[t]];
    if (s.kind == StmtKind::Acquire) {
      if (s.mode == LockMode::Reader) --locks_[s.lock].readers;
      else locks_[s.lock].exclusive = false;
    } else if (s.kind == StmtKind::Release) {
      // Restore holder state; the nearest preceding acquire of this lock is
      // the matching one (locks are nested and non-recursive per thread).
      bool reader = false;
      for (std::size_t i = pc_[t]; i-- > 0;) {
        const Stmt& prev = p_.threads[t][i];
        if (prev.kind == StmtKind::Acquire && prev.lock == s.lock) {
          reader = prev.mode == LockMode::Reader;
          break;
        }
      }
      if (reader) ++locks_[s.lock].readers;
      else locks_[s.lock].exclusive = true;
    } else if (s.kind == StmtKind::Spawn) {
      started_[s.peer] = false;
    }
    trace_.events.pop_back();
  }

  const Trace& trace() const { return trace_; }

private:
  const Program& p_;
  std::vector<std::size_t> pc_;
  std::vector<char> started_;
  std::vector<LockState> locks_;
  Trace trace_;
};

void check_guard(const Program& p) {
  if (p.total_events > kMaxEnumerableEvents)
    fail(Errc::TooLarge, "program has " + std::to_string(p.total_events) +
                             " events; enumeration guard is " +
                             std::to_string(kMaxEnumerableEvents));
}

// DFS over choice points. Returns false when the sink asked to stop.
bool dfs(Scheduler& sched, std::size_t max_traces, std::size_t& yielded,
         const std::function<bool(const Trace&)>& sink) {
  if (sched.all_finished()) {
    ++yielded;
    return sink(sched.trace()) && yielded < max_traces;
  }
  if (auto f = sched.forced()) {
    sched.step(*f);
    bool keep = dfs(sched, max_traces, yielded, sink);
    sched.unstep(*f);
    return keep;
  }
  auto choices = sched.choices();
  for (ThreadId t : choices) {
    sched.step(t);
    bool keep = dfs(sched, max_traces, yielded, sink);
    sched.unstep(t);
    if (!keep) return false;
  }
  return true;  // dead end (deadlocked prefix): backtrack
}

}  // namespace

void enumerate_interleavings(const Program& p, std::size_t max_traces,
                             const std::function<bool(const Trace&)>& sink) {
  check_guard(p);
  if (max_traces == 0) return;
  Scheduler sched(p);
  std::size_t yielded = 0;
  dfs(sched, max_traces, yielded, sink);
  if (yielded == 0)
    fail(Errc::Deadlock, "every completion of the program deadlocks");
}

std::vector<Trace> enumerate_interleavings(const Program& p, std::size_t max_traces) {
  std::vector<Trace> out;
  enumerate_interleavings(p, max_traces, [&](const Trace& t) {
    out.push_back(t);
    return true;
  });
  return out;
}

Trace random_schedule(const Program& p, std::uint64_t seed) {
  check_guard(p);
  std::mt19937_64 rng(seed);

  // Randomized DFS with backtracking: always completes if any completion
  // exists, so the result is a member of the enumerable set.
  Scheduler sched(p);
  Trace result;
  std::function<bool()> go = [&]() -> bool {
    if (sched.all_finished()) {
      result = sched.trace();
      return true;
    }
    if (auto f = sched.forced()) {
      sched.step(*f);
      if (go()) return true;
      sched.unstep(*f);
      return false;
    }
    auto choices = sched.choices();
    // Fisher-Yates with the raw engine: identical traces for a seed on any
    // standard library.
    for (std::size_t i = choices.size(); i > 1; --i)
      std::swap(choices[i - 1], choices[rng() % i]);
    for (ThreadId t : choices) {
      sched.step(t);
      if (go()) return true;
      sched.unstep(t);
    }
    return false;
  };
  if (!go()) fail(Errc::Deadlock, "every completion of the program deadlocks");
  return result;
}

void validate_trace(const Program& p, const Trace& t) {
  auto bail = [&](const std::string& what) { fail(Errc::Validation, "invalid trace: " + what); };

  std::vector<std::size_t> pc(p.thread_count(), 0);
  std::vector<char> started(p.thread_count(), 0), done(p.thread_count(), 0);
  started[0] = 1;
  std::vector<LockState> locks(p.locks.size());
  std::vector<std::vector<std::uint32_t>> held(p.thread_count());

  for (std::uint32_t i = 0; i < t.events.size(); ++i) {
    const Event& e = t.events[i];
    if (e.seq != i) bail("seq values not dense");
    if (e.tid >= p.thread_count()) bail("unknown thread");
    if (!started[e.tid]) bail("event from unspawned thread");
    if (pc[e.tid] >= p.threads[e.tid].size()) bail("event past end of thread program");
    const Stmt& s = p.threads[e.tid][pc[e.tid]];
    Event expect = event_for(p, e.tid, s, i);
    if (expect.type != e.type || expect.target != e.target || expect.alias != e.alias ||
        expect.lock != e.lock || expect.lock_mode != e.lock_mode || expect.peer != e.peer ||
        expect.pointee != e.pointee)
      bail("per-thread order deviates from program order");
    switch (s.kind) {
      case StmtKind::Acquire: {
        LockState& ls = locks[s.lock];
        if (ls.exclusive || (s.mode == LockMode::Exclusive && ls.readers > 0))
          bail("lock exclusion violated");
        if (s.mode == LockMode::Reader) ++ls.readers;
        else ls.exclusive = true;
        held[e.tid].push_back(s.lock);
        break;
      }
      case StmtKind::Release: {
        if (held[e.tid].empty() || held[e.tid].back() != s.lock) bail("LA/LR not nested");
        held[e.tid].pop_back();
        LockState& ls = locks[s.lock];
        if (ls.exclusive) ls.exclusive = false;
        else --ls.readers;
        break;
      }
      case StmtKind::Spawn:
        started[s.peer] = 1;
        break;
      case StmtKind::Join:
        if (!done[s.peer]) bail("JOIN before last event of joined thread");
        break;
      default:
        break;
    }
    ++pc[e.tid];
    if (pc[e.tid] == p.threads[e.tid].size()) done[e.tid] = 1;
  }
  for (ThreadId tid = 0; tid < p.thread_count(); ++tid)
    if (pc[tid] != p.threads[tid].size()) bail("trace is not a completion");
}

}  // namespace tbrilab
