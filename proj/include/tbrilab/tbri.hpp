#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tbrilab/lockset.hpp"
#include "tbrilab/program.hpp"
#include "tbrilab/tagged_memory.hpp"

namespace tbrilab {

/// Deterministic thread tag: (tid mod 14) + 1, never 0 or 15.
inline Tag tag_of_thread(ThreadId tid) { return Tag::of(tid % 14 + 1); }

/// ADDG/SUBG analogue: retags a reference; 15 is rejected.
inline void update_tag_pointer(TaggedRef& ref, Tag t) {
  if (t.reserved()) fail(Errc::ReservedTag, "tag 15 is reserved");
  ref.tag = t;
}

/// STG analogue: copies the reference tag onto its target granule.
inline void update_tag_pointee(TaggedMemory& mem, const TaggedRef& ref) {
  mem.set_granule_tag(ref.target, ref.tag);
}

enum class ReportKind { DataRace, ReaderIlu };

const char* to_string(ReportKind k);

struct RaceReport {
  ReportKind kind = ReportKind::DataRace;
  std::uint32_t event_seq = 0;
  GranuleId granule;
  Tag ref_tag;            // faulting reference tag; 0 for dummy loads
  Tag granule_tag;
  ThreadId accessor = 0;
  EventType prior_event_type = EventType::Read;  // tagging event of the granule
  unsigned prior_tid_residue = 0;                // (granule tag - 1): tid residue class mod 14
};

/// Segment: binds one (thread, alias) reference to the lockset state computed
/// at its first access. Closed at the matching lock release, at thread end,
/// or (lock-free segments) when the thread touches another pointee.
struct Segment {
  bool open = false;
  LocksetState attribute = LocksetState::Inconclusive;
  std::uint64_t epoch = 0;
  bool degenerate = false;   // opened outside any critical section
  bool tagged = false;       // this segment's ref is in updated_refs
};

/// Tag-based race inference over one totally ordered trace. Single-threaded;
/// construct once per program and run per trace.
class Detector {
public:
  explicit Detector(const Program& p);

  void reset();

  /// Processes one event; reports are appended synchronously at the
  /// faulting event's seq. Detection continues after a report.
  void step(const Event& e);

  std::vector<RaceReport> run(const Trace& t);

  // Introspection for tests and invariant suites.
  const TaggedMemory& memory() const { return mem_; }
  const std::vector<RaceReport>& reports() const { return reports_; }
  const std::vector<AliasInstance>& alias_instances() const { return instances_; }
  Tag ref_tag(std::uint32_t alias, ThreadId tid) const;
  std::optional<GranuleId> ref_target(std::uint32_t alias, ThreadId tid) const;
  bool segment_open(std::uint32_t alias, ThreadId tid) const;
  std::optional<ThreadId> exclusive_owner(GranuleId g) const;
  const Lockset& thread_lockset(ThreadId tid) const { return locksets_[tid].held(); }
  const PointeeMeta& pointee_meta(std::uint32_t pointee) const { return metas_.at(pointee); }

private:
  struct SideInfo {
    EventType etype = EventType::Read;  // RD or WR of the last tagging event
    ThreadId tid = 0;
    Lockset lockset;                    // lockset held by the tagging thread
  };

  struct Frame {
    std::uint32_t lock = 0;
    std::vector<std::uint32_t> segments;  // alias-instance indices
  };

  int instance_index(std::uint32_t alias, ThreadId tid) const;
  std::size_t granule_slot(GranuleId g) const;

  void on_alloc(const Event& e);
  void on_free(const Event& e);
  void on_lock(const Event& e);
  void on_unlock(const Event& e);
  void on_access(const Event& e);
  void on_spawn(const Event& e);
  void on_join(const Event& e);

  void close_segment(std::uint32_t inst);
  void close_degenerate_touching_other(ThreadId tid, std::uint32_t pointee);
  void terminate_thread(ThreadId tid);
  void apply_tag_steps(Segment& seg, std::uint32_t inst, GranuleId g, const Event& e,
                       bool run_dummy_check);
  void tag_granule(GranuleId g, Tag t, const Event& e);
  void handle_fault(Tag faulting_ref_tag, const Event& e, GranuleId g);

  const Program& prog_;
  TaggedMemory mem_;
  std::vector<AliasInstance> instances_;
  std::vector<int> instance_of_;        // alias*nthreads + tid -> instance or -1
  std::vector<TaggedRef> refs_;         // per instance
  std::vector<char> ref_bound_;         // ref has a target yet
  std::vector<Segment> segments_;       // per instance
  std::vector<ThreadLockset> locksets_;
  std::vector<std::uint64_t> epochs_;
  std::vector<std::vector<Frame>> frames_;
  std::vector<std::vector<std::uint32_t>> base_segments_;
  std::vector<PointeeMeta> metas_;
  std::vector<std::size_t> granule_base_;
  std::vector<std::optional<SideInfo>> side_;
  std::vector<std::optional<ThreadId>> owner_;
  std::vector<ThreadId> parent_;
  std::vector<RaceReport> reports_;
};

std::vector<RaceReport> run_detector(const Trace& trace, const Program& program);

}  // namespace tbrilab
