#include "tbrilab/tbri.hpp"

#include <algorithm>

namespace tbrilab {

const char* to_string(ReportKind k) {
  return k == ReportKind::DataRace ? "DataRace" : "ReaderILU";
}

Detector::Detector(const Program& p) : prog_(p) {
  instances_ = instantiate_aliases(p);
  instance_of_.assign(p.aliases.size() * p.thread_count(), -1);
  for (std::uint32_t i = 0; i < instances_.size(); ++i) {
    const AliasInstance& ai = instances_[i];
    instance_of_[ai.alias * p.thread_count() + ai.tid] = static_cast<int>(i);
  }
  granule_base_.assign(p.pointees.size() + 1, 0);
  for (std::uint32_t pi = 0; pi < p.pointees.size(); ++pi)
    granule_base_[pi + 1] = granule_base_[pi] + p.pointees[pi].granules;
  reset();
}

void Detector::reset() {
  mem_ = TaggedMemory{};
  refs_.assign(instances_.size(), TaggedRef{});
  for (std::uint32_t i = 0; i < instances_.size(); ++i) {
    refs_[i].ref_id = instances_[i].alias;
    refs_[i].owner = instances_[i].tid;
  }
  ref_bound_.assign(instances_.size(), 0);
  segments_.assign(instances_.size(), Segment{});
  locksets_.assign(prog_.thread_count(), ThreadLockset{});
  epochs_.assign(prog_.thread_count(), 0);
  frames_.assign(prog_.thread_count(), {});
  base_segments_.assign(prog_.thread_count(), {});
  metas_.assign(prog_.pointees.size(), PointeeMeta{});
  side_.assign(granule_base_.back(), std::nullopt);
  owner_.assign(granule_base_.back(), std::nullopt);
  parent_.assign(prog_.thread_count(), 0);
  reports_.clear();
}

int Detector::instance_index(std::uint32_t alias, ThreadId tid) const {
  if (alias >= prog_.aliases.size() || tid >= prog_.thread_count()) return -1;
  return instance_of_[alias * prog_.thread_count() + tid];
}

std::size_t Detector::granule_slot(GranuleId g) const {
  return granule_base_[g.pointee] + g.index;
}

Tag Detector::ref_tag(std::uint32_t alias, ThreadId tid) const {
  int i = instance_index(alias, tid);
  if (i < 0) fail(Errc::Validation, "unknown alias instance");
  return refs_[i].tag;
}

std::optional<GranuleId> Detector::ref_target(std::uint32_t alias, ThreadId tid) const {
  int i = instance_index(alias, tid);
  if (i < 0) fail(Errc::Validation, "unknown alias instance");
  if (!ref_bound_[i]) return std::nullopt;
  return refs_[i].target;
}

bool Detector::segment_open(std::uint32_t alias, ThreadId tid) const {
  int i = instance_index(alias, tid);
  return i >= 0 && segments_[i].open;
}

std::optional<ThreadId> Detector::exclusive_owner(GranuleId g) const {
  return owner_[granule_slot(g)];
}

void Detector::step(const Event& e) {
  if (e.tid >= prog_.thread_count())
    fail(Errc::Validation, "event thread id out of range for program");
  switch (e.type) {
    case EventType::Alloc: on_alloc(e); break;
    case EventType::Free: on_free(e); break;
    case EventType::LockAcquire: on_lock(e); break;
    case EventType::LockRelease: on_unlock(e); break;
    case EventType::Read:
    case EventType::Write: on_access(e); break;
    case EventType::Spawn: on_spawn(e); break;
    case EventType::Join: on_join(e); break;
  }
}

std::vector<RaceReport> Detector::run(const Trace& t) {
  reset();
  for (const Event& e : t.events) step(e);
  return reports_;
}

void Detector::on_alloc(const Event& e) {
  if (!e.pointee || *e.pointee >= prog_.pointees.size())
    fail(Errc::Validation, "alloc event without a valid pointee");
  mem_.alloc(*e.pointee, prog_.pointees[*e.pointee].declared_size);
  metas_[*e.pointee] = PointeeMeta{};  // spa starts false
  for (std::uint32_t i = 0; i < prog_.pointees[*e.pointee].granules; ++i) {
    side_[granule_slot(GranuleId{*e.pointee, i})].reset();
    owner_[granule_slot(GranuleId{*e.pointee, i})].reset();
  }
}

void Detector::on_free(const Event& e) {
  if (!e.pointee) fail(Errc::Validation, "free event without a pointee");
  mem_.free_pointee(*e.pointee);
}

void Detector::on_lock(const Event& e) {
  locksets_[e.tid].acquire(*e.lock, e.lock_mode.value_or(LockMode::Exclusive));
  ++epochs_[e.tid];
  frames_[e.tid].push_back(Frame{*e.lock, {}});
}

void Detector::on_unlock(const Event& e) {
  locksets_[e.tid].release(*e.lock);
  ++epochs_[e.tid];
  auto& stack = frames_[e.tid];
  if (stack.empty() || stack.back().lock != *e.lock)
    fail(Errc::Protocol, "release does not match the innermost critical section");
  for (std::uint32_t inst : stack.back().segments) close_segment(inst);
  stack.pop_back();
}

void Detector::close_segment(std::uint32_t inst) {
  Segment& seg = segments_[inst];
  if (!seg.open) return;
  seg.open = false;
  if (seg.tagged) update_tag_pointer(refs_[inst], Tag{});  // untag updated refs
}

void Detector::close_degenerate_touching_other(ThreadId tid, std::uint32_t pointee) {
  auto& base = base_segments_[tid];
  for (auto it = base.begin(); it != base.end();) {
    std::uint32_t inst = *it;
    // The slot may have been reused by a critical-section segment since this
    // entry was queued; only a live degenerate segment is ours to close.
    const Segment& seg = segments_[inst];
    if (!seg.open || !seg.degenerate) {
      it = base.erase(it);
    } else if (prog_.aliases[instances_[inst].alias].pointee != pointee) {
      close_segment(inst);
      it = base.erase(it);
    } else {
      ++it;
    }
  }
}

void Detector::tag_granule(GranuleId g, Tag t, const Event& e) {
  mem_.set_granule_tag(g, t);
  side_[granule_slot(g)] = SideInfo{e.type, e.tid, locksets_[e.tid].held()};
  owner_[granule_slot(g)] = e.tid;
}

void Detector::handle_fault(Tag faulting_ref_tag, const Event& e, GranuleId g) {
  const auto& side = side_[granule_slot(g)];
  if (!side) return;  // stale reference against an untagged granule: no prior event
  // A thread does not race with itself; the triage analogue is a faulting
  // thread whose own residue class matches the granule tag.
  if (side->tid == e.tid) return;
  // A lock common to both events, held exclusively by either side, orders
  // the pair: not a race.
  if (locksets_share_exclusion(side->lockset, locksets_[e.tid].held())) return;
  Tag gt = mem_.granule_tag(g);
  RaceReport r;
  r.kind = (side->etype == EventType::Write || e.type == EventType::Write)
               ? ReportKind::DataRace
               : ReportKind::ReaderIlu;
  r.event_seq = e.seq;
  r.granule = g;
  r.ref_tag = faulting_ref_tag;
  r.granule_tag = gt;
  r.accessor = e.tid;
  r.prior_event_type = side->etype;
  r.prior_tid_residue = gt.untagged() ? 0 : gt.value() - 1;
  reports_.push_back(r);
}

void Detector::apply_tag_steps(Segment& seg, std::uint32_t inst, GranuleId g, const Event& e,
                               bool run_dummy_check) {
  TaggedRef& ref = refs_[inst];
  switch (seg.attribute) {
    case LocksetState::Inconclusive: {
      if (run_dummy_check) {
        // Dummy load: reference tag forced to 0; faults iff the granule
        // carries a live tag.
        if (!mem_.granule_tag(g).untagged()) handle_fault(Tag{}, e, g);
      }
      update_tag_pointer(ref, tag_of_thread(e.tid));
      tag_granule(g, ref.tag, e);
      seg.tagged = true;
      break;
    }
    case LocksetState::Exclusive: {
      update_tag_pointer(ref, tag_of_thread(e.tid));
      tag_granule(g, ref.tag, e);
      seg.tagged = true;
      break;
    }
    case LocksetState::Shared: {
      Tag gt = mem_.granule_tag(g);
      if (e.type == EventType::Read && !gt.untagged()) {
        // Inherit the granule tag; pointee tagging skipped.
        update_tag_pointer(ref, gt);
        seg.tagged = true;
        auto& owner = owner_[granule_slot(g)];
        if (owner && *owner != e.tid) owner.reset();  // granule now validly shared
      } else {
        update_tag_pointer(ref, tag_of_thread(e.tid));
        tag_granule(g, ref.tag, e);
        seg.tagged = true;
      }
      break;
    }
  }
  ref.target = g;
  ref_bound_[inst] = 1;
}

void Detector::on_access(const Event& e) {
  if (!e.target || !e.alias) fail(Errc::Validation, "access event without target/alias");
  GranuleId g = *e.target;
  if (g.pointee >= prog_.pointees.size() || !mem_.live(g))
    fail(Errc::DeadGranule, "access to dead granule");
  int inst_i = instance_index(*e.alias, e.tid);
  if (inst_i < 0) fail(Errc::Validation, "alias not used by this thread in the program");
  if (prog_.aliases[*e.alias].pointee != g.pointee)
    fail(Errc::Validation, "alias targets a granule outside its pointee");
  auto inst = static_cast<std::uint32_t>(inst_i);

  close_degenerate_touching_other(e.tid, g.pointee);

  Segment& seg = segments_[inst];
  if (seg.open && seg.epoch == epochs_[e.tid]) {
    TaggedRef& ref = refs_[inst];
    if (ref_bound_[inst] && ref.target == g) {
      // Plain in-segment access: the hardware check.
      auto fault = mem_.access(ref, e.type == EventType::Read ? AccessKind::Read
                                                              : AccessKind::Write);
      if (fault) {
        handle_fault(ref.tag, e, g);
        // Resume as a signal handler would: refresh tags and continue.
        apply_tag_steps(seg, inst, g, e, /*run_dummy_check=*/false);
      }
    } else {
      // Granule retarget: tag updates (and dummy load, when the segment is
      // inconclusive) re-run; the lockset check does not.
      apply_tag_steps(seg, inst, g, e, /*run_dummy_check=*/true);
    }
    return;
  }

  if (seg.open) close_segment(inst);  // stale epoch

  // Segment setup: the lockset check runs here only.
  seg = Segment{};
  seg.open = true;
  seg.epoch = epochs_[e.tid];
  seg.attribute = handle_lockset_check(locksets_[e.tid].held(), metas_[g.pointee]);
  if (frames_[e.tid].empty()) {
    seg.degenerate = true;
    base_segments_[e.tid].push_back(inst);
  } else {
    frames_[e.tid].back().segments.push_back(inst);
  }
  apply_tag_steps(seg, inst, g, e, /*run_dummy_check=*/true);
}

void Detector::on_spawn(const Event& e) {
  if (!e.peer || *e.peer >= prog_.thread_count())
    fail(Errc::Validation, "spawn event without a valid peer");
  parent_[*e.peer] = e.tid;
}

void Detector::on_join(const Event& e) {
  if (!e.peer || *e.peer >= prog_.thread_count())
    fail(Errc::Validation, "join event without a valid peer");
  terminate_thread(*e.peer);
}

void Detector::terminate_thread(ThreadId tid) {
  if (!locksets_[tid].empty())
    fail(Errc::Protocol, "thread terminated while holding locks");
  for (std::uint32_t i = 0; i < instances_.size(); ++i)
    if (instances_[i].tid == tid) close_segment(i);
  base_segments_[tid].clear();
  frames_[tid].clear();

  // Exclusive access passes to the parent: retag owned granules and point
  // the side channel at the parent so its own later accesses stay benign.
  ThreadId parent = parent_[tid];
  Tag ptag = tag_of_thread(parent);
  for (std::uint32_t pi = 0; pi < prog_.pointees.size(); ++pi) {
    for (std::uint32_t gi = 0; gi < prog_.pointees[pi].granules; ++gi) {
      GranuleId g{pi, gi};
      std::size_t slot = granule_slot(g);
      if (owner_[slot] && *owner_[slot] == tid && mem_.live(g)) {
        mem_.set_granule_tag(g, ptag);
        owner_[slot] = parent;
        if (side_[slot]) side_[slot]->tid = parent;
      }
    }
  }
}

std::vector<RaceReport> run_detector(const Trace& trace, const Program& program) {
  Detector d(program);
  return d.run(trace);
}

}  // namespace tbrilab
