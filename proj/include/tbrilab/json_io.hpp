#pragma once

#include <string>

#include "tbrilab/program.hpp"
#include "tbrilab/tbri.hpp"

namespace tbrilab {

/// Trace file: JSON array of {seq, tid, op, pointee, offset, alias, lock,
/// mode, peer}; absent fields omitted, field order fixed.
std::string trace_to_json(const Program& p, const Trace& t, bool pretty = false);
Trace trace_from_json(const Program& p, const std::string& text);

/// Report record: {kind, event_seq, pointee, granule_index, ref_tag,
/// granule_tag, accessor_tid, prior_event_type, prior_tid_residue}.
std::string report_to_json(const Program& p, const RaceReport& r);
RaceReport report_from_json(const Program& p, const std::string& text);

}  // namespace tbrilab
