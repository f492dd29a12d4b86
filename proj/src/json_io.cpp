#include "tbrilab/json_io.hpp"

#include <json.hpp>

namespace tbrilab {

namespace {

using ordered_json = nlohmann::ordered_json;

EventType event_type_from(const std::string& op) {
  if (op == "RD") return EventType::Read;
  if (op == "WR") return EventType::Write;
  if (op == "LA") return EventType::LockAcquire;
  if (op == "LR") return EventType::LockRelease;
  if (op == "SPAWN") return EventType::Spawn;
  if (op == "JOIN") return EventType::Join;
  if (op == "ALLOC") return EventType::Alloc;
  if (op == "FREE") return EventType::Free;
  fail(Errc::Validation, "unknown event op '" + op + "'");
}

}  // namespace

std::string trace_to_json(const Program& p, const Trace& t, bool pretty) {
  ordered_json arr = ordered_json::array();
  for (const Event& e : t.events) {
    ordered_json rec;
    rec["seq"] = e.seq;
    rec["tid"] = e.tid;
    rec["op"] = to_string(e.type);
    if (e.is_access()) {
      rec["pointee"] = p.pointees[e.target->pointee].name;
      rec["offset"] = *e.offset;
      const AliasDecl& alias = p.aliases[*e.alias];
      if (!alias.name.empty()) rec["alias"] = alias.name;
    } else if (e.pointee) {
      rec["pointee"] = p.pointees[*e.pointee].name;
    }
    if (e.lock) rec["lock"] = p.locks[*e.lock].name;
    if (e.lock_mode) rec["mode"] = to_string(*e.lock_mode);
    if (e.peer) rec["peer"] = *e.peer;
    arr.push_back(std::move(rec));
  }
  return pretty ? arr.dump(2) : arr.dump();
}

Trace trace_from_json(const Program& p, const std::string& text) {
  ordered_json arr;
  try {
    arr = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::Parse, std::string("trace JSON: ") + e.what());
  }
  if (!arr.is_array()) fail(Errc::Parse, "trace JSON must be an array");
  Trace t;
  for (const auto& rec : arr) {
    Event e;
    e.seq = rec.at("seq").get<std::uint32_t>();
    e.tid = rec.at("tid").get<ThreadId>();
    e.type = event_type_from(rec.at("op").get<std::string>());
    if (rec.contains("pointee")) {
      auto pi = p.pointee_index(rec.at("pointee").get<std::string>());
      if (!pi) fail(Errc::Validation, "trace references unknown pointee");
      if (e.is_access()) {
        std::uint64_t offset = rec.at("offset").get<std::uint64_t>();
        e.offset = offset;
        e.target = p.granule_for(*pi, offset);
        std::string alias_name = rec.contains("alias") ? rec.at("alias").get<std::string>() : "";
        for (std::uint32_t i = 0; i < p.aliases.size(); ++i)
          if (p.aliases[i].pointee == *pi && p.aliases[i].name == alias_name) e.alias = i;
        if (!e.alias) fail(Errc::Validation, "trace references unknown alias");
      } else {
        e.pointee = *pi;
      }
    }
    if (rec.contains("lock")) {
      auto li = p.lock_index(rec.at("lock").get<std::string>());
      if (!li) fail(Errc::Validation, "trace references unknown lock");
      e.lock = *li;
    }
    if (rec.contains("mode"))
      e.lock_mode = rec.at("mode").get<std::string>() == "reader" ? LockMode::Reader
                                                                  : LockMode::Exclusive;
    if (rec.contains("peer")) e.peer = rec.at("peer").get<ThreadId>();
    t.events.push_back(std::move(e));
  }
  return t;
}

std::string report_to_json(const Program& p, const RaceReport& r) {
  ordered_json rec;
  rec["kind"] = to_string(r.kind);
  rec["event_seq"] = r.event_seq;
  rec["pointee"] = p.pointees[r.granule.pointee].name;
  rec["granule_index"] = r.granule.index;
  rec["ref_tag"] = r.ref_tag.value();
  rec["granule_tag"] = r.granule_tag.value();
  rec["accessor_tid"] = r.accessor;
  rec["prior_event_type"] = to_string(r.prior_event_type);
  rec["prior_tid_residue"] = r.prior_tid_residue;
  return rec.dump();
}

RaceReport report_from_json(const Program& p, const std::string& text) {
  ordered_json rec;
  try {
    rec = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::Parse, std::string("report JSON: ") + e.what());
  }
  RaceReport r;
  std::string kind = rec.at("kind").get<std::string>();
  if (kind == "DataRace") r.kind = ReportKind::DataRace;
  else if (kind == "ReaderILU") r.kind = ReportKind::ReaderIlu;
  else fail(Errc::Validation, "unknown report kind");
  r.event_seq = rec.at("event_seq").get<std::uint32_t>();
  auto pi = p.pointee_index(rec.at("pointee").get<std::string>());
  if (!pi) fail(Errc::Validation, "report references unknown pointee");
  r.granule = GranuleId{*pi, rec.at("granule_index").get<std::uint32_t>()};
  r.ref_tag = Tag::of(rec.at("ref_tag").get<unsigned>());
  r.granule_tag = Tag::of(rec.at("granule_tag").get<unsigned>());
  r.accessor = rec.at("accessor_tid").get<ThreadId>();
  r.prior_event_type = event_type_from(rec.at("prior_event_type").get<std::string>());
  r.prior_tid_residue = rec.at("prior_tid_residue").get<unsigned>();
  return r;
}

}  // namespace tbrilab
