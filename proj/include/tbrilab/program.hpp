#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tbrilab/tagged_memory.hpp"

namespace tbrilab {

enum class EventType { Read, Write, LockAcquire, LockRelease, Spawn, Join, Alloc, Free };
enum class LockMode { Exclusive, Reader };
enum class LockKind { Mutex, RwLock };

const char* to_string(EventType t);
const char* to_string(LockMode m);

struct Event {
  EventType type = EventType::Read;
  ThreadId tid = 0;
  std::uint32_t seq = 0;
  std::optional<GranuleId> target;        // Read/Write
  std::optional<std::uint64_t> offset;    // byte offset within the pointee
  std::optional<std::uint32_t> alias;     // alias table index
  std::optional<std::uint32_t> lock;      // LockAcquire/LockRelease
  std::optional<LockMode> lock_mode;      // LockAcquire
  std::optional<std::uint32_t> pointee;   // Alloc/Free
  std::optional<ThreadId> peer;           // Spawn/Join target

  bool is_access() const { return type == EventType::Read || type == EventType::Write; }
};

struct Trace {
  std::vector<Event> events;

  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }
};

struct PointeeDecl {
  std::string name;
  std::uint64_t declared_size = 0;
  std::uint64_t padded_size = 0;
  std::uint32_t granules = 0;
};

struct LockDecl {
  std::string name;
  LockKind kind = LockKind::Mutex;
};

/// Alias names are scoped per pointee; the empty name is the implicit
/// per-(pointee, thread) default alias.
struct AliasDecl {
  std::string name;
  std::uint32_t pointee = 0;
};

enum class StmtKind { Acquire, Release, Read, Write, Spawn, Join, Alloc, Free };

struct Stmt {
  StmtKind kind = StmtKind::Read;
  std::uint32_t lock = 0;
  LockMode mode = LockMode::Exclusive;
  std::uint32_t pointee = 0;
  std::uint64_t offset = 0;
  std::uint32_t alias = 0;
  ThreadId peer = 0;
  int line = 0;
};

struct Program {
  std::vector<PointeeDecl> pointees;
  std::vector<LockDecl> locks;
  std::vector<AliasDecl> aliases;
  std::vector<std::string> thread_names;        // [0] == "main"
  std::vector<std::vector<Stmt>> threads;       // per-thread statement lists, main included
  std::vector<ThreadId> parent;                 // spawner of each thread; parent[0] == 0
  bool explicit_main = false;
  std::uint32_t total_events = 0;               // all trace events, implicit ones included

  std::uint32_t thread_count() const { return static_cast<std::uint32_t>(threads.size()); }

  std::optional<std::uint32_t> pointee_index(std::string_view name) const;
  std::optional<std::uint32_t> lock_index(std::string_view name) const;
  GranuleId granule_for(std::uint32_t pointee, std::uint64_t offset) const {
    return GranuleId{pointee, static_cast<std::uint32_t>(offset / kGranuleBytes)};
  }
};

/// Parses the line-oriented concurrency DSL. Errors carry line/column.
Program parse_program(std::string_view text);

/// Distinct (alias, thread) pairs the program uses, in deterministic order.
/// One TaggedRef exists per pair so a tag set by one thread never leaks to
/// another through a shared alias name.
struct AliasInstance {
  std::uint32_t alias = 0;
  ThreadId tid = 0;

  friend bool operator==(const AliasInstance&, const AliasInstance&) = default;
  friend auto operator<=>(const AliasInstance&, const AliasInstance&) = default;
};

std::vector<AliasInstance> instantiate_aliases(const Program& p);

}  // namespace tbrilab
