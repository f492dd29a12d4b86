#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

#include "tbrilab/error.hpp"

namespace tbrilab {

using ThreadId = std::uint32_t;  // 0 is the main thread

/// 4-bit memory tag. 0 means untagged; 15 is reserved (unfiltered) and is
/// rejected by every tagging operation.
class Tag {
public:
  static constexpr unsigned kMax = 15;
  static constexpr unsigned kReserved = 15;

  constexpr Tag() = default;

  static Tag of(unsigned value) {
    if (value > kMax) fail(Errc::Validation, "tag value out of range");
    Tag t;
    t.value_ = static_cast<std::uint8_t>(value);
    return t;
  }

  constexpr unsigned value() const { return value_; }
  constexpr bool untagged() const { return value_ == 0; }
  constexpr bool reserved() const { return value_ == kReserved; }

  friend constexpr bool operator==(Tag, Tag) = default;

private:
  std::uint8_t value_ = 0;
};

/// Symbolic granule address: allocation id plus 16-byte granule index.
struct GranuleId {
  std::uint32_t pointee = 0;
  std::uint32_t index = 0;

  friend constexpr bool operator==(const GranuleId&, const GranuleId&) = default;
  friend constexpr auto operator<=>(const GranuleId&, const GranuleId&) = default;
};

enum class AccessKind { Read, Write };

/// Thread-private tagged alias: one per (alias id, owning thread).
struct TaggedRef {
  std::uint32_t ref_id = 0;
  ThreadId owner = 0;
  GranuleId target;
  Tag tag;
};

/// Synchronous tag-check fault, delivered at the faulting access.
struct Fault {
  GranuleId granule;
  Tag ref_tag;
  Tag granule_tag;
  ThreadId thread = 0;
  AccessKind kind = AccessKind::Read;
};

constexpr std::uint64_t kGranuleBytes = 16;

/// Least multiple of 16 that covers `declared_size` bytes.
inline std::uint64_t pad_pointee(std::uint64_t declared_size) {
  if (declared_size == 0) fail(Errc::InvalidAllocation, "pointee size must be >= 1");
  return (declared_size + kGranuleBytes - 1) / kGranuleBytes * kGranuleBytes;
}

/// Software model of MTE-tagged memory: 16-byte granules with 4-bit tags,
/// synchronous faults on mismatched access. Granule addressing is symbolic.
class TaggedMemory {
public:
  struct Layout {
    std::uint64_t declared_size = 0;
    std::uint64_t padded_size = 0;
    bool live = false;
    std::vector<Tag> tags;  // one per granule
  };

  std::vector<GranuleId> alloc(std::uint32_t pointee, std::uint64_t declared_size) {
    if (pointee < layouts_.size() && layouts_[pointee].live)
      fail(Errc::DuplicateAllocation, "pointee already live");
    if (pointee >= layouts_.size()) layouts_.resize(pointee + 1);
    Layout& l = layouts_[pointee];
    l.declared_size = declared_size;
    l.padded_size = pad_pointee(declared_size);
    l.live = true;
    l.tags.assign(l.padded_size / kGranuleBytes, Tag{});
    std::vector<GranuleId> granules;
    granules.reserve(l.tags.size());
    for (std::uint32_t i = 0; i < l.tags.size(); ++i)
      granules.push_back(GranuleId{pointee, i});
    return granules;
  }

  void free_pointee(std::uint32_t pointee) {
    if (pointee >= layouts_.size() || !layouts_[pointee].live)
      fail(Errc::DeadGranule, "free of non-live pointee");
    layouts_[pointee].live = false;
    layouts_[pointee].tags.clear();
  }

  bool live(GranuleId g) const {
    return g.pointee < layouts_.size() && layouts_[g.pointee].live &&
           g.index < layouts_[g.pointee].tags.size();
  }

  const Layout& layout(std::uint32_t pointee) const {
    if (pointee >= layouts_.size()) fail(Errc::Validation, "unknown pointee");
    return layouts_[pointee];
  }

  void set_granule_tag(GranuleId g, Tag t) {
    if (!live(g)) fail(Errc::DeadGranule, "tag write to dead granule");
    if (t.reserved()) fail(Errc::ReservedTag, "tag 15 is reserved");
    layouts_[g.pointee].tags[g.index] = t;
  }

  Tag granule_tag(GranuleId g) const {
    if (!live(g)) fail(Errc::DeadGranule, "tag read of dead granule");
    return layouts_[g.pointee].tags[g.index];
  }

  bool tag_check(Tag ref_tag, GranuleId g) const { return ref_tag == granule_tag(g); }

  /// nullopt on a matching access; a Fault record otherwise. Dead-granule
  /// access is an Error, not a Fault.
  std::optional<Fault> access(const TaggedRef& ref, AccessKind kind) const {
    if (!live(ref.target)) fail(Errc::DeadGranule, "access to dead granule");
    if (tag_check(ref.tag, ref.target)) return std::nullopt;
    return Fault{ref.target, ref.tag, granule_tag(ref.target), ref.owner, kind};
  }

private:
  std::vector<Layout> layouts_;
};

}  // namespace tbrilab
