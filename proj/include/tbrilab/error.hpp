#pragma once

#include <stdexcept>
#include <string>

namespace tbrilab {

enum class Errc {
  InvalidAllocation,
  DuplicateAllocation,
  DeadGranule,
  ReservedTag,
  Parse,
  OffsetOutOfRange,
  UnmatchedRelease,
  UnmatchedAcquire,
  RecursiveLock,
  TooLarge,
  Deadlock,
  Protocol,
  Validation,
  JoinError,
  EmptyCounts,
  UnknownCase,
};

/// Single exception type for all contract violations; tests match on code().
class Error : public std::runtime_error {
public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace tbrilab
