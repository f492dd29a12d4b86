#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tbrilab/tbri.hpp"

namespace tbrilab {

struct FuzzConfig {
  std::uint64_t count = 1000;
  std::uint64_t seed = 42;
  std::uint32_t max_threads = 3;
  std::uint32_t max_events_per_thread = 8;
  std::uint32_t max_pointees = 2;
  std::uint32_t max_locks = 2;
  std::size_t max_traces = 10000;
};

struct FuzzCounterexample {
  std::uint64_t program_index = 0;
  std::string program_text;
  std::string trace_json;                 // first trace that produced a report
  std::vector<RaceReport> reports;
};

struct FuzzSummary {
  std::uint64_t programs = 0;
  std::uint64_t traces = 0;
  std::uint64_t data_races = 0;
  std::uint64_t reader_ilus = 0;
  std::uint64_t confirmed = 0;
  std::uint64_t unconfirmed = 0;
  std::vector<FuzzCounterexample> counterexamples;
};

/// Random well-formed program in the default spawn model: all threads
/// concurrent, flat critical sections, no explicit spawn/join.
std::string generate_program_text(std::mt19937_64& rng, const FuzzConfig& cfg);

/// Runs the detector over every enumerated interleaving of `count` random
/// programs and confirms each reported data race against the exhaustive
/// happens-before oracle.
FuzzSummary run_fuzz(const FuzzConfig& cfg);

}  // namespace tbrilab
