#include "tbrilab/fuzz.hpp"

#include <sstream>

#include "tbrilab/hb.hpp"
#include "tbrilab/interleave.hpp"
#include "tbrilab/json_io.hpp"

namespace tbrilab {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t i) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (i + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint32_t pick(std::mt19937_64& rng, std::uint32_t lo, std::uint32_t hi) {
  return lo + static_cast<std::uint32_t>(rng() % (hi - lo + 1));
}

}  // namespace

std::string generate_program_text(std::mt19937_64& rng, const FuzzConfig& cfg) {
  std::ostringstream os;

  std::uint32_t n_pointees = pick(rng, 1, std::max(1u, cfg.max_pointees));
  std::vector<std::uint32_t> sizes;
  static const char* kPointeeNames[] = {"A", "B", "C", "D"};
  for (std::uint32_t i = 0; i < n_pointees; ++i) {
    std::uint32_t size = 16 * pick(rng, 1, 3);
    sizes.push_back(size);
    os << "pointee " << kPointeeNames[i] << " size " << size << "\n";
  }

  std::uint32_t n_locks = pick(rng, 0, cfg.max_locks);
  std::vector<bool> is_rw;
  static const char* kLockNames[] = {"m0", "m1", "m2", "m3"};
  for (std::uint32_t i = 0; i < n_locks; ++i) {
    bool rw = rng() % 3 == 0;
    is_rw.push_back(rw);
    os << "lock " << kLockNames[i] << " kind " << (rw ? "rwlock" : "mutex") << "\n";
  }

  std::uint32_t n_threads =
      rng() % 10 == 0 ? 1 : pick(rng, 2, std::max(2u, cfg.max_threads));

  auto emit_access = [&](std::ostream& body) {
    std::uint32_t pi = pick(rng, 0, n_pointees - 1);
    std::uint32_t offset = 16 * pick(rng, 0, sizes[pi] / 16 - 1);
    if (rng() % 4 == 0 && offset + 8 < sizes[pi]) offset += 8;
    body << "  " << (rng() % 2 ? "write " : "read ") << kPointeeNames[pi];
    if (offset != 0) body << "+" << offset;
    if (rng() % 5 == 0) body << " via p" << rng() % 2;  // shared alias names
    body << "\n";
  };

  auto emit_acquire = [&](std::ostream& body, std::uint32_t li) {
    body << "  acquire " << kLockNames[li];
    if (is_rw[li]) body << (rng() % 2 ? " read" : " write");
    body << "\n";
  };

  for (std::uint32_t t = 0; t < n_threads; ++t) {
    os << "thread t" << t + 1 << " {\n";
    std::uint32_t budget = pick(rng, 1, cfg.max_events_per_thread);
    while (budget > 0) {
      bool section = n_locks > 0 && budget >= 3 && rng() % 5 < 2;
      if (section) {
        std::uint32_t li = pick(rng, 0, n_locks - 1);
        bool nested = n_locks > 1 && budget >= 5 && rng() % 3 == 0;
        std::uint32_t events = 0;
        emit_acquire(os, li);
        ++events;
        if (nested) {
          std::uint32_t lj = (li + 1) % n_locks;
          if (budget > 5 && rng() % 2) {
            emit_access(os);
            ++events;
          }
          emit_acquire(os, lj);
          emit_access(os);
          os << "  release " << kLockNames[lj] << "\n";
          events += 3;
        } else {
          std::uint32_t inner = pick(rng, 1, std::min(budget - 2, 2u));
          for (std::uint32_t k = 0; k < inner; ++k) emit_access(os);
          events += inner;
        }
        os << "  release " << kLockNames[li] << "\n";
        ++events;
        budget -= events;
      } else {
        emit_access(os);
        --budget;
      }
    }
    os << "}\n";
  }
  return os.str();
}

FuzzSummary run_fuzz(const FuzzConfig& cfg) {
  FuzzSummary summary;
  for (std::uint64_t i = 0; i < cfg.count; ++i) {
    std::mt19937_64 rng(mix(cfg.seed, i));
    std::string text = generate_program_text(rng, cfg);
    Program program = parse_program(text);
    Detector detector(program);

    std::uint64_t program_races = 0;
    std::uint64_t program_ilus = 0;
    FuzzCounterexample witness;
    witness.program_index = i;
    witness.program_text = text;

    enumerate_interleavings(program, cfg.max_traces, [&](const Trace& trace) {
      ++summary.traces;
      auto reports = detector.run(trace);
      bool first_race = program_races == 0;
      for (const RaceReport& r : reports) {
        if (r.kind == ReportKind::DataRace) ++program_races;
        else ++program_ilus;
      }
      if (first_race && program_races > 0) {
        witness.trace_json = trace_to_json(program, trace);
        witness.reports = reports;
      }
      return true;
    });

    ++summary.programs;
    summary.data_races += program_races;
    summary.reader_ilus += program_ilus;
    if (program_races > 0) {
      if (ground_truth(program, cfg.max_traces)) {
        summary.confirmed += program_races;
      } else {
        summary.unconfirmed += program_races;
        summary.counterexamples.push_back(std::move(witness));
      }
    }
  }
  return summary;
}

}  // namespace tbrilab
