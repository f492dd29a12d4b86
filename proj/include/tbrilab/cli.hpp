#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "tbrilab/corpus.hpp"
#include "tbrilab/fuzz.hpp"

namespace tbrilab {

enum class OutputFormat { Text, Json };
enum class EngineChoice { Tbri, Hb, Both };
enum class ScheduleChoice { Enumerate, Seed };

struct GlobalOptions {
  OutputFormat format = OutputFormat::Text;
  std::uint64_t seed = 0;
  std::size_t max_traces = 10000;
  bool quiet = false;
};

struct RunOptions {
  std::string program_path;
  EngineChoice engine = EngineChoice::Both;
  ScheduleChoice schedule = ScheduleChoice::Enumerate;
};

struct FuzzOptions {
  std::uint64_t count = 0;
  std::uint32_t max_threads = 3;
  std::uint32_t max_events = 8;
  std::uint32_t max_pointees = 2;
  std::uint32_t max_locks = 2;
  std::string out_path;  // counterexample artifact
};

struct CasesOptions {
  bool run = true;                      // false: list
  std::uint32_t executions = 0;         // 0: enumerate; N: N seeded schedules
  std::string manifest_path;            // override expected labels
};

struct MetricsOptions {
  std::string manifest_path;
  std::string reports_path;
};

/// Per-case evaluation shared by the CLI and the acceptance suite.
struct CaseResult {
  std::string name;
  std::string category;
  std::uint64_t traces = 0;
  std::uint64_t data_races = 0;
  std::uint64_t reader_ilus = 0;
  bool race_detected = false;
  bool ilu_detected = false;
  bool expected_race = false;
  bool expected_ilu = false;
  bool pass = false;
};

CaseResult evaluate_case(const CorpusCase& c, std::size_t max_traces,
                         std::uint32_t executions, std::uint64_t seed);

std::string case_result_json(const CaseResult& r);

// Exit codes: 0 no findings / all pass, 1 findings / mismatch / unconfirmed,
// 2 usage or processing error.
int cmd_run(const GlobalOptions& g, const RunOptions& o, std::ostream& out, std::ostream& err);
int cmd_fuzz(const GlobalOptions& g, const FuzzOptions& o, std::ostream& out, std::ostream& err);
int cmd_cases(const GlobalOptions& g, const CasesOptions& o, std::ostream& out, std::ostream& err);
int cmd_metrics(const GlobalOptions& g, const MetricsOptions& o, std::ostream& out, std::ostream& err);

}  // namespace tbrilab
