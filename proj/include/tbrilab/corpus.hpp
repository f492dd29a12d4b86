#pragma once

#include <string>
#include <vector>

#include "tbrilab/error.hpp"

namespace tbrilab {

struct CorpusCase {
  std::string name;
  std::string category;  // LD, SYN, EB, SH, TS, CASE_A..CASE_G
  std::string program;   // DSL text
  bool race = false;
  bool ilu = false;
  std::string notes;
};

/// Deterministic, stable case order.
std::vector<std::string> list_cases();

const CorpusCase& get_case(const std::string& name);

const std::vector<CorpusCase>& all_cases();

/// Sidecar manifest: JSON array of {name, category, race, ilu}.
std::string corpus_manifest_json();

}  // namespace tbrilab
