#include <doctest.h>

#include <fstream>
#include <map>
#include <sstream>

#include "tbrilab/cli.hpp"
#include "tbrilab/corpus.hpp"
#include "tbrilab/hb.hpp"
#include "tbrilab/interleave.hpp"
#include "tbrilab/tbri.hpp"

using namespace tbrilab;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), ("missing corpus file " + path).c_str());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("listing includes the seven reconstructed cases and is stable") {
  auto names = list_cases();
  for (char c = 'a'; c <= 'g'; ++c)
    CHECK(std::find(names.begin(), names.end(), std::string("case_") + c) != names.end());
  CHECK(names == list_cases());
}

TEST_CASE("at least two cases per benchmark category") {
  std::map<std::string, int> per_category;
  for (const CorpusCase& c : all_cases()) ++per_category[c.category];
  for (const char* cat : {"LD", "SYN", "EB", "SH", "TS"}) CHECK(per_category[cat] >= 2);
}

TEST_CASE("lookups return full records; unknown names are errors") {
  CHECK(get_case("case_e").race);
  CHECK_FALSE(get_case("case_e").ilu);
  CHECK_FALSE(get_case("case_d").race);
  CHECK(get_case("case_d").ilu);
  CHECK_FALSE(get_case("case_b").race);
  CHECK_FALSE(get_case("case_b").ilu);
  try {
    get_case("case_z");
    FAIL("expected unknown-case error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownCase);
  }
}

TEST_CASE("reconstructed cases carry a note") {
  for (const char* name : {"case_a", "case_c", "case_g"})
    CHECK(get_case(name).notes.find("reconstructed") != std::string::npos);
}

TEST_CASE("self-consistency gate: expected race labels match the oracle ground truth") {
  for (const CorpusCase& c : all_cases()) {
    INFO(c.name);
    CHECK(ground_truth(parse_program(c.program)) == c.race);
  }
}

TEST_CASE("detector classifications match the expected labels on every case") {
  for (const CorpusCase& c : all_cases()) {
    INFO(c.name);
    CaseResult r = evaluate_case(c, 100000, 0, 0);
    CHECK(r.pass);
    CHECK(r.race_detected == c.race);
    CHECK(r.ilu_detected == c.ilu);
  }
}

TEST_CASE("unsynchronized WR/WR yields exactly one data race per interleaving") {
  Program p = parse_program(get_case("case_e").program);
  Detector d(p);
  std::size_t traces = 0;
  enumerate_interleavings(p, 1000, [&](const Trace& t) {
    ++traces;
    auto reports = d.run(t);
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].kind == ReportKind::DataRace);
    return true;
  });
  CHECK(traces == 2);
}

TEST_CASE("non-racy cases stay silent in every interleaving") {
  for (const CorpusCase& c : all_cases()) {
    if (c.race || c.ilu) continue;
    INFO(c.name);
    CaseResult r = evaluate_case(c, 100000, 0, 0);
    CHECK(r.data_races == 0);
    CHECK(r.reader_ilus == 0);
  }
}

TEST_CASE("the corpus directory mirrors the built-in cases") {
  std::string dir = TBRILAB_CORPUS_DIR;
  for (const CorpusCase& c : all_cases())
    CHECK(slurp(dir + "/" + c.name + ".dsl") == c.program);
  CHECK(slurp(dir + "/manifest.json") == corpus_manifest_json());
}

}  // TEST_SUITE
