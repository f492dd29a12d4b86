#include "tbrilab/corpus.hpp"

#include <json.hpp>

namespace tbrilab {

namespace {

std::vector<CorpusCase> build_cases() {
  std::vector<CorpusCase> cases;

  cases.push_back(CorpusCase{
      "case_a", "CASE_A",
      "# join-ordered handoff: child writes, parent reads after join\n"
      "pointee A size 16\n"
      "thread main {\n"
      "  spawn t1\n"
      "  join t1\n"
      "  read A\n"
      "}\n"
      "thread t1 {\n"
      "  write A\n"
      "}\n",
      false, false, "reconstructed: non-racy via spawn/join ordering"});

  cases.push_back(CorpusCase{
      "case_b", "CASE_B",
      "# both writers hold the same mutex\n"
      "pointee A size 16\n"
      "lock m kind mutex\n"
      "thread t1 {\n"
      "  acquire m\n"
      "  write A\n"
      "  release m\n"
      "}\n"
      "thread t2 {\n"
      "  acquire m\n"
      "  write A\n"
      "  release m\n"
      "}\n",
      false, false, "common mutex serializes the writes"});

  cases.push_back(CorpusCase{
      "case_c", "CASE_C",
      "# writer holds the rwlock exclusively, reader holds it shared\n"
      "pointee A size 16\n"
      "lock rw kind rwlock\n"
      "thread t1 {\n"
      "  acquire rw write\n"
      "  write A\n"
      "  release rw\n"
      "}\n"
      "thread t2 {\n"
      "  acquire rw read\n"
      "  read A\n"
      "  release rw\n"
      "}\n",
      false, false, "reconstructed: proper reader-writer locking"});

  cases.push_back(CorpusCase{
      "case_d", "CASE_D",
      "# two reads under disjoint reader locks: inconsistent lock usage\n"
      "pointee A size 16\n"
      "lock r1 kind rwlock\n"
      "lock r2 kind rwlock\n"
      "thread t1 {\n"
      "  acquire r1 read\n"
      "  read A\n"
      "  release r1\n"
      "}\n"
      "thread t2 {\n"
      "  acquire r2 read\n"
      "  read A\n"
      "  release r2\n"
      "}\n",
      false, true, "RD/RD with disjoint locksets is flagged, not a data race"});

  cases.push_back(CorpusCase{
      "case_e", "CASE_E",
      "# no synchronization at all\n"
      "pointee A size 16\n"
      "thread t1 {\n"
      "  write A\n"
      "}\n"
      "thread t2 {\n"
      "  write A\n"
      "}\n",
      true, false, "unsynchronized WR/WR"});

  cases.push_back(CorpusCase{
      "case_f", "CASE_F",
      "# one side takes the lock, the other does not\n"
      "pointee A size 16\n"
      "lock m kind mutex\n"
      "thread t1 {\n"
      "  acquire m\n"
      "  write A\n"
      "  release m\n"
      "}\n"
      "thread t2 {\n"
      "  write A\n"
      "}\n",
      true, false, "missing lock access"});

  cases.push_back(CorpusCase{
      "case_g", "CASE_G",
      "# same thread locks one access and skips the lock on the next\n"
      "pointee A size 16\n"
      "lock m kind mutex\n"
      "thread t1 {\n"
      "  acquire m\n"
      "  write A\n"
      "  release m\n"
      "}\n"
      "thread t2 {\n"
      "  acquire m\n"
      "  write A\n"
      "  release m\n"
      "  write A\n"
      "}\n",
      true, false, "reconstructed: inconsistent synchronization"});

  cases.push_back(CorpusCase{
      "ld_antidep_racy", "LD",
      "# loop-carried anti-dependency: neighbouring iterations touch the\n"
      "# same granule from different threads\n"
      "pointee A size 48\n"
      "thread t1 {\n"
      "  read A+16\n"
      "  write A+0\n"
      "}\n"
      "thread t2 {\n"
      "  read A+32\n"
      "  write A+16\n"
      "}\n",
      true, false, "t1 reads the granule t2 writes"});

  cases.push_back(CorpusCase{
      "ld_disjoint_safe", "LD",
      "# iterations partitioned by granule: no overlap\n"
      "pointee A size 32\n"
      "thread t1 {\n"
      "  read A+0\n"
      "  write A+0\n"
      "}\n"
      "thread t2 {\n"
      "  read A+16\n"
      "  write A+16\n"
      "}\n",
      false, false, "disjoint granules of one shared array"});

  cases.push_back(CorpusCase{
      "syn_mutex_safe", "SYN",
      "# read-modify-write fully inside the critical section\n"
      "pointee C size 16\n"
      "lock m kind mutex\n"
      "thread t1 {\n"
      "  acquire m\n"
      "  read C\n"
      "  write C\n"
      "  release m\n"
      "}\n"
      "thread t2 {\n"
      "  acquire m\n"
      "  read C\n"
      "  write C\n"
      "  release m\n"
      "}\n",
      false, false, "common mutex around both update sequences"});

  cases.push_back(CorpusCase{
      "syn_unlocked_read_racy", "SYN",
      "# the pre-check read escapes the critical section\n"
      "pointee C size 16\n"
      "lock m kind mutex\n"
      "thread t1 {\n"
      "  acquire m\n"
      "  write C\n"
      "  release m\n"
      "}\n"
      "thread t2 {\n"
      "  read C\n"
      "  acquire m\n"
      "  write C\n"
      "  release m\n"
      "}\n",
      true, false, "unlocked read races the locked write"});

  cases.push_back(CorpusCase{
      "eb_phase_safe", "EB",
      "# two workers fill disjoint granules; main reduces after joining both\n"
      "pointee A size 32\n"
      "thread main {\n"
      "  spawn t1\n"
      "  spawn t2\n"
      "  join t1\n"
      "  join t2\n"
      "  read A+0\n"
      "  read A+16\n"
      "}\n"
      "thread t1 {\n"
      "  write A+0\n"
      "}\n"
      "thread t2 {\n"
      "  write A+16\n"
      "}\n",
      false, false, "barrier approximated with join; reduction is ordered"});

  cases.push_back(CorpusCase{
      "eb_missing_racy", "EB",
      "# phase two starts without waiting for phase one\n"
      "pointee A size 32\n"
      "thread t1 {\n"
      "  write A+0\n"
      "  read A+16\n"
      "}\n"
      "thread t2 {\n"
      "  write A+16\n"
      "  read A+0\n"
      "}\n",
      true, false, "barrier approximated with join; the missing barrier makes phases overlap"});

  cases.push_back(CorpusCase{
      "sh_locked_mix_safe", "SH",
      "# private granules lock-free, the shared granule under a mutex\n"
      "pointee H size 64\n"
      "lock m kind mutex\n"
      "thread t1 {\n"
      "  write H+0\n"
      "  acquire m\n"
      "  write H+48\n"
      "  release m\n"
      "}\n"
      "thread t2 {\n"
      "  write H+16\n"
      "  acquire m\n"
      "  write H+48\n"
      "  release m\n"
      "}\n",
      false, false, "one heap block, mixed private and locked-shared granules"});

  cases.push_back(CorpusCase{
      "sh_counter_racy", "SH",
      "# heap counter updated once inside and once outside the lock\n"
      "pointee H size 16\n"
      "lock m kind mutex\n"
      "thread t1 {\n"
      "  acquire m\n"
      "  write H\n"
      "  release m\n"
      "  write H\n"
      "}\n"
      "thread t2 {\n"
      "  acquire m\n"
      "  write H\n"
      "  release m\n"
      "}\n",
      true, false, "the unlocked update races the locked one"});

  cases.push_back(CorpusCase{
      "ts_private_safe", "TS",
      "# thread-specific storage: each thread owns its pointee\n"
      "pointee P size 16\n"
      "pointee Q size 16\n"
      "thread t1 {\n"
      "  read P\n"
      "  write P\n"
      "}\n"
      "thread t2 {\n"
      "  read Q\n"
      "  write Q\n"
      "}\n",
      false, false, "no shared granule"});

  cases.push_back(CorpusCase{
      "ts_escape_racy", "TS",
      "# supposedly thread-private block escapes to a second thread\n"
      "pointee P size 16\n"
      "lock m kind mutex\n"
      "thread t1 {\n"
      "  write P\n"
      "  read P\n"
      "}\n"
      "thread t2 {\n"
      "  acquire m\n"
      "  write P\n"
      "  release m\n"
      "}\n",
      true, false, "t1 treats P as private, t2 writes it under an unrelated lock"});

  return cases;
}

}  // namespace

const std::vector<CorpusCase>& all_cases() {
  static const std::vector<CorpusCase> cases = build_cases();
  return cases;
}

std::vector<std::string> list_cases() {
  std::vector<std::string> names;
  for (const auto& c : all_cases()) names.push_back(c.name);
  return names;
}

const CorpusCase& get_case(const std::string& name) {
  for (const auto& c : all_cases())
    if (c.name == name) return c;
  fail(Errc::UnknownCase, "unknown corpus case '" + name + "'");
}

std::string corpus_manifest_json() {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : all_cases()) {
    nlohmann::ordered_json rec;
    rec["name"] = c.name;
    rec["category"] = c.category;
    rec["race"] = c.race;
    rec["ilu"] = c.ilu;
    arr.push_back(std::move(rec));
  }
  return arr.dump(2) + "\n";
}

}  // namespace tbrilab
