#include "tbrilab/cli.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "tbrilab/hb.hpp"
#include "tbrilab/interleave.hpp"
#include "tbrilab/json_io.hpp"
#include "tbrilab/metrics.hpp"

namespace tbrilab {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::Validation, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string granule_name(const Program& p, GranuleId g) {
  return p.pointees[g.pointee].name + "[" + std::to_string(g.index) + "]";
}

std::string format_metric(const std::optional<double>& v) {
  if (!v) return "undefined";
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << *v;
  return os.str();
}

ordered_json metric_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

}  // namespace

CaseResult evaluate_case(const CorpusCase& c, std::size_t max_traces,
                         std::uint32_t executions, std::uint64_t seed) {
  CaseResult r;
  r.name = c.name;
  r.category = c.category;
  r.expected_race = c.race;
  r.expected_ilu = c.ilu;

  Program program = parse_program(c.program);
  Detector detector(program);
  auto consume = [&](const Trace& trace) {
    ++r.traces;
    for (const RaceReport& rep : detector.run(trace)) {
      if (rep.kind == ReportKind::DataRace) ++r.data_races;
      else ++r.reader_ilus;
    }
  };
  if (executions == 0) {
    enumerate_interleavings(program, max_traces, [&](const Trace& t) {
      consume(t);
      return true;
    });
  } else {
    for (std::uint32_t k = 0; k < executions; ++k)
      consume(random_schedule(program, seed + k));
  }
  r.race_detected = r.data_races > 0;
  r.ilu_detected = r.reader_ilus > 0;
  r.pass = r.race_detected == r.expected_race && r.ilu_detected == r.expected_ilu;
  return r;
}

std::string case_result_json(const CaseResult& r) {
  ordered_json rec;
  rec["record"] = "case_result";
  rec["case"] = r.name;
  rec["category"] = r.category;
  rec["traces"] = r.traces;
  rec["data_races"] = r.data_races;
  rec["reader_ilus"] = r.reader_ilus;
  rec["race_detected"] = r.race_detected;
  rec["ilu_detected"] = r.ilu_detected;
  rec["expected_race"] = r.expected_race;
  rec["expected_ilu"] = r.expected_ilu;
  rec["pass"] = r.pass;
  return rec.dump();
}

int cmd_run(const GlobalOptions& g, const RunOptions& o, std::ostream& out, std::ostream& err) {
  try {
    Program program = parse_program(read_file(o.program_path));
    Detector detector(program);

    std::uint64_t traces = 0, tbri_races = 0, tbri_ilus = 0, hb_pairs = 0;
    bool run_tbri = o.engine != EngineChoice::Hb;
    bool run_hb = o.engine != EngineChoice::Tbri;

    auto process = [&](const Trace& trace) {
      std::uint64_t index = traces++;
      if (run_tbri) {
        for (const RaceReport& rep : detector.run(trace)) {
          if (rep.kind == ReportKind::DataRace) ++tbri_races;
          else ++tbri_ilus;
          if (g.quiet) continue;
          if (g.format == OutputFormat::Json) {
            ordered_json rec = ordered_json::parse(report_to_json(program, rep));
            ordered_json line;
            line["record"] = "tbri_report";
            line["trace"] = index;
            line.update(rec);
            out << line.dump() << "\n";
          } else {
            out << "trace " << index << " tbri: " << to_string(rep.kind) << " seq="
                << rep.event_seq << " " << granule_name(program, rep.granule)
                << " ref_tag=" << rep.ref_tag.value()
                << " granule_tag=" << rep.granule_tag.value()
                << " accessor=" << rep.accessor
                << " prior=" << to_string(rep.prior_event_type)
                << " residue=" << rep.prior_tid_residue << "\n";
          }
        }
      }
      if (run_hb) {
        for (const RacyPair& pair : exact_race_check(program, trace)) {
          ++hb_pairs;
          if (g.quiet) continue;
          if (g.format == OutputFormat::Json) {
            ordered_json line;
            line["record"] = "hb_pair";
            line["trace"] = index;
            line["first_seq"] = pair.first_seq;
            line["second_seq"] = pair.second_seq;
            line["pointee"] = program.pointees[pair.granule.pointee].name;
            line["granule_index"] = pair.granule.index;
            out << line.dump() << "\n";
          } else {
            out << "trace " << index << " hb: racy pair seq " << pair.first_seq << " ~ seq "
                << pair.second_seq << " at " << granule_name(program, pair.granule) << "\n";
          }
        }
      }
    };

    if (o.schedule == ScheduleChoice::Enumerate) {
      enumerate_interleavings(program, g.max_traces, [&](const Trace& t) {
        process(t);
        return true;
      });
    } else {
      process(random_schedule(program, g.seed));
    }

    if (g.format == OutputFormat::Json) {
      ordered_json line;
      line["record"] = "run_summary";
      line["traces"] = traces;
      line["tbri_data_races"] = tbri_races;
      line["tbri_reader_ilus"] = tbri_ilus;
      line["hb_racy_pairs"] = hb_pairs;
      out << line.dump() << "\n";
    } else {
      out << "traces=" << traces << " tbri_data_races=" << tbri_races
          << " tbri_reader_ilus=" << tbri_ilus << " hb_racy_pairs=" << hb_pairs << "\n";
    }
    return tbri_races + tbri_ilus + hb_pairs > 0 ? 1 : 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_fuzz(const GlobalOptions& g, const FuzzOptions& o, std::ostream& out, std::ostream& err) {
  try {
    FuzzConfig cfg;
    cfg.count = o.count;
    cfg.seed = g.seed;
    cfg.max_threads = o.max_threads;
    cfg.max_events_per_thread = o.max_events;
    cfg.max_pointees = o.max_pointees;
    cfg.max_locks = o.max_locks;
    cfg.max_traces = g.max_traces;
    FuzzSummary s = run_fuzz(cfg);

    if (!o.out_path.empty() && !s.counterexamples.empty()) {
      ordered_json arr = ordered_json::array();
      for (const FuzzCounterexample& ce : s.counterexamples) {
        ordered_json rec;
        rec["program_index"] = ce.program_index;
        rec["program"] = ce.program_text;
        rec["trace"] = ordered_json::parse(ce.trace_json);
        ordered_json reps = ordered_json::array();
        Program program = parse_program(ce.program_text);
        for (const RaceReport& r : ce.reports)
          reps.push_back(ordered_json::parse(report_to_json(program, r)));
        rec["reports"] = std::move(reps);
        arr.push_back(std::move(rec));
      }
      std::ofstream outf(o.out_path, std::ios::binary);
      if (!outf) fail(Errc::Validation, "cannot write '" + o.out_path + "'");
      outf << arr.dump(2) << "\n";
    }

    if (g.format == OutputFormat::Json) {
      ordered_json line;
      line["record"] = "fuzz_summary";
      line["programs"] = s.programs;
      line["traces"] = s.traces;
      line["data_races"] = s.data_races;
      line["reader_ilus"] = s.reader_ilus;
      line["confirmed"] = s.confirmed;
      line["unconfirmed"] = s.unconfirmed;
      out << line.dump() << "\n";
    } else {
      out << "programs=" << s.programs << " traces=" << s.traces
          << " data_races=" << s.data_races << " reader_ilus=" << s.reader_ilus
          << " confirmed=" << s.confirmed << " unconfirmed=" << s.unconfirmed << "\n";
    }
    return s.unconfirmed > 0 ? 1 : 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_cases(const GlobalOptions& g, const CasesOptions& o, std::ostream& out, std::ostream& err) {
  try {
    if (!o.run) {
      for (const std::string& name : list_cases()) {
        if (g.format == OutputFormat::Json) {
          const CorpusCase& c = get_case(name);
          ordered_json line;
          line["record"] = "case";
          line["case"] = c.name;
          line["category"] = c.category;
          line["race"] = c.race;
          line["ilu"] = c.ilu;
          line["notes"] = c.notes;
          out << line.dump() << "\n";
        } else {
          out << name << "\n";
        }
      }
      return 0;
    }

    // Expected labels come from the built-ins unless a manifest overrides.
    std::map<std::string, std::pair<bool, bool>> expected;
    if (!o.manifest_path.empty()) {
      ordered_json manifest;
      try {
        manifest = ordered_json::parse(read_file(o.manifest_path));
      } catch (const nlohmann::json::exception& e) {
        fail(Errc::Parse, std::string("manifest: ") + e.what());
      }
      for (const auto& rec : manifest)
        expected[rec.at("name").get<std::string>()] = {rec.at("race").get<bool>(),
                                                       rec.at("ilu").get<bool>()};
    }

    bool all_pass = true;
    for (const CorpusCase& c : all_cases()) {
      CorpusCase effective = c;
      if (auto it = expected.find(c.name); it != expected.end()) {
        effective.race = it->second.first;
        effective.ilu = it->second.second;
      }
      CaseResult r = evaluate_case(effective, g.max_traces, o.executions, g.seed);
      all_pass = all_pass && r.pass;
      if (g.format == OutputFormat::Json) {
        out << case_result_json(r) << "\n";
      } else {
        out << (r.pass ? "PASS" : "FAIL") << " " << r.name << " [" << r.category << "]"
            << " traces=" << r.traces << " data_races=" << r.data_races
            << " reader_ilus=" << r.reader_ilus << " expected{race=" << r.expected_race
            << " ilu=" << r.expected_ilu << "}\n";
      }
    }
    return all_pass ? 0 : 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_metrics(const GlobalOptions& g, const MetricsOptions& o, std::ostream& out,
                std::ostream& err) {
  try {
    ordered_json manifest;
    try {
      manifest = ordered_json::parse(read_file(o.manifest_path));
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::Parse, std::string("manifest: ") + e.what());
    }

    // Reports: line-delimited case_result records (or one JSON array).
    std::map<std::string, bool> observed;
    std::string reports_text = read_file(o.reports_path);
    auto ingest = [&](const ordered_json& rec) {
      if (rec.contains("record") && rec.at("record") != "case_result") return;
      observed[rec.at("case").get<std::string>()] = rec.at("race_detected").get<bool>();
    };
    try {
      std::string trimmed = reports_text;
      std::size_t first = trimmed.find_first_not_of(" \t\r\n");
      if (first != std::string::npos && trimmed[first] == '[') {
        for (const auto& rec : ordered_json::parse(trimmed)) ingest(rec);
      } else {
        std::istringstream lines(reports_text);
        std::string line;
        while (std::getline(lines, line)) {
          if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
          ingest(ordered_json::parse(line));
        }
      }
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::Parse, std::string("reports: ") + e.what());
    }

    ConfusionCounts counts;
    std::size_t joined = 0;
    for (const auto& rec : manifest) {
      std::string name = rec.at("name").get<std::string>();
      auto it = observed.find(name);
      if (it == observed.end())
        fail(Errc::JoinError, "case '" + name + "' has no observed report record");
      ++joined;
      bool expected_race = rec.at("race").get<bool>();
      bool detected = it->second;
      if (expected_race && detected) ++counts.tp;
      else if (!expected_race && detected) ++counts.fp;
      else if (expected_race && !detected) ++counts.fn;
      else ++counts.tn;
    }
    if (joined != observed.size())
      fail(Errc::JoinError, "observed reports name cases absent from the manifest");

    MetricsResult m = compute_metrics(counts);
    if (g.format == OutputFormat::Json) {
      ordered_json line;
      line["record"] = "metrics";
      line["tp"] = counts.tp;
      line["fp"] = counts.fp;
      line["fn"] = counts.fn;
      line["tn"] = counts.tn;
      line["precision"] = metric_json(m.precision);
      line["recall"] = metric_json(m.recall);
      line["accuracy"] = metric_json(m.accuracy);
      line["f1"] = metric_json(m.f1);
      out << line.dump() << "\n";
    } else {
      out << "counts: tp=" << counts.tp << " fp=" << counts.fp << " fn=" << counts.fn
          << " tn=" << counts.tn << "\n";
      out << "precision=" << format_metric(m.precision) << " recall=" << format_metric(m.recall)
          << " accuracy=" << format_metric(m.accuracy) << " f1=" << format_metric(m.f1) << "\n";
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace tbrilab
