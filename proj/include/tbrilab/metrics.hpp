#pragma once

#include <cstdint>
#include <optional>

#include "tbrilab/error.hpp"

namespace tbrilab {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;
};

/// 0/0 components are reported as absent, never silently 0 or 1.
struct MetricsResult {
  std::optional<double> precision;  // tp / (tp + fp)
  std::optional<double> recall;     // tp / (tp + fn)
  std::optional<double> accuracy;   // (tp + tn) / total
  std::optional<double> f1;         // harmonic mean of precision and recall
};

inline MetricsResult compute_metrics(const ConfusionCounts& c) {
  std::uint64_t total = c.tp + c.fp + c.fn + c.tn;
  if (total == 0) fail(Errc::EmptyCounts, "all confusion counts are zero");
  MetricsResult m;
  if (c.tp + c.fp > 0) m.precision = double(c.tp) / double(c.tp + c.fp);
  if (c.tp + c.fn > 0) m.recall = double(c.tp) / double(c.tp + c.fn);
  m.accuracy = double(c.tp + c.tn) / double(total);
  if (m.precision && m.recall && *m.precision + *m.recall > 0.0)
    m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  return m;
}

}  // namespace tbrilab
