#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mode/image.hpp"

namespace mode {

struct MetricReport {
  // Ordered name/value pairs; percentages are in [0, 100].
  std::vector<std::pair<std::string, double>> values;
  int64_t pixels_used = 0;
  int64_t pixels_excluded = 0;

  double at(const std::string& name) const;
};

// Disparity errors in pixels: MAE, RMSE, Px1/3/5 (percentage with
// |error| > n, strict) and D1 (|error| > 3 and > 5% of ground truth).
MetricReport disparity_metrics(const FloatMap& pred, const FloatMap& gt,
                               const ValidityMask& mask);

// Depth errors in meters: MAE, RMSE, AbsRel, SqRel, SILog (with the given
// lambda) and Delta1/2/3 (percentage with max ratio < 1.25^n, strict).
MetricReport depth_metrics(const FloatMap& pred, const FloatMap& gt,
                           const ValidityMask& mask, double lambda = 0.5);

std::string report_table(const MetricReport& report);
std::string report_json(const MetricReport& report);

}  // namespace mode
