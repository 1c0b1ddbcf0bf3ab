#include "mode/metrics.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "mode/errors.hpp"

namespace mode {

namespace {

// Kahan-compensated accumulator; summation order is the fixed pixel order,
// so results do not depend on threading or platform reassociation.
struct Accum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

bool usable(float pred, float gt, uint8_t mask) {
  return mask && std::isfinite(pred) && std::isfinite(gt);
}

void check_grids(const FloatMap& pred, const FloatMap& gt,
                 const ValidityMask& mask) {
  if (pred.width != gt.width || pred.height != gt.height ||
      mask.width != pred.width || mask.height != pred.height)
    throw ConfigError("metrics: grids differ");
}

}  // namespace

double MetricReport::at(const std::string& name) const {
  for (const auto& [k, v] : values)
    if (k == name) return v;
  throw ConfigError("MetricReport: no metric named '" + name + "'");
}

MetricReport disparity_metrics(const FloatMap& pred, const FloatMap& gt,
                               const ValidityMask& mask) {
  check_grids(pred, gt, mask);
  Accum abs_err, sq_err;
  int64_t n = 0, excluded = 0;
  int64_t px1 = 0, px3 = 0, px5 = 0, d1 = 0;
  for (size_t i = 0; i < pred.data.size(); ++i) {
    if (!usable(pred.data[i], gt.data[i], mask.data[i])) {
      ++excluded;
      continue;
    }
    const double e = std::abs(double(pred.data[i]) - double(gt.data[i]));
    abs_err.add(e);
    sq_err.add(e * e);
    if (e > 1.0) ++px1;
    if (e > 3.0) ++px3;
    if (e > 5.0) ++px5;
    if (e > 3.0 && e > 0.05 * std::abs(double(gt.data[i]))) ++d1;
    ++n;
  }
  if (n == 0) throw ConfigError("disparity_metrics: empty evaluation mask");
  const double dn = static_cast<double>(n);
  MetricReport rep;
  rep.pixels_used = n;
  rep.pixels_excluded = excluded;
  rep.values = {{"MAE", abs_err.sum / dn},
                {"RMSE", std::sqrt(sq_err.sum / dn)},
                {"Px1", 100.0 * px1 / dn},
                {"Px3", 100.0 * px3 / dn},
                {"Px5", 100.0 * px5 / dn},
                {"D1", 100.0 * d1 / dn}};
  return rep;
}

MetricReport depth_metrics(const FloatMap& pred, const FloatMap& gt,
                           const ValidityMask& mask, double lambda) {
  check_grids(pred, gt, mask);
  Accum abs_err, sq_err, abs_rel, sq_rel, dlog, dlog2;
  int64_t n = 0, excluded = 0;
  int64_t del1 = 0, del2 = 0, del3 = 0;
  const double t1 = 1.25, t2 = 1.25 * 1.25, t3 = 1.25 * 1.25 * 1.25;
  for (size_t i = 0; i < pred.data.size(); ++i) {
    if (!usable(pred.data[i], gt.data[i], mask.data[i])) {
      ++excluded;
      continue;
    }
    const double y = gt.data[i], yh = pred.data[i];
    if (!(y > 0.0) || !(yh > 0.0))
      throw std::domain_error("depth_metrics: nonpositive value on mask");
    const double e = std::abs(yh - y);
    abs_err.add(e);
    sq_err.add(e * e);
    abs_rel.add(e / y);
    sq_rel.add(e * e / y);
    const double d = std::log(yh) - std::log(y);
    dlog.add(d);
    dlog2.add(d * d);
    const double ratio = std::max(yh / y, y / yh);
    if (ratio < t1) ++del1;
    if (ratio < t2) ++del2;
    if (ratio < t3) ++del3;
    ++n;
  }
  if (n == 0) throw ConfigError("depth_metrics: empty evaluation mask");
  const double dn = static_cast<double>(n);
  MetricReport rep;
  rep.pixels_used = n;
  rep.pixels_excluded = excluded;
  rep.values = {{"MAE", abs_err.sum / dn},
                {"RMSE", std::sqrt(sq_err.sum / dn)},
                {"AbsRel", abs_rel.sum / dn},
                {"SqRel", sq_rel.sum / dn},
                {"SILog", dlog2.sum / dn - lambda * (dlog.sum / dn) * (dlog.sum / dn)},
                {"Delta1", 100.0 * del1 / dn},
                {"Delta2", 100.0 * del2 / dn},
                {"Delta3", 100.0 * del3 / dn}};
  return rep;
}

std::string report_table(const MetricReport& report) {
  std::ostringstream out;
  size_t name_w = 6;
  for (const auto& [k, v] : report.values) name_w = std::max(name_w, k.size());
  for (const auto& [k, v] : report.values) {
    out << k;
    for (size_t i = k.size(); i < name_w + 2; ++i) out << ' ';
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    out << buf << "\n";
  }
  out << "pixels";
  for (size_t i = 6; i < name_w + 2; ++i) out << ' ';
  out << report.pixels_used << " (" << report.pixels_excluded << " excluded)\n";
  return out.str();
}

std::string report_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  for (const auto& [k, v] : report.values) j[k] = v;
  j["pixels_used"] = report.pixels_used;
  j["pixels_excluded"] = report.pixels_excluded;
  return j.dump(2) + "\n";
}

}  // namespace mode
