#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mode/render.hpp"
#include "mode/sweep.hpp"

namespace mode {

// Minimal TOML-style key/value file: [section] headers, key = value lines,
// '#' comments. Values keep their raw text; typed getters parse on demand.
struct ConfigFile {
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& section, const std::string& key) const;
  std::string get_str(const std::string& section, const std::string& key,
                      const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  int get_int(const std::string& section, const std::string& key,
              int fallback) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;
  std::vector<std::string> get_list(const std::string& section,
                                    const std::string& key) const;
};

ConfigFile parse_config(const std::string& text);
ConfigFile load_config(const std::filesystem::path& path);

struct RenderConfig {
  int erp_width = 1024;
  int erp_height = 512;
  int geer_width = 512;
  int geer_height = 1024;
  int png_bits = 16;
};

struct StereoConfig {
  int census_window = 5;
  int num_disparities = 64;
  float p1 = 0.03f;
  float p2 = 0.3f;
  float temperature = 1.0f;
  float lr_tolerance = 1.0f;
  int blind_margin = 2;
};

struct SweepConfig {
  int grid_width = 256;
  int grid_height = 128;
  double rho_min = 0.5;
  double rho_max = 1000.0;
  int num_hypotheses = 64;
  float temperature = 0.05f;
  float p1 = 0.03f;
  float p2 = 0.3f;
  int census_window = 5;
  SweepCost cost = SweepCost::kCensus;
};

struct FusionConfig {
  float conf_floor = 0.3f;
  bool fill_holes = false;
};

struct MetricsConfig {
  double silog_lambda = 0.5;
};

struct SoilConfig {
  bool enabled = false;
  SoilSpec spec;
  std::vector<std::string> cameras;
};

struct RunConfig {
  std::filesystem::path rig_path;
  std::filesystem::path scene_path;
  std::filesystem::path out_dir;
  RenderConfig render;
  StereoConfig stereo;
  SweepConfig sweep;
  FusionConfig fusion;
  MetricsConfig metrics;
  SoilConfig soil;
  std::string mode = "pairwise";  // "pairwise" or "sweep"
  std::vector<std::pair<std::string, std::string>> pairs;  // empty = all
  int views = 0;                  // 0 = all cameras
  bool soiled = false;

  static RunConfig from_file(const std::filesystem::path& path);
  void validate() const;
};

}  // namespace mode
