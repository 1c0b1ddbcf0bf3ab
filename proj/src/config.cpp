#include "mode/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mode/errors.hpp"

namespace mode {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  const auto sit = sections.find(section);
  return sit != sections.end() && sit->second.count(key) > 0;
}

std::string ConfigFile::get_str(const std::string& section,
                                const std::string& key,
                                const std::string& fallback) const {
  const auto sit = sections.find(section);
  if (sit == sections.end()) return fallback;
  const auto kit = sit->second.find(key);
  return kit == sit->second.end() ? fallback : kit->second;
}

double ConfigFile::get_double(const std::string& section,
                              const std::string& key, double fallback) const {
  if (!has(section, key)) return fallback;
  const std::string raw = get_str(section, key, "");
  try {
    size_t pos = 0;
    const double v = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: [" + section + "] " + key +
                      " is not a number: '" + raw + "'");
  }
}

int ConfigFile::get_int(const std::string& section, const std::string& key,
                        int fallback) const {
  if (!has(section, key)) return fallback;
  const std::string raw = get_str(section, key, "");
  try {
    size_t pos = 0;
    const int v = std::stoi(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: [" + section + "] " + key +
                      " is not an integer: '" + raw + "'");
  }
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key,
                          bool fallback) const {
  if (!has(section, key)) return fallback;
  std::string raw = get_str(section, key, "");
  std::transform(raw.begin(), raw.end(), raw.begin(), ::tolower);
  if (raw == "true" || raw == "1" || raw == "yes") return true;
  if (raw == "false" || raw == "0" || raw == "no") return false;
  throw ConfigError("config: [" + section + "] " + key +
                    " is not a boolean: '" + raw + "'");
}

std::vector<std::string> ConfigFile::get_list(const std::string& section,
                                              const std::string& key) const {
  std::vector<std::string> out;
  const std::string raw = get_str(section, key, "");
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

ConfigFile parse_config(const std::string& text) {
  ConfigFile cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      cfg.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key");
    cfg.sections[section][key] = value;
  }
  return cfg;
}

ConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  const ConfigFile cfg = load_config(path);
  RunConfig rc;
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  if (!cfg.has("paths", "rig")) throw ConfigError("config: [paths] rig missing");
  rc.rig_path = resolve(cfg.get_str("paths", "rig", ""));
  if (cfg.has("paths", "scene"))
    rc.scene_path = resolve(cfg.get_str("paths", "scene", ""));
  rc.out_dir = resolve(cfg.get_str("paths", "out", "out"));

  rc.render.erp_width = cfg.get_int("render", "erp_width", rc.render.erp_width);
  rc.render.erp_height =
      cfg.get_int("render", "erp_height", rc.render.erp_height);
  rc.render.geer_width =
      cfg.get_int("render", "geer_width", rc.render.geer_width);
  rc.render.geer_height =
      cfg.get_int("render", "geer_height", rc.render.geer_height);
  rc.render.png_bits = cfg.get_int("render", "png_bits", rc.render.png_bits);

  rc.stereo.census_window =
      cfg.get_int("stereo", "census_window", rc.stereo.census_window);
  rc.stereo.num_disparities =
      cfg.get_int("stereo", "num_disparities", rc.stereo.num_disparities);
  rc.stereo.p1 = static_cast<float>(cfg.get_double("stereo", "p1", rc.stereo.p1));
  rc.stereo.p2 = static_cast<float>(cfg.get_double("stereo", "p2", rc.stereo.p2));
  rc.stereo.temperature = static_cast<float>(
      cfg.get_double("stereo", "temperature", rc.stereo.temperature));
  rc.stereo.lr_tolerance = static_cast<float>(
      cfg.get_double("stereo", "lr_tolerance", rc.stereo.lr_tolerance));
  rc.stereo.blind_margin =
      cfg.get_int("stereo", "blind_margin", rc.stereo.blind_margin);

  rc.sweep.grid_width = cfg.get_int("sweep", "grid_width", rc.sweep.grid_width);
  rc.sweep.grid_height =
      cfg.get_int("sweep", "grid_height", rc.sweep.grid_height);
  rc.sweep.rho_min = cfg.get_double("sweep", "rho_min", rc.sweep.rho_min);
  rc.sweep.rho_max = cfg.get_double("sweep", "rho_max", rc.sweep.rho_max);
  rc.sweep.num_hypotheses =
      cfg.get_int("sweep", "num_hypotheses", rc.sweep.num_hypotheses);
  rc.sweep.temperature = static_cast<float>(
      cfg.get_double("sweep", "temperature", rc.sweep.temperature));
  rc.sweep.p1 = static_cast<float>(cfg.get_double("sweep", "p1", rc.sweep.p1));
  rc.sweep.p2 = static_cast<float>(cfg.get_double("sweep", "p2", rc.sweep.p2));
  rc.sweep.census_window =
      cfg.get_int("sweep", "census_window", rc.sweep.census_window);
  const std::string cost = cfg.get_str("sweep", "cost", "census");
  if (cost == "census") {
    rc.sweep.cost = SweepCost::kCensus;
  } else if (cost == "zncc") {
    rc.sweep.cost = SweepCost::kZncc;
  } else {
    throw ConfigError("config: [sweep] cost must be census or zncc");
  }

  rc.fusion.conf_floor = static_cast<float>(
      cfg.get_double("fusion", "conf_floor", rc.fusion.conf_floor));
  rc.fusion.fill_holes =
      cfg.get_bool("fusion", "fill_holes", rc.fusion.fill_holes);

  rc.metrics.silog_lambda =
      cfg.get_double("metrics", "silog_lambda", rc.metrics.silog_lambda);

  if (cfg.sections.count("soil")) {
    rc.soil.enabled = true;
    const std::string kind = cfg.get_str("soil", "kind", "mud");
    if (kind == "mud") {
      rc.soil.spec.kind = SoilSpec::Kind::kMud;
    } else if (kind == "water") {
      rc.soil.spec.kind = SoilSpec::Kind::kWater;
    } else if (kind == "glare") {
      rc.soil.spec.kind = SoilSpec::Kind::kGlare;
    } else {
      throw ConfigError("config: [soil] kind must be mud, water or glare");
    }
    rc.soil.spec.seed =
        static_cast<uint64_t>(cfg.get_int("soil", "seed", 0));
    rc.soil.spec.coverage = cfg.get_double("soil", "coverage", 0.3);
    rc.soil.spec.min_radius = cfg.get_double("soil", "min_radius", 6.0);
    rc.soil.spec.max_radius = cfg.get_double("soil", "max_radius", 20.0);
    rc.soil.spec.blur_radius = cfg.get_double("soil", "blur_radius", 6.0);
    rc.soil.spec.glare_gain = cfg.get_double("soil", "glare_gain", 0.9);
    rc.soil.cameras = cfg.get_list("soil", "cameras");
  }

  rc.mode = cfg.get_str("pipeline", "mode", rc.mode);
  rc.views = cfg.get_int("pipeline", "views", rc.views);
  rc.soiled = cfg.get_bool("pipeline", "soiled", rc.soiled);
  for (const std::string& token : cfg.get_list("pipeline", "pairs")) {
    const auto dash = token.find('-');
    if (dash == std::string::npos)
      throw ConfigError("config: pair '" + token + "' must be left-right");
    rc.pairs.emplace_back(trim(token.substr(0, dash)),
                          trim(token.substr(dash + 1)));
  }
  rc.validate();
  return rc;
}

void RunConfig::validate() const {
  if (mode != "pairwise" && mode != "sweep")
    throw ConfigError("config: mode must be pairwise or sweep");
  if (render.erp_width < 4 || render.erp_height < 2 ||
      render.geer_width < 2 || render.geer_height < 4)
    throw ConfigError("config: render grid too small");
  if (render.png_bits != 8 && render.png_bits != 16)
    throw ConfigError("config: png_bits must be 8 or 16");
  if (stereo.num_disparities < 3 ||
      stereo.num_disparities > render.geer_width / 2)
    throw ConfigError("config: need 3 <= num_disparities <= geer_width/2");
  if (stereo.blind_margin < 0 || stereo.blind_margin >= render.geer_width / 2)
    throw ConfigError("config: blind_margin outside [0, geer_width/2)");
  if (!(stereo.p1 > 0.0f) || stereo.p2 < stereo.p1 ||
      !(sweep.p1 > 0.0f) || sweep.p2 < sweep.p1)
    throw ConfigError("config: require p2 >= p1 > 0");
  if (!(sweep.rho_min > 0.0) || !(sweep.rho_max > sweep.rho_min) ||
      sweep.num_hypotheses < 2)
    throw ConfigError("config: bad sweep depth range");
  if (!(stereo.temperature > 0.0f) || !(sweep.temperature > 0.0f))
    throw ConfigError("config: temperatures must be > 0");
  if (soil.enabled &&
      (soil.spec.coverage < 0.0 || soil.spec.coverage >= 0.9))
    throw ConfigError("config: soil coverage must be in [0, 0.9)");
  if (views < 0) throw ConfigError("config: views must be >= 0");
}

}  // namespace mode
