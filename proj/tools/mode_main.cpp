#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "mode/errors.hpp"
#include "mode/parallel.hpp"
#include "mode/pipeline.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kDataError = 3;
constexpr int kInternalError = 4;

struct CliOptions {
  std::string config_path;
  std::string mode;
  int views = -1;
  bool soiled = false;
  int threads = 0;
  long long seed = -1;
  std::string pred, gt;
  std::string kind = "depth";
};

mode::RunConfig load(const CliOptions& opt) {
  mode::RunConfig cfg = mode::RunConfig::from_file(opt.config_path);
  if (!opt.mode.empty()) cfg.mode = opt.mode;
  if (opt.views >= 0) cfg.views = opt.views;
  if (opt.soiled) cfg.soiled = true;
  if (opt.seed >= 0) cfg.soil.spec.seed = static_cast<uint64_t>(opt.seed);
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-view omnidirectional depth estimation toolkit"};
  app.require_subcommand(1);

  CliOptions opt;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config_path, "Run configuration file")
        ->required();
    cmd->add_option("--mode", opt.mode, "Pipeline kind: pairwise or sweep");
    cmd->add_option("--views", opt.views, "Use only the first N rig cameras");
    cmd->add_flag("--soiled", opt.soiled, "Feed soiled panoramas to matching");
    cmd->add_option("--threads", opt.threads, "Worker threads (0 = hardware)");
    cmd->add_option("--seed", opt.seed, "Override the soiling seed");
  };

  CLI::App* render = app.add_subcommand(
      "render", "Render panoramas, rectified pairs and ground truth");
  add_common(render);
  CLI::App* estimate =
      app.add_subcommand("estimate", "Estimate a reference-view depth map");
  add_common(estimate);
  CLI::App* eval = app.add_subcommand("eval", "Score a depth/disparity map");
  add_common(eval);
  eval->add_option("--pred", opt.pred, "Prediction PFM (default: last estimate)");
  eval->add_option("--gt", opt.gt, "Ground-truth PFM (default: rendered GT)");
  eval->add_option("--kind", opt.kind, "Metric set: depth or disparity");
  CLI::App* pipeline =
      app.add_subcommand("pipeline", "render -> estimate -> eval");
  add_common(pipeline);

  CLI11_PARSE(app, argc, argv);

  try {
    mode::set_num_threads(opt.threads);
    const mode::RunConfig cfg = load(opt);
    if (render->parsed()) {
      mode::cmd_render(cfg);
    } else if (estimate->parsed()) {
      mode::cmd_estimate(cfg);
    } else if (eval->parsed()) {
      const mode::CameraRig rig = mode::load_rig(cfg.rig_path);
      const int n = static_cast<int>(mode::effective_views(cfg, rig).size());
      const std::string tag = mode::run_tag(cfg, n);
      std::filesystem::path pred =
          opt.pred.empty() ? cfg.out_dir / ("depth_" + tag + ".pfm")
                           : std::filesystem::path(opt.pred);
      std::filesystem::path gt =
          opt.gt.empty() ? cfg.out_dir / "frame" / "depth_gt.pfm"
                         : std::filesystem::path(opt.gt);
      const mode::MetricReport report = mode::cmd_eval(cfg, pred, gt, opt.kind);
      std::cout << mode::report_table(report);
    } else if (pipeline->parsed()) {
      mode::cmd_pipeline(cfg);
    }
  } catch (const mode::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const mode::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kOk;
}
