#include "sheat/error.hpp"
#include "sheat/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

void print_checks(const sheat::ExperimentReport& r) {
  for (const auto& c : r.checks)
    std::printf("%s  %-40s measured %-12.6g threshold %-12.6g %s\n", c.passed ? "PASS" : "FAIL",
                c.name.c_str(), c.measured, c.threshold, c.detail.c_str());
}

void print_summary(const sheat::ExperimentReport& r) {
  std::printf("mode %s  p %g  k %g  N %d  M %d  samples %zu\n", r.mode.c_str(), r.p, r.k, r.points,
              r.steps, r.samples.size());
  std::printf("lhs %.10g  rhs %.10g  c_meas %.10g +- %.3g\n", r.lhs, r.rhs, r.c_meas, r.c_meas_stderr);
  for (const auto& n : r.notes) std::printf("note: %s\n", n.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic heat equation estimates"};
  app.require_subcommand(1);

  std::string config_path, out_dir, suite, levels, in_dir, format = "csv";
  int samples_override = 0, threads = 1;

  auto* run = app.add_subcommand("run", "main estimate for one configuration");
  run->add_option("--config", config_path, "JSON configuration")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory (default: output.dir of the config)");

  auto* verify = app.add_subcommand("verify", "run one lemma suite");
  verify->add_option("--suite", suite, "suite name")->required();
  verify->add_option("--out", out_dir, "write report.json here");
  verify->add_option("--samples", samples_override, "samples for the scaling suite");
  verify->add_option("--threads", threads, "worker threads");

  auto* sweep = app.add_subcommand("sweep", "refinement study");
  sweep->add_option("--config", config_path, "JSON configuration")->required()->check(CLI::ExistingFile);
  sweep->add_option("--levels", levels, "comma separated NxM levels")->required();
  sweep->add_option("--out", out_dir, "output directory (default: output.dir of the config)");

  auto* report = app.add_subcommand("report", "convert a stored report");
  report->add_option("--in", in_dir, "directory holding report.json")->required();
  report->add_option("--format", format, "csv or json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto cfg = sheat::load_config(config_path);
      if (out_dir.empty()) out_dir = cfg.output_dir;
      sheat::ExperimentReport r;
      if (cfg.suite == "main") {
        r = sheat::run_main_estimate(cfg);
        print_summary(r);
      } else {
        r = sheat::run_lemma_suite(cfg.suite, {.scaling_samples = 20, .threads = cfg.threads});
      }
      print_checks(r);
      const auto path = sheat::emit_report(r, sheat::ReportFormat::json, out_dir);
      std::printf("wrote %s\n", path.string().c_str());
      return r.passed() ? 0 : 1;
    }
    if (*verify) {
      sheat::SuiteOptions opt;
      opt.threads = threads;
      if (samples_override > 0) opt.scaling_samples = samples_override;
      const auto r = sheat::run_lemma_suite(suite, opt);
      print_checks(r);
      if (!out_dir.empty()) {
        const auto path = sheat::emit_report(r, sheat::ReportFormat::json, out_dir);
        std::printf("wrote %s\n", path.string().c_str());
      }
      std::printf("suite %s: %s\n", suite.c_str(), r.passed() ? "PASS" : "FAIL");
      return r.passed() ? 0 : 1;
    }
    if (*sweep) {
      const auto cfg = sheat::load_config(config_path);
      if (out_dir.empty()) out_dir = cfg.output_dir;
      const auto r = sheat::convergence_study(cfg, sheat::parse_levels(levels));
      std::printf("%6s %6s %12s %12s %12s %12s %8s\n", "N", "M", "lhs", "rhs", "c_meas", "exact_err", "order");
      for (const auto& w : r.refinement)
        std::printf("%6d %6d %12.6g %12.6g %12.6g %12.6g %8.3g\n", w.points, w.steps, w.lhs, w.rhs, w.c_meas,
                    w.exact_error, w.order);
      print_checks(r);
      std::printf("wrote %s\n", sheat::emit_report(r, sheat::ReportFormat::csv, out_dir).string().c_str());
      std::printf("wrote %s\n", sheat::emit_report(r, sheat::ReportFormat::json, out_dir).string().c_str());
      return r.passed() ? 0 : 1;
    }
    if (*report) {
      const auto r = sheat::read_report(std::filesystem::path(in_dir) / "report.json");
      const auto path = sheat::emit_report(r, sheat::parse_report_format(format), in_dir);
      std::printf("wrote %s\n", path.string().c_str());
      return 0;
    }
  } catch (const sheat::Error& e) {
    std::fprintf(stderr, "sheat: %s\n", e.what());
    return 2;
  }
  return 0;
}
