#pragma once

#include "sheat/fields.hpp"
#include "sheat/function_spaces.hpp"
#include "sheat/geometry.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sheat {

inline constexpr const char* kCodeVersion = "sheat 0.1.0";

struct DomainSpec {
  std::string type = "unit_square";  // unit_square | l_shape | rectangle | polygon
  Vec2 lo = Vec2::Zero(), hi = Vec2::Ones();
  std::vector<Vec2> vertices;

  PolygonDomain build() const;
};

/// A named data generator. Which parameters matter depends on the preset:
///   u0: zero | eigenfunction | gaussian_bump | rough_lp_block
///   f, g: zero | gaussian_bump | lp_block (both cut off inside a disc of
///         radius `support` around `center`, which must lie in D)
///   b: zero | smooth_time_modulated
struct DataSpec {
  std::string preset = "zero";
  double amplitude = 1.0;
  Vec2 center{0.5, 0.5};
  double width = 0.1;       // Gaussian standard deviation
  double support = 0.3;     // cutoff radius for f, g
  int block = 2;            // Littlewood-Paley block of the lp presets
  std::uint64_t seed = 1;   // white noise behind the lp presets
  double frequency = 2.0 * 3.141592653589793;  // b time modulation
  double modulation = 0.0;  // f, g carry the factor 1 + modulation sin(2 pi t)

  bool is_zero() const { return preset == "zero" || amplitude == 0.0; }
};

struct ExperimentConfig {
  DomainSpec domain;
  int points = 64;
  double half_width = 2.0;
  bool center_set = false;  // otherwise the grid is centred on the bounding box
  Vec2 center{0.5, 0.5};
  int steps = 256;
  double horizon = 0.25;
  double p = 2.0;
  double k = 0.75;
  double eps = 1.0;
  DataSpec u0, f, g, b;
  std::uint64_t base_seed = 1;
  int samples = 200;
  /// When > 0, drivers are drawn on this many steps and bridge-refined up to
  /// `steps`, so runs at different M share their coarse paths.
  int coupling_steps = 0;
  int threads = 1;
  int boundary_density = 0;  // trace nodes per unit length; 0 picks 2 / h
  std::string suite = "main";
  std::string output_dir = "out";

  SpaceGrid space_grid() const;
  TimeGrid time_grid() const;
  /// Throws ConfigurationError on an inadmissible (p, k) or a bad grid.
  void validate() const;
  /// k < 1 measures u in the anisotropic cylinder norm, k >= 1 in the spatial one.
  bool spatial_mode() const { return k >= 1.0; }
};

/// Unknown keys are rejected with ConfigurationError at every level.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

/// FNV-1a of the canonical JSON dump.
std::string config_hash(const ExperimentConfig& config);

// ---- data presets ----

Field make_initial_datum(const DataSpec& spec, const PolygonDomain& domain, const SpaceGrid& grid);
SpaceTimeField make_forcing(const DataSpec& spec, const PolygonDomain& domain,
                            const SpaceGrid& grid, const TimeGrid& time);
BoundaryTrace make_boundary_data(const DataSpec& spec, const BoundaryQuadrature& quad,
                                 const TimeGrid& time);

// ---- reports ----

struct Check {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string detail;
};

struct SampleRecord {
  int index = 0;
  std::uint64_t seed = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct RefinementRow {
  int points = 0;
  int steps = 0;
  double spacing = 0.0;
  double dt = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double c_meas = 0.0;
  double exact_error = 0.0;  // NaN when the preset has no closed form
  double mass_defect = 0.0;  // |mass(S(T) u0) - mass(u0)|
  double order = 0.0;        // observed order of exact_error against dt, NaN on the first row
};

struct ExperimentReport {
  std::string suite = "main";
  nlohmann::json config;  // null for lemma suites
  std::string mode;       // anisotropic | spatial
  double p = 0.0, k = 0.0;
  int points = 0, steps = 0;
  std::vector<SampleRecord> samples;
  double lhs = 0.0;  // (mean lhs_i^p)^{1/p}
  double rhs = 0.0;  // (mean rhs_i^p)^{1/p}
  double c_meas = 0.0;         // NaN when rhs = 0
  double c_meas_stderr = 0.0;  // batch means over 10 batches
  bool trivially_satisfied = false;
  double rhs_u0 = 0.0, rhs_f = 0.0, rhs_g = 0.0, rhs_b = 0.0;
  std::vector<RefinementRow> refinement;
  std::vector<Check> checks;
  std::vector<std::string> notes;
  std::string config_hash;
  std::uint64_t base_seed = 0;
  std::string code_version = kCodeVersion;

  bool passed() const;
};

nlohmann::json to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& j);

/// Per-sample pipeline: extend data, v1 + v2 + v3, boundary trace, b', solve h,
/// assemble u; lhs and rhs per sample; Monte Carlo aggregate.
/// Throws ValidationError when the compatibility condition is required and fails.
ExperimentReport run_main_estimate(const ExperimentConfig& config);

struct Level {
  int points = 0;
  int steps = 0;
};
/// Parses "64x128,128x256".
std::vector<Level> parse_levels(const std::string& text);

/// Reruns run_main_estimate per level. Drivers are coupled through the
/// coarsest level's steps. Throws ConfigurationError unless levels increase.
ExperimentReport convergence_study(const ExperimentConfig& config, const std::vector<Level>& levels);

/// Names accepted by run_lemma_suite.
const std::vector<std::string>& lemma_suite_names();

struct SuiteOptions {
  int scaling_samples = 20;
  int threads = 1;
};
/// Throws ConfigurationError for an unknown name.
ExperimentReport run_lemma_suite(const std::string& name, const SuiteOptions& options = {});

enum class ReportFormat { json, csv };
ReportFormat parse_report_format(const std::string& name);

/// CSV columns: suite, lemma, p, k, N, M, sample, lhs, rhs, ratio, seed. One
/// row per sample plus an AGG row; lemma suites give one row per check and
/// sweeps one row per level.
std::string report_csv(const ExperimentReport& report);
/// Writes report.json or report.csv into dir (sweep.csv for sweeps) and
/// returns the path. Throws Error naming the path on I/O failure.
std::filesystem::path emit_report(const ExperimentReport& report, ReportFormat format,
                                  const std::filesystem::path& dir);
ExperimentReport read_report(const std::filesystem::path& path);

}  // namespace sheat
