#include "sheat/harness.hpp"

#include "sheat/boundary_correction.hpp"
#include "sheat/error.hpp"
#include "sheat/kernels.hpp"
#include "sheat/lp_analysis.hpp"
#include "sheat/mild_solution.hpp"
#include "sheat/numerics.hpp"
#include "sheat/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace sheat {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// JSON has no NaN or infinity; those travel as strings.
json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

double num(const json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "nan") return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  throw ValidationError("report: bad number '" + s + "'");
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void add_sum(SpaceTimeField& acc, const SpaceTimeField& other) {
  for (std::size_t m = 0; m < acc.slices.size(); ++m) acc.slices[m] += other.slices[m];
}

bool has_closed_form(const ExperimentConfig& c) {
  return c.u0.preset == "eigenfunction" && !c.u0.is_zero() && c.f.is_zero() && c.g.is_zero() &&
         c.b.is_zero();
}

BrownianDriver make_driver(const ExperimentConfig& c, std::uint64_t seed) {
  if (c.coupling_steps == 0) return sample_brownian(seed, c.time_grid());
  auto d = sample_brownian(seed, make_time_grid(c.coupling_steps, c.horizon));
  while (d.steps() < c.steps) d = refine_brownian(d);
  return d;
}

double solution_norm(const ExperimentConfig& c, const SpaceTimeField& u, const PolygonDomain& domain) {
  return c.spatial_mode() ? spatial_mode_norm(u, domain, c.k, c.p)
                          : anisotropic_norm_cylinder(u, domain, c.k, c.p).value;
}

double lp_mean_root(std::span<const double> values, double p) {
  std::vector<double> pw(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) pw[i] = pow_abs(values[i], p);
  return std::pow(pairwise_sum(pw) / values.size(), 1.0 / p);
}

}  // namespace

bool ExperimentReport::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

ExperimentReport run_main_estimate(const ExperimentConfig& config) {
  config.validate();
  const auto domain = config.domain.build();
  const auto grid = config.space_grid();
  const auto time = config.time_grid();
  const double p = config.p, k = config.k;
  const int density = config.boundary_density > 0
                          ? config.boundary_density
                          : static_cast<int>(std::ceil(2.0 / grid.spacing()));
  const auto quad = boundary_quadrature(domain, density);

  ExperimentReport rep;
  rep.config = to_json(config);
  rep.mode = config.spatial_mode() ? "spatial" : "anisotropic";
  rep.p = p;
  rep.k = k;
  rep.points = config.points;
  rep.steps = config.steps;
  rep.config_hash = config_hash(config);
  rep.base_seed = config.base_seed;

  const RegionParams region{p, k, std::min(config.eps, 0.5)};
  if (!in_region_R_eps(region))
    rep.notes.push_back("(1/p, k) lies outside R_eps for eps = " + fmt(region.eps) +
                        "; the boundary-correction gain is not covered there");

  const Field u0 = make_initial_datum(config.u0, domain, grid);
  const auto f = make_forcing(config.f, domain, grid, time);
  const auto g = make_forcing(config.g, domain, grid, time);
  const auto b = make_boundary_data(config.b, quad, time);

  const auto compat = validate_compatibility(u0, b, p, k, domain);
  if (compat.checked && !compat.passed)
    throw ValidationError("compatibility u0 = b(0) on the boundary fails (mismatch " +
                          fmt(compat.max_mismatch) + ")");
  if (!compat.note.empty()) rep.notes.push_back(compat.note);

  Field u0_ext;
  if (k < 2.0 / p) {
    u0_ext = trivial_extension(u0, domain);
  } else {
    auto st = stein_extension(u0, domain);
    if (st.fallback) rep.notes.push_back("Stein extension unavailable on this domain; trivial extension used");
    u0_ext = std::move(st.field);
  }

  const auto v1 = compute_v1(u0_ext, time);
  const auto v2 = config.f.is_zero() ? SpaceTimeField(grid, time) : compute_v2(f, time);
  SpaceTimeField det = v1;
  add_sum(det, v2);
  const auto det_trace = restrict_to_boundary(det, quad);
  const HeatIbvpSolver solver(domain, grid, time);

  const auto family = build_lp_family(grid);
  rep.rhs_u0 = config.u0.is_zero() ? 0.0 : besov_norm_rn(u0_ext, k - 2.0 / p, p, family);
  rep.rhs_f = config.f.is_zero() ? 0.0 : parabolic_potential_norm(f, k - 2.0, p);
  rep.rhs_g = config.g.is_zero() ? 0.0 : parabolic_potential_norm(g, k - 1.0, p);
  rep.rhs_b = config.b.is_zero() ? 0.0 : boundary_norm(b, k - 1.0 / p, p).value;
  const double rhs = rep.rhs_u0 + rep.rhs_f + rep.rhs_g + rep.rhs_b;

  const bool exact = has_closed_form(config);
  const auto& box = domain.bounding_box();
  const Vec2 ext = box.hi - box.lo;
  const double lambda =
      std::numbers::pi * std::numbers::pi * (1.0 / (ext.x() * ext.x()) + 1.0 / (ext.y() * ext.y()));

  const SampleEnsemble ens{config.base_seed, config.samples};
  std::vector<double> lhs(config.samples), final_error(config.samples, 0.0);
  bool initial_trace_zeroed = false;
  parallel_for(config.samples, config.threads, [&](std::size_t i) {
    const auto seed = ens.seed(static_cast<int>(i));
    SpaceTimeField v3(grid, time);
    if (!config.g.is_zero()) v3 = compute_v3(g, make_driver(config, seed));
    BoundaryTrace bprime = b;
    bprime.values -= det_trace.values;
    if (!config.g.is_zero()) bprime.values -= restrict_to_boundary(v3, quad).values;
    const bool zeroed = zero_initial_trace(bprime, p, k);
    if (i == 0) initial_trace_zeroed = zeroed;
    const auto h = solver.solve(bprime);
    const auto u = assemble_u(v1, v2, v3, h, domain);
    lhs[i] = solution_norm(config, u, domain);
    if (exact && i == 0) {
      const Grid2d ue = std::exp(-lambda * config.horizon) * u0.values;
      const auto mask = closure_mask(grid, domain);
      const Grid2d diff = mask.select(u.slices.back() - ue, 0.0);
      final_error[0] = diff.abs().maxCoeff() / ue.abs().maxCoeff();
    }
  });
  if (initial_trace_zeroed) rep.notes.push_back("k > 2/p: b'(0) set to zero before solving for h");

  for (int i = 0; i < config.samples; ++i)
    rep.samples.push_back({i, ens.seed(i), lhs[i], rhs});
  rep.lhs = lp_mean_root(lhs, p);
  rep.rhs = rhs;
  rep.c_meas = rhs > 0.0 ? rep.lhs / rhs : kNaN;

  // batch means of lhs_i^p, then the delta method for E^{1/p} / rhs
  const int batches = std::min(10, config.samples);
  if (batches >= 2 && rhs > 0.0) {
    std::vector<double> means;
    for (int bt = 0; bt < batches; ++bt) {
      const int lo = bt * config.samples / batches, hi = (bt + 1) * config.samples / batches;
      std::vector<double> pw;
      for (int i = lo; i < hi; ++i) pw.push_back(pow_abs(lhs[i], p));
      means.push_back(pairwise_sum(pw) / pw.size());
    }
    const auto mom = sample_moments(means);
    const double mean_p = pow_abs(rep.lhs, p);
    const double se = std::sqrt(mom.variance / batches);
    rep.c_meas_stderr = mean_p > 0.0 ? rep.lhs / (p * mean_p) * se / rhs : 0.0;
  }

  if (rhs == 0.0) {
    rep.trivially_satisfied = rep.lhs == 0.0;
    rep.checks.push_back({"trivially satisfied", rep.lhs, 0.0, rep.trivially_satisfied,
                          "all data vanish, so lhs must vanish and c_meas is undefined"});
  } else {
    rep.checks.push_back({"c_meas finite", rep.c_meas, 0.0, std::isfinite(rep.c_meas) && rep.c_meas > 0.0,
                          "lhs / rhs with rhs = " + fmt(rhs)});
  }
  if (config.g.is_zero()) {
    double spread = 0.0;
    for (double v : lhs) spread = std::max(spread, std::abs(v - lhs[0]));
    rep.checks.push_back({"driver-free samples", spread, 0.0, spread == 0.0,
                          "g = 0: max |lhs_i - lhs_0| must vanish"});
  }
  if (exact) {
    SpaceTimeField ue(grid, time);
    for (int m = 0; m < time.nodes(); ++m) ue.slices[m] = std::exp(-lambda * time.time(m)) * u0.values;
    const double lhs_exact = solution_norm(config, ue, domain);
    const double rel = std::abs(rep.lhs - lhs_exact) / lhs_exact;
    rep.checks.push_back({"lhs vs closed form", rel, 0.02, rel <= 0.02,
                          "relative difference to the norm of exp(-lambda t) u0, lambda = " + fmt(lambda)});
    rep.checks.push_back({"final-time error vs closed form", final_error[0], 0.02, final_error[0] <= 0.02,
                          "max |u(T) - exp(-lambda T) u0| / max |exp(-lambda T) u0| over the closure"});
  }
  return rep;
}

std::vector<Level> parse_levels(const std::string& text) {
  std::vector<Level> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    Level lv;
    char x = 0;
    std::stringstream is(item);
    if (!(is >> lv.points >> x >> lv.steps) || x != 'x' || !(is >> std::ws).eof())
      throw ConfigurationError("levels: expected NxM items, got '" + item + "'");
    out.push_back(lv);
  }
  if (out.empty()) throw ConfigurationError("levels: empty list");
  return out;
}

ExperimentReport convergence_study(const ExperimentConfig& config, const std::vector<Level>& levels) {
  if (levels.empty()) throw ConfigurationError("convergence_study: no levels");
  for (std::size_t l = 1; l < levels.size(); ++l)
    if (levels[l].points < levels[l - 1].points || levels[l].steps < levels[l - 1].steps ||
        (levels[l].points == levels[l - 1].points && levels[l].steps == levels[l - 1].steps))
      throw ConfigurationError("convergence_study: levels must increase");

  int coupling = levels.front().steps;
  for (const auto& lv : levels) {
    const int r = lv.steps / coupling;
    if (lv.steps % coupling != 0 || (r & (r - 1)) != 0) coupling = 0;
  }

  ExperimentReport rep;
  rep.suite = "sweep";
  rep.config = to_json(config);
  rep.mode = config.spatial_mode() ? "spatial" : "anisotropic";
  rep.p = config.p;
  rep.k = config.k;
  rep.config_hash = config_hash(config);
  rep.base_seed = config.base_seed;
  if (coupling == 0) rep.notes.push_back("steps are not dyadic multiples of the first level; drivers share seeds only");

  std::vector<double> dts, errors, cs;
  for (const auto& lv : levels) {
    ExperimentConfig c = config;
    c.points = lv.points;
    c.steps = lv.steps;
    c.coupling_steps = coupling;
    const auto r = run_main_estimate(c);

    RefinementRow row;
    row.points = lv.points;
    row.steps = lv.steps;
    row.spacing = c.space_grid().spacing();
    row.dt = c.time_grid().dt();
    row.lhs = r.lhs;
    row.rhs = r.rhs;
    row.c_meas = r.c_meas;
    row.exact_error = kNaN;
    row.order = kNaN;
    for (const auto& ch : r.checks) {
      if (ch.name == "final-time error vs closed form") row.exact_error = ch.measured;
      // the 2% closed-form tolerance belongs to a single fine run; across a
      // sweep the errors are judged by their order
      if (ch.name.find("closed form") != std::string::npos) continue;
      rep.checks.push_back({ch.name + " @ " + std::to_string(lv.points) + "x" + std::to_string(lv.steps),
                            ch.measured, ch.threshold, ch.passed, ch.detail});
    }
    const auto domain = c.domain.build();
    const Field u0 = trivial_extension(make_initial_datum(c.u0, domain, c.space_grid()), domain);
    const double m0 = mass(u0);
    row.mass_defect = std::abs(mass(heat_convolve(u0, c.horizon)) - m0);
    rep.checks.push_back({"mass conservation @ " + std::to_string(lv.points) + "x" + std::to_string(lv.steps),
                          row.mass_defect, 1e-10 * (1.0 + std::abs(m0)),
                          row.mass_defect <= 1e-10 * (1.0 + std::abs(m0)), "|mass(S(T) u0) - mass(u0)|"});
    if (!rep.refinement.empty() && std::isfinite(row.exact_error)) {
      const auto& prev = rep.refinement.back();
      row.order = std::log(prev.exact_error / row.exact_error) / std::log(prev.dt / row.dt);
    }
    rep.refinement.push_back(row);
    dts.push_back(row.dt);
    errors.push_back(row.exact_error);
    cs.push_back(row.c_meas);
    for (const auto& n : r.notes)
      if (std::find(rep.notes.begin(), rep.notes.end(), n) == rep.notes.end()) rep.notes.push_back(n);
  }

  if (levels.size() >= 2 && std::isfinite(errors.front())) {
    const double order = observed_order(dts, errors);
    rep.checks.push_back({"observed temporal order", order, 0.9, order >= 0.9,
                          "least-squares slope of the final-time error against dt"});
  }
  if (levels.size() >= 2 && !config.g.is_zero() && std::isfinite(cs.front())) {
    const double spread = *std::max_element(cs.begin(), cs.end()) / *std::min_element(cs.begin(), cs.end());
    rep.checks.push_back({"c_meas spread across levels", spread, 2.0, spread < 2.0,
                          "max / min of c_meas over the refinement"});
  }
  return rep;
}

json to_json(const ExperimentReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"index", s.index}, {"seed", s.seed}, {"lhs", num(s.lhs)}, {"rhs", num(s.rhs)}});
  json rows = json::array();
  for (const auto& w : r.refinement)
    rows.push_back({{"points", w.points},        {"steps", w.steps},
                    {"spacing", num(w.spacing)}, {"dt", num(w.dt)},
                    {"lhs", num(w.lhs)},         {"rhs", num(w.rhs)},
                    {"c_meas", num(w.c_meas)},   {"exact_error", num(w.exact_error)},
                    {"mass_defect", num(w.mass_defect)}, {"order", num(w.order)}});
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"measured", num(c.measured)},
                      {"threshold", num(c.threshold)},
                      {"passed", c.passed},
                      {"detail", c.detail}});
  return {{"suite", r.suite},
          {"config", r.config},
          {"mode", r.mode},
          {"p", num(r.p)},
          {"k", num(r.k)},
          {"points", r.points},
          {"steps", r.steps},
          {"samples", samples},
          {"aggregate",
           {{"lhs", num(r.lhs)},
            {"rhs", num(r.rhs)},
            {"c_meas", num(r.c_meas)},
            {"c_meas_stderr", num(r.c_meas_stderr)},
            {"trivially_satisfied", r.trivially_satisfied}}},
          {"rhs_terms", {{"u0", num(r.rhs_u0)}, {"f", num(r.rhs_f)}, {"g", num(r.rhs_g)}, {"b", num(r.rhs_b)}}},
          {"refinement", rows},
          {"checks", checks},
          {"notes", r.notes},
          {"provenance",
           {{"config_hash", r.config_hash}, {"base_seed", r.base_seed}, {"code_version", r.code_version}}},
          {"passed", r.passed()}};
}

ExperimentReport report_from_json(const json& j) {
  try {
    ExperimentReport r;
    r.suite = j.at("suite").get<std::string>();
    r.config = j.at("config");
    r.mode = j.at("mode").get<std::string>();
    r.p = num(j.at("p"));
    r.k = num(j.at("k"));
    r.points = j.at("points").get<int>();
    r.steps = j.at("steps").get<int>();
    for (const auto& s : j.at("samples"))
      r.samples.push_back({s.at("index").get<int>(), s.at("seed").get<std::uint64_t>(), num(s.at("lhs")),
                           num(s.at("rhs"))});
    const auto& a = j.at("aggregate");
    r.lhs = num(a.at("lhs"));
    r.rhs = num(a.at("rhs"));
    r.c_meas = num(a.at("c_meas"));
    r.c_meas_stderr = num(a.at("c_meas_stderr"));
    r.trivially_satisfied = a.at("trivially_satisfied").get<bool>();
    const auto& t = j.at("rhs_terms");
    r.rhs_u0 = num(t.at("u0"));
    r.rhs_f = num(t.at("f"));
    r.rhs_g = num(t.at("g"));
    r.rhs_b = num(t.at("b"));
    for (const auto& w : j.at("refinement"))
      r.refinement.push_back({w.at("points").get<int>(), w.at("steps").get<int>(), num(w.at("spacing")),
                              num(w.at("dt")), num(w.at("lhs")), num(w.at("rhs")), num(w.at("c_meas")),
                              num(w.at("exact_error")), num(w.at("mass_defect")), num(w.at("order"))});
    for (const auto& c : j.at("checks"))
      r.checks.push_back({c.at("name").get<std::string>(), num(c.at("measured")), num(c.at("threshold")),
                          c.at("passed").get<bool>(), c.at("detail").get<std::string>()});
    r.notes = j.at("notes").get<std::vector<std::string>>();
    const auto& pv = j.at("provenance");
    r.config_hash = pv.at("config_hash").get<std::string>();
    r.base_seed = pv.at("base_seed").get<std::uint64_t>();
    r.code_version = pv.at("code_version").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("report: ") + e.what());
  }
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  throw ConfigurationError("unknown report format '" + name + "'");
}

std::string report_csv(const ExperimentReport& r) {
  std::ostringstream os;
  if (r.suite == "sweep") {
    os << "suite,lemma,p,k,N,M,h,dt,lhs,rhs,ratio,exact_error,order,mass_defect,seed\n";
    for (const auto& w : r.refinement)
      os << r.suite << ',' << r.mode << ',' << fmt(r.p) << ',' << fmt(r.k) << ',' << w.points << ','
         << w.steps << ',' << fmt(w.spacing) << ',' << fmt(w.dt) << ',' << fmt(w.lhs) << ','
         << fmt(w.rhs) << ',' << fmt(w.c_meas) << ',' << fmt(w.exact_error) << ',' << fmt(w.order)
         << ',' << fmt(w.mass_defect) << ',' << r.base_seed << '\n';
    return os.str();
  }
  os << "suite,lemma,p,k,N,M,sample,lhs,rhs,ratio,seed\n";
  if (r.suite == "main") {
    const std::string params =
        fmt(r.p) + ',' + fmt(r.k) + ',' + std::to_string(r.points) + ',' + std::to_string(r.steps);
    for (const auto& s : r.samples)
      os << r.suite << ',' << r.mode << ',' << params << ',' << s.index << ',' << fmt(s.lhs) << ','
         << fmt(s.rhs) << ',' << fmt(s.rhs > 0 ? s.lhs / s.rhs : kNaN) << ',' << s.seed << '\n';
    if (!r.samples.empty())
      os << r.suite << ',' << r.mode << ',' << params << ",AGG," << fmt(r.lhs) << ',' << fmt(r.rhs)
         << ',' << fmt(r.c_meas) << ',' << r.base_seed << '\n';
    return os.str();
  }
  for (const auto& c : r.checks) {
    std::string name = c.name;
    for (char& ch : name)
      if (ch == ',') ch = ';';
    os << r.suite << ',' << name << ",,,,,check," << fmt(c.measured) << ',' << fmt(c.threshold) << ','
       << fmt(c.threshold != 0.0 ? c.measured / c.threshold : kNaN) << ',' << r.base_seed << '\n';
  }
  return os.str();
}

std::filesystem::path emit_report(const ExperimentReport& report, ReportFormat format,
                                  const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
  std::filesystem::path path = dir;
  if (format == ReportFormat::json)
    path /= "report.json";
  else
    path /= report.suite == "sweep" ? "sweep.csv" : "report.csv";
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  if (format == ReportFormat::json)
    out << to_json(report).dump(2) << '\n';
  else
    out << report_csv(report);
  out.close();
  if (!out) throw Error("write failed for " + path.string());
  return path;
}

ExperimentReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return report_from_json(j);
}

}  // namespace sheat
