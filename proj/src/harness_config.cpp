#include "sheat/harness.hpp"

#include "sheat/error.hpp"
#include "sheat/lp_analysis.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace sheat {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw ConfigurationError(std::string(where) + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : j.items())
    if (!ok.count(item.key()))
      throw ConfigurationError(std::string(where) + ": unknown key '" + item.key() + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out, const char* where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string(where) + "." + key + ": " + e.what());
  }
}

Vec2 read_vec(const json& j, const char* where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigurationError(std::string(where) + ": expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json vec_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

DataSpec parse_data(const json& j, const char* where) {
  reject_unknown(j, {"preset", "amplitude", "center", "width", "support", "block", "seed",
                     "frequency", "modulation"},
                 where);
  DataSpec d;
  read(j, "preset", d.preset, where);
  read(j, "amplitude", d.amplitude, where);
  if (j.contains("center")) d.center = read_vec(j.at("center"), where);
  read(j, "width", d.width, where);
  read(j, "support", d.support, where);
  read(j, "block", d.block, where);
  read(j, "seed", d.seed, where);
  read(j, "frequency", d.frequency, where);
  read(j, "modulation", d.modulation, where);
  return d;
}

json data_json(const DataSpec& d) {
  return {{"preset", d.preset},   {"amplitude", d.amplitude}, {"center", vec_json(d.center)},
          {"width", d.width},     {"support", d.support},     {"block", d.block},
          {"seed", d.seed},       {"frequency", d.frequency}, {"modulation", d.modulation}};
}

void require_preset(const DataSpec& d, std::initializer_list<const char*> names, const char* slot) {
  for (const char* n : names)
    if (d.preset == n) return;
  throw ConfigurationError(std::string("data.") + slot + ": unknown preset '" + d.preset + "'");
}

double cutoff(double s) { return s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0; }

Grid2d white_noise(const SpaceGrid& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Grid2d out(grid.points, grid.points);
  for (int j = 0; j < grid.points; ++j)
    for (int i = 0; i < grid.points; ++i) out(i, j) = n01(rng);
  return out;
}

Grid2d lp_block_values(const DataSpec& spec, const SpaceGrid& grid) {
  const auto family = build_lp_family(grid);
  if (!family.has_block(spec.block) || spec.block == kLowBlock)
    throw ConfigurationError("lp block " + std::to_string(spec.block) + " outside " +
                             std::to_string(family.j_min) + ".." + std::to_string(family.j_max));
  return lp_project(Field(grid, white_noise(grid, spec.seed)), spec.block, family).values;
}

void require_interior_support(const DataSpec& spec, const PolygonDomain& domain) {
  if (!(spec.support > 0.0) || !contains(domain, spec.center) ||
      distance_to_boundary(domain, spec.center) < spec.support)
    throw ConfigurationError("disc of radius " + std::to_string(spec.support) +
                             " around the data centre is not inside the domain");
}

}  // namespace

PolygonDomain DomainSpec::build() const {
  if (type == "unit_square") return PolygonDomain::unit_square();
  if (type == "l_shape") return PolygonDomain::l_shape();
  if (type == "rectangle") return PolygonDomain::rectangle(lo, hi);
  if (type == "polygon") return PolygonDomain::from_vertices(vertices);
  throw ConfigurationError("domain.type: unknown '" + type + "'");
}

SpaceGrid ExperimentConfig::space_grid() const {
  Vec2 c = center;
  if (!center_set) {
    const auto box = domain.build().bounding_box();
    c = 0.5 * (box.lo + box.hi);
  }
  return make_space_grid(points, half_width, c);
}

TimeGrid ExperimentConfig::time_grid() const { return make_time_grid(steps, horizon); }

void ExperimentConfig::validate() const {
  if (!(p >= 2.0) || !std::isfinite(p)) throw ConfigurationError("p must satisfy 2 <= p < inf");
  if (!(k > 1.0 / p && k < 1.0 + 1.0 / p))
    throw ConfigurationError("k must satisfy 1/p < k < 1 + 1/p");
  if (!(eps > 0.0 && eps <= 1.0)) throw ConfigurationError("eps must lie in (0, 1]");
  if (samples < 1) throw ConfigurationError("ensemble.count must be positive");
  if (threads < 1) throw ConfigurationError("threads must be positive");
  if (boundary_density < 0) throw ConfigurationError("boundary_density must be >= 0");
  if (coupling_steps < 0 || (coupling_steps > 0 && steps % coupling_steps != 0))
    throw ConfigurationError("ensemble.coupling_steps must divide time.steps");
  if (coupling_steps > 0) {
    const int ratio = steps / coupling_steps;
    if ((ratio & (ratio - 1)) != 0)
      throw ConfigurationError("time.steps / ensemble.coupling_steps must be a power of two");
  }
  space_grid().validate();
  time_grid().validate();
  require_preset(u0, {"zero", "eigenfunction", "gaussian_bump", "rough_lp_block"}, "u0");
  require_preset(f, {"zero", "gaussian_bump", "lp_block"}, "f");
  require_preset(g, {"zero", "gaussian_bump", "lp_block"}, "g");
  require_preset(b, {"zero", "smooth_time_modulated"}, "b");
  if (u0.preset == "eigenfunction" && domain.type != "unit_square" && domain.type != "rectangle")
    throw ConfigurationError("the eigenfunction preset needs a rectangle");
}

ExperimentConfig parse_config(const json& j) {
  reject_unknown(j, {"domain", "grid", "time", "p", "k", "eps", "data", "ensemble", "threads",
                     "boundary_density", "suite", "output"},
                 "config");
  ExperimentConfig c;
  if (j.contains("domain")) {
    const auto& d = j.at("domain");
    reject_unknown(d, {"type", "lo", "hi", "vertices"}, "domain");
    read(d, "type", c.domain.type, "domain");
    if (d.contains("lo")) c.domain.lo = read_vec(d.at("lo"), "domain.lo");
    if (d.contains("hi")) c.domain.hi = read_vec(d.at("hi"), "domain.hi");
    if (d.contains("vertices")) {
      if (!d.at("vertices").is_array()) throw ConfigurationError("domain.vertices: expected an array");
      for (const auto& v : d.at("vertices")) c.domain.vertices.push_back(read_vec(v, "domain.vertices"));
    }
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    reject_unknown(g, {"points", "half_width", "center"}, "grid");
    read(g, "points", c.points, "grid");
    read(g, "half_width", c.half_width, "grid");
    if (g.contains("center")) {
      c.center = read_vec(g.at("center"), "grid.center");
      c.center_set = true;
    }
  }
  if (j.contains("time")) {
    const auto& t = j.at("time");
    reject_unknown(t, {"steps", "horizon"}, "time");
    read(t, "steps", c.steps, "time");
    read(t, "horizon", c.horizon, "time");
  }
  read(j, "p", c.p, "config");
  read(j, "k", c.k, "config");
  read(j, "eps", c.eps, "config");
  if (j.contains("data")) {
    const auto& d = j.at("data");
    reject_unknown(d, {"u0", "f", "g", "b"}, "data");
    if (d.contains("u0")) c.u0 = parse_data(d.at("u0"), "data.u0");
    if (d.contains("f")) c.f = parse_data(d.at("f"), "data.f");
    if (d.contains("g")) c.g = parse_data(d.at("g"), "data.g");
    if (d.contains("b")) c.b = parse_data(d.at("b"), "data.b");
  }
  if (j.contains("ensemble")) {
    const auto& e = j.at("ensemble");
    reject_unknown(e, {"base_seed", "count", "coupling_steps"}, "ensemble");
    read(e, "base_seed", c.base_seed, "ensemble");
    read(e, "count", c.samples, "ensemble");
    read(e, "coupling_steps", c.coupling_steps, "ensemble");
  }
  read(j, "threads", c.threads, "config");
  read(j, "boundary_density", c.boundary_density, "config");
  read(j, "suite", c.suite, "config");
  if (j.contains("output")) {
    reject_unknown(j.at("output"), {"dir"}, "output");
    read(j.at("output"), "dir", c.output_dir, "output");
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigurationError(path.string() + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json domain = {{"type", c.domain.type}};
  if (c.domain.type == "rectangle") {
    domain["lo"] = vec_json(c.domain.lo);
    domain["hi"] = vec_json(c.domain.hi);
  }
  if (c.domain.type == "polygon") {
    domain["vertices"] = json::array();
    for (const auto& v : c.domain.vertices) domain["vertices"].push_back(vec_json(v));
  }
  json grid = {{"points", c.points}, {"half_width", c.half_width}};
  if (c.center_set) grid["center"] = vec_json(c.center);
  return {{"domain", domain},
          {"grid", grid},
          {"time", {{"steps", c.steps}, {"horizon", c.horizon}}},
          {"p", c.p},
          {"k", c.k},
          {"eps", c.eps},
          {"data", {{"u0", data_json(c.u0)}, {"f", data_json(c.f)}, {"g", data_json(c.g)}, {"b", data_json(c.b)}}},
          {"ensemble", {{"base_seed", c.base_seed}, {"count", c.samples}, {"coupling_steps", c.coupling_steps}}},
          {"threads", c.threads},
          {"boundary_density", c.boundary_density},
          {"suite", c.suite},
          {"output", {{"dir", c.output_dir}}}};
}

std::string config_hash(const ExperimentConfig& config) {
  // the thread count and output location do not change results
  json j = to_json(config);
  j.erase("threads");
  j.erase("output");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

Field make_initial_datum(const DataSpec& spec, const PolygonDomain& domain, const SpaceGrid& grid) {
  Field out(grid);
  if (spec.is_zero()) return out;
  Grid2d rough;
  if (spec.preset == "rough_lp_block") rough = lp_block_values(spec, grid);
  const auto& box = domain.bounding_box();
  const Vec2 extent = box.hi - box.lo;
  for (int j = 0; j < grid.points; ++j)
    for (int i = 0; i < grid.points; ++i) {
      const Vec2 x = grid.node(i, j);
      if (!contains(domain, x) && !on_boundary(domain, x)) continue;
      double v = 0.0;
      if (spec.preset == "eigenfunction") {
        v = std::sin(std::numbers::pi * (x.x() - box.lo.x()) / extent.x()) *
            std::sin(std::numbers::pi * (x.y() - box.lo.y()) / extent.y());
      } else if (spec.preset == "gaussian_bump") {
        v = std::exp(-(x - spec.center).squaredNorm() / (2 * spec.width * spec.width));
      } else if (spec.preset == "rough_lp_block") {
        v = rough(i, j);
      } else {
        throw ConfigurationError("data.u0: unknown preset '" + spec.preset + "'");
      }
      out.values(i, j) = spec.amplitude * v;
    }
  return out;
}

SpaceTimeField make_forcing(const DataSpec& spec, const PolygonDomain& domain,
                            const SpaceGrid& grid, const TimeGrid& time) {
  SpaceTimeField out(grid, time);
  if (spec.is_zero()) return out;
  require_interior_support(spec, domain);
  Grid2d base = Grid2d::Zero(grid.points, grid.points);
  Grid2d rough;
  if (spec.preset == "lp_block") rough = lp_block_values(spec, grid);
  for (int j = 0; j < grid.points; ++j)
    for (int i = 0; i < grid.points; ++i) {
      const Vec2 x = grid.node(i, j);
      const double r = (x - spec.center).norm();
      const double cut = cutoff(r / spec.support);
      if (cut == 0.0) continue;
      double v = 0.0;
      if (spec.preset == "gaussian_bump")
        v = std::exp(-r * r / (2 * spec.width * spec.width));
      else if (spec.preset == "lp_block")
        v = rough(i, j);
      else
        throw ConfigurationError("unknown forcing preset '" + spec.preset + "'");
      base(i, j) = spec.amplitude * cut * v;
    }
  for (int m = 0; m < time.nodes(); ++m)
    out.slices[m] = (1.0 + spec.modulation * std::sin(2 * std::numbers::pi * time.time(m))) * base;
  return out;
}

BoundaryTrace make_boundary_data(const DataSpec& spec, const BoundaryQuadrature& quad,
                                 const TimeGrid& time) {
  if (spec.is_zero()) {
    BoundaryTrace zero{quad, time, Eigen::MatrixXd::Zero(time.nodes(), quad.size())};
    return zero;
  }
  if (spec.preset != "smooth_time_modulated")
    throw ConfigurationError("data.b: unknown preset '" + spec.preset + "'");
  const double a = spec.amplitude, w = spec.frequency;
  return sample_boundary_trace(quad, time, [a, w](double t, const Vec2& x) {
    return a * std::sin(w * t) * std::cos(std::numbers::pi * x.x()) *
           std::cos(std::numbers::pi * x.y());
  });
}

}  // namespace sheat
