// Batch front end: each subcommand reads a JSON config, writes CSV tables and a
// JSON summary into the output directory, and exits 0 (ok), 1 (configuration
// error) or 2 (an asserted inequality was violated).

#include "gcl/errors.hpp"
#include "gcl/ndgauss.hpp"
#include "gcl/parallel.hpp"
#include "gcl/serialize.hpp"
#include "gcl/sphere_localize.hpp"
#include "gcl/strips_analytic.hpp"
#include "gcl/symmetrize.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

namespace fs = std::filesystem;
using namespace gcl;

namespace {

constexpr int kOk = 0, kConfig = 1, kViolation = 2;

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  std::optional<double> tol;
};

struct Run {
  Json config;
  fs::path out;
  unsigned jobs;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;

  // ---- typed access; every failure names the key

  const Json& need(const std::string& key) const {
    if (!config.contains(key)) throw ConfigError(key, "missing");
    return config.at(key);
  }
  int integer(const std::string& key) const {
    const Json& j = need(key);
    if (!j.is_number_integer()) throw ConfigError(key, "expected an integer");
    return j.get<int>();
  }
  int integer_or(const std::string& key, int fallback) const { return config.contains(key) ? integer(key) : fallback; }
  double number_or(const std::string& key, double fallback) const {
    if (!config.contains(key)) return fallback;
    if (!config[key].is_number()) throw ConfigError(key, "expected a number");
    return config[key].get<double>();
  }
  bool flag_or(const std::string& key, bool fallback) const {
    if (!config.contains(key)) return fallback;
    if (!config[key].is_boolean()) throw ConfigError(key, "expected true or false");
    return config[key].get<bool>();
  }
  std::vector<double> grid(const std::string& name) const {
    const std::string key = "grids." + name;
    if (!config.contains("grids") || !config["grids"].is_object() || !config["grids"].contains(name))
      throw ConfigError(key, "missing");
    const Json& g = config["grids"][name];
    std::vector<double> v;
    if (g.is_array()) {
      for (const auto& x : g) {
        if (!x.is_number()) throw ConfigError(key, "expected numbers");
        v.push_back(x.get<double>());
      }
    } else if (g.is_object()) {
      // {"from": a, "to": b, "count": n}: n equally spaced points including both ends.
      for (const char* f : {"from", "to", "count"})
        if (!g.contains(f) || !g[f].is_number()) throw ConfigError(key + "." + f, "missing or not a number");
      const int n = g["count"].get<int>();
      if (n < 1) throw ConfigError(key + ".count", "must be positive");
      const double a = g["from"].get<double>(), b = g["to"].get<double>();
      for (int i = 0; i < n; ++i) v.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    } else {
      throw ConfigError(key, "expected an array or {from, to, count}");
    }
    if (v.empty()) throw ConfigError(key, "grid must be nonempty");
    return v;
  }
  double tolerance(const std::string& key, double fallback) const {
    const double t = tol ? *tol : number_or(key, fallback);
    if (!(t > 0)) throw ConfigError(tol ? "tol" : key, "tolerance must be positive");
    return t;
  }
  std::uint64_t required_seed() const {
    if (seed) return *seed;
    const Json& j = need("seed");
    if (!j.is_number_unsigned()) throw ConfigError("seed", "expected a non-negative integer");
    return j.get<std::uint64_t>();
  }
  int measure_k() const {
    const int k = integer("k");
    if (k < 0) throw ConfigError("k", "must be non-negative");
    return k;
  }
  Measure2D measure() const {
    if (config.contains("density") && config["density"] != "gaussian")
      throw ConfigError("density", "only \"gaussian\" is supported");
    return {measure_k(), number_or("beta", kPi / 2), RadialDensity::gaussian()};
  }

  // ---- outputs

  void write(const std::string& name, const std::string& text) const {
    std::ofstream f(out / name, std::ios::binary);
    if (!f) throw ConfigError("out", "cannot write " + (out / name).string());
    f << text;
  }
  int finish(const std::string& command, Json summary, std::size_t rows, std::size_t violations) const {
    const int code = violations ? kViolation : kOk;
    summary["command"] = command;
    summary["rows"] = rows;
    summary["violations"] = violations;
    summary["exit"] = code;
    write(command + ".json", summary.dump(2) + "\n");
    std::cout << command << ": " << rows << " rows, " << violations << " violations -> " << out.string() << "\n";
    return code;
  }
};

// ------------------------------------------------------------------ strips

int strips_verify(const Run& run) {
  std::vector<int> ks;
  if (run.config.contains("ks")) {
    for (const auto& k : run.need("ks")) {
      if (!k.is_number_integer() || k.get<int>() < 0) throw ConfigError("ks", "expected non-negative integers");
      ks.push_back(k.get<int>());
    }
    if (ks.empty()) throw ConfigError("ks", "must be nonempty");
  } else {
    ks.push_back(run.measure_k());
  }
  const auto widths = run.grid("widths"), angles = run.grid("angles");
  const double tol = run.tolerance("tol", 1e-9);
  std::vector<StripPair> pairs;
  for (int k : ks)
    for (double a : widths)
      for (double b : widths)
        for (double rho : angles) pairs.push_back({a, b, rho, k, true});
  std::vector<RatioReport> res(pairs.size());
  parallel_for(pairs.size(), run.jobs, [&](std::size_t i) { res[i] = axis_strip_ratio(pairs[i]); });

  CsvTable csv({"k", "a", "b", "rho", "ratio", "abs_err", "violation"});
  std::size_t violations = 0;
  double worst = kInf;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const bool bad = res[i].ratio < 1 - tol;
    violations += bad;
    worst = std::min(worst, res[i].ratio);
    CsvTable::Row r;
    r << pairs[i].k << pairs[i].a << pairs[i].b << pairs[i].rho << res[i].ratio << res[i].abs_err << bad;
    csv.add(std::move(r));
  }
  run.write("strips_verify.csv", csv.str());
  return run.finish("strips_verify", {{"tol", tol}, {"worst_ratio", worst}}, pairs.size(), violations);
}

int strips_scan(const Run& run) {
  const int k = run.measure_k();
  const auto widths = run.grid("widths"), angles = run.grid("angles");
  const bool good = run.flag_or("good", false);
  const double threshold = run.tolerance("threshold", 1e-6);
  const ScanReport rep = counterexample_scan(k, widths, angles, good, threshold, run.jobs);
  CsvTable csv({"k", "a", "b", "rho", "ratio", "abs_err", "below_threshold", "violation"});
  std::size_t violations = 0;
  // Only the good configuration carries an asserted inequality.
  for (const auto& row : rep.rows) {
    const bool bad = good && row.violation;
    violations += bad;
    CsvTable::Row r;
    r << k << row.pair.a << row.pair.b << row.pair.rho << row.ratio << row.abs_err << row.violation << bad;
    csv.add(std::move(r));
  }
  Json summary = {{"good", good}, {"threshold", threshold}, {"below_threshold", rep.violations.size()}};
  if (!rep.violations.empty()) {
    const auto& w = *std::min_element(rep.rows.begin(), rep.rows.end(),
                                      [](const auto& a, const auto& b) { return a.ratio < b.ratio; });
    summary["worst"] = {{"a", w.pair.a}, {"b", w.pair.b}, {"rho", w.pair.rho}, {"ratio", w.ratio}};
  }
  run.write("strips_scan.csv", csv.str());
  if (run.flag_or("svg", false)) run.write("strips_scan.svg", ratio_heatmap_svg(k, widths.front(), widths, angles, good));
  return run.finish("strips_scan", summary, rep.rows.size(), violations);
}

// ------------------------------------------------------------------ symmetrisation

ChainOptions chain_options(const Run& run) {
  ChainOptions opt;
  opt.slack = run.tolerance("tol", 1e-7);
  opt.profile.nodes = run.integer_or("nodes", opt.profile.nodes);
  if (opt.profile.nodes < 16) throw ConfigError("nodes", "must be at least 16");
  return opt;
}

Cone2D cone(const Run& run) {
  return run.config.contains("cone") ? cone_from_json(run.config["cone"], "cone") : Cone2D::full();
}

int reduce(const Run& run) {
  const Measure2D m = run.measure();
  const Body2D k1 = body2d_from_json(run.need("k1"), "k1"), k2 = body2d_from_json(run.need("k2"), "k2");
  const ChainReport rep = reduce_to_strips(k1, k2, cone(run), m, chain_options(run));
  CsvTable stages({"stage", "numerator", "denominator", "ratio", "error"});
  for (const auto& s : rep.stages) {
    CsvTable::Row r;
    r << s.name << s.numerator << s.denominator << s.ratio << s.error;
    stages.add(std::move(r));
  }
  CsvTable checks({"check", "lhs", "rhs", "violation"});
  std::size_t violations = 0;
  for (const auto& c : rep.checks) {
    violations += !c.holds;
    CsvTable::Row r;
    r << c.name << c.lhs << c.rhs << !c.holds;
    checks.add(std::move(r));
  }
  // A degenerate chain cannot certify the inequality.
  if (rep.degenerate) ++violations;
  run.write("reduce_stages.csv", stages.str());
  run.write("reduce_checks.csv", checks.str());
  return run.finish("reduce", {{"report", to_json(rep)}, {"k1", to_json(k1)}, {"k2", to_json(k2)}},
                    rep.checks.size(), violations);
}

int beta_scan_command(const Run& run) {
  const int k = run.measure_k();
  const Body2D k1 = body2d_from_json(run.need("k1"), "k1"), k2 = body2d_from_json(run.need("k2"), "k2");
  const auto betas = run.grid("betas");
  const Cone2D c = cone(run);
  const BetaScanReport rep = beta_scan(k1, k2, [&](double) { return c; }, k, betas, 1e-6, chain_options(run));
  CsvTable csv({"beta", "original_ratio", "strips_ratio", "step", "good_strip", "monotone", "violation"});
  std::size_t violations = 0;
  for (const auto& row : rep.rows) {
    const bool bad = !row.chain.monotone;
    violations += bad;
    const double first = row.chain.stages.empty() ? kInf : row.chain.stages.front().ratio;
    const double last = row.chain.stages.empty() ? kInf : row.chain.stages.back().ratio;
    CsvTable::Row r;
    r << row.beta << first << last << row.chain.step << row.good_strip << row.chain.monotone << bad;
    csv.add(std::move(r));
  }
  run.write("beta_scan.csv", csv.str());
  Json summary = {{"max_arcs", rep.max_arcs}};
  summary["beta0"] = rep.beta0 ? Json(*rep.beta0) : Json(nullptr);
  return run.finish("beta_scan", summary, rep.rows.size(), violations);
}

// ------------------------------------------------------------------ pancakes

SphereFunction sphere_function(const Json& j, const std::string& key) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) throw ConfigError(key + ".type", "missing");
  const std::string t = j["type"].get<std::string>();
  auto vec3 = [&](const char* name) {
    if (!j.contains(name) || !j[name].is_array() || j[name].size() != 3)
      throw ConfigError(key + "." + name, "expected three numbers");
    return Vec3(j[name][0].get<double>(), j[name][1].get<double>(), j[name][2].get<double>());
  };
  auto scalar = [&](const char* name, double fallback) {
    if (!j.contains(name)) return fallback;
    if (!j[name].is_number()) throw ConfigError(key + "." + name, "expected a number");
    return j[name].get<double>();
  };
  if (t == "constant") {
    const double c = scalar("value", 1.0);
    return [c](const Vec3&) { return c; };
  }
  if (t == "affine") {
    const Vec3 v = vec3("vector");
    const double c = scalar("offset", 0.0);
    return [v, c](const Vec3& x) { return c + v.dot(x); };
  }
  if (t == "exp_linear") {
    const Vec3 v = vec3("vector");
    return [v](const Vec3& x) { return std::exp(v.dot(x)); };
  }
  throw ConfigError(key + ".type", "unknown function type '" + t + "'");
}

int pancakes(const Run& run) {
  const SphereFunction g1 = sphere_function(run.need("g1"), "g1"), g2 = sphere_function(run.need("g2"), "g2");
  const int depth = run.integer("depth");
  if (depth < 0) throw ConfigError("depth", "must be non-negative");
  PancakeOptions opt;
  opt.target_width = run.number_or("target_width", 0.0);
  opt.keep_thinner = run.flag_or("keep_thinner", true);
  opt.halving.depth = run.integer_or("quadrature_depth", opt.halving.depth);
  if (opt.halving.depth < 1 || opt.halving.depth > 9) throw ConfigError("quadrature_depth", "must lie in [1, 9]");
  opt.halving.coarse_depth = std::min(opt.halving.coarse_depth, opt.halving.depth);
  opt.halving.tol = run.tolerance("tol", opt.halving.tol);
  if (run.config.contains("orthogonal_to")) {
    const Json& o = run.config["orthogonal_to"];
    if (!o.is_array() || o.size() != 3) throw ConfigError("orthogonal_to", "expected three numbers");
    const Vec3 v(o[0].get<double>(), o[1].get<double>(), o[2].get<double>());
    if (!(v.norm() > 0)) throw ConfigError("orthogonal_to", "must be non-zero");
    opt.halving.orthogonal_to = v;
  }
  PancakeReport rep;
  try {
    rep = pancake_iterate(SphericalRegion(), g1, g2, depth, opt);
  } catch (const std::domain_error& e) {
    throw ConfigError("g1", e.what());
  }
  CsvTable csv({"step", "nx", "ny", "nz", "width", "area", "g1", "g2", "residual1", "residual2", "violation"});
  std::size_t violations = 0;
  for (std::size_t i = 0; i < rep.steps.size(); ++i) {
    const auto& s = rep.steps[i];
    violations += !s.positive;
    CsvTable::Row r;
    r << i + 1 << s.normal.x() << s.normal.y() << s.normal.z() << s.width << s.area << s.g1 << s.g2 << s.residual1
      << s.residual2 << !s.positive;
    csv.add(std::move(r));
  }
  run.write("pancakes.csv", csv.str());
  run.write("pancakes.svg", regions_svg(rep.regions, Vec3(0.3, 0.4, 0.87)));
  Json summary = {{"achieved_width", rep.achieved_width}, {"reached_target", rep.reached_target},
                  {"all_positive", rep.all_positive}};
  if (rep.needle)
    summary["needle"] = {{"exponent", rep.needle->exponent},
                         {"phase", rep.needle->phase},
                         {"rms", rep.needle->rms},
                         {"samples", rep.needle->samples}};
  return run.finish("pancakes", summary, rep.steps.size(), violations);
}

// ------------------------------------------------------------------ n-dimensional

int dimension(const Run& run) {
  const int n = run.integer("dimension");
  if (n < 2 || n > kMaxDimension) throw ConfigError("dimension", "must lie in [2, 64]");
  return n;
}

int nd_check(const Run& run) {
  const int n = dimension(run);
  const BodyND k1 = bodynd_from_json(run.need("k1"), n, "k1"), k2 = bodynd_from_json(run.need("k2"), n, "k2");
  const int samples = run.integer_or("samples", 1'000'000);
  if (samples < 1) throw ConfigError("samples", "must be positive");
  const std::uint64_t seed = run.required_seed();
  const double z_min = run.number_or("z_min", -3.0);
  const auto r = correlation_check_nd(k1, k2, static_cast<std::uint64_t>(samples), seed, {run.jobs, 1u << 16});
  const bool bad = r.z < z_min;
  CsvTable csv({"gamma_k1", "gamma_k2", "gamma_int", "margin", "se", "z", "violation"});
  CsvTable::Row row;
  row << r.gamma_first << r.gamma_second << r.gamma_both << r.margin << r.se << r.z << bad;
  csv.add(std::move(row));
  run.write("nd_check.csv", csv.str());
  return run.finish("nd_check", {{"seed", seed}, {"samples", samples}, {"z_min", z_min}}, 1, bad);
}

std::vector<Needle> needles(const Run& run, int n) {
  std::vector<Needle> out;
  if (run.config.contains("needles")) {
    const Json& list = run.config["needles"];
    if (!list.is_array()) throw ConfigError("needles", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string key = "needles[" + std::to_string(i) + "]";
      const Json& j = list[i];
      auto vec = [&](const char* name) {
        if (!j.contains(name) || !j[name].is_array() || j[name].size() != static_cast<std::size_t>(n))
          throw ConfigError(key + "." + name, "expected " + std::to_string(n) + " numbers");
        Eigen::VectorXd v(n);
        for (int c = 0; c < n; ++c) v(c) = j[name][static_cast<std::size_t>(c)].get<double>();
        return v;
      };
      auto num = [&](const char* name) {
        if (!j.contains(name) || !j[name].is_number()) throw ConfigError(key + "." + name, "missing");
        return j[name].get<double>();
      };
      const int k = j.contains("k") ? j["k"].get<int>() : n - 2;
      try {
        out.push_back(Needle::make(vec("e1"), vec("e2"), num("t_a"), num("t_b"), num("phase"), k));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(key, e.what());
      }
    }
  }
  const int random = run.integer_or("random_needles", 0);
  if (random < 0) throw ConfigError("random_needles", "must be non-negative");
  if (random > 0) {
    std::mt19937_64 rng(run.required_seed());
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < random; ++i) {
      Eigen::VectorXd a(n), b(n);
      for (int c = 0; c < n; ++c) {
        a(c) = z(rng);
        b(c) = z(rng);
      }
      a.normalize();
      b = (b - b.dot(a) * a).normalized();
      const double phase = kPi * u(rng);
      out.push_back(Needle::half_circle(a, b, phase, n - 2));
    }
  }
  if (out.empty()) throw ConfigError("needles", "no needles given (use needles or random_needles)");
  return out;
}

int nd_needle(const Run& run) {
  const int n = dimension(run);
  const BodyND k1 = bodynd_from_json(run.need("k1"), n, "k1"), k2 = bodynd_from_json(run.need("k2"), n, "k2");
  const auto list = needles(run, n);
  std::vector<NeedleCheckND> res(list.size());
  std::vector<double> planar(list.size());
  parallel_for(list.size(), run.jobs, [&](std::size_t i) {
    res[i] = needle_check_nd(k1, k2, list[i]);
    planar[i] = needle_F(list[i], k1.plane_section(list[i].e1(), list[i].e2()),
                         k2.plane_section(list[i].e1(), list[i].e2()));
  });
  // Per-needle F below one is expected for generic bodies, so no row is a violation.
  CsvTable csv({"index", "t_a", "t_b", "phase", "k", "first", "second", "intersection", "whole", "F", "planar_F",
                "margin", "below_one"});
  std::size_t below = 0;
  for (std::size_t i = 0; i < list.size(); ++i) {
    below += res[i].F < 1;
    CsvTable::Row r;
    r << i << list[i].t_a() << list[i].t_b() << list[i].phase() << list[i].k() << res[i].first << res[i].second
      << res[i].intersection << res[i].whole << res[i].F << planar[i] << res[i].margin << (res[i].F < 1);
    csv.add(std::move(r));
  }
  run.write("nd_needle.csv", csv.str());
  return run.finish("nd_needle", {{"below_one", below}}, list.size(), 0);
}

// ------------------------------------------------------------------ driver

Run load(const Flags& f) {
  Run run;
  if (f.config.empty()) throw ConfigError("config", "--config is required");
  std::ifstream in(f.config);
  if (!in) throw ConfigError("config", "cannot read " + f.config);
  try {
    run.config = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config", std::string("malformed JSON: ") + e.what());
  }
  if (!run.config.is_object()) throw ConfigError("config", "top level must be an object");
  std::string out = f.out;
  if (out.empty() && run.config.contains("out") && run.config["out"].is_string()) out = run.config["out"].get<std::string>();
  if (out.empty())
    if (const char* env = std::getenv("GCL_OUT_DIR")) out = env;
  if (out.empty()) out = "gcl_out";
  run.out = out;
  std::error_code ec;
  fs::create_directories(run.out, ec);
  if (ec) throw ConfigError("out", "cannot create " + out + ": " + ec.message());
  run.jobs = std::max(1u, f.jobs);
  run.seed = f.seed;
  run.tol = f.tol;
  if (run.tol && !(*run.tol > 0)) throw ConfigError("tol", "tolerance must be positive");
  return run;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for correlation inequalities of symmetric convex bodies"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;
  app.add_option("--config", flags.config, "JSON configuration file");
  app.add_option("--out", flags.out, "Output directory (default: $GCL_OUT_DIR or ./gcl_out)");
  app.add_option("--seed", flags.seed, "Seed for stochastic commands");
  app.add_option("--jobs", flags.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--tol", flags.tol, "Tolerance override");

  using Command = int (*)(const Run&);
  Command chosen = nullptr;
  auto bind = [&](CLI::App* sub, Command c) { sub->callback([&chosen, c] { chosen = c; }); };

  auto* strips = app.add_subcommand("strips", "Strip inequalities")->require_subcommand(1)->fallthrough();
  bind(strips->add_subcommand("verify", "Good-configuration ratio grid"), strips_verify);
  bind(strips->add_subcommand("scan", "Counterexample scan"), strips_scan);
  bind(app.add_subcommand("reduce", "Symmetrisation chain for two bodies"), reduce);
  bind(app.add_subcommand("beta-scan", "Chain over pole angles"), beta_scan_command);
  bind(app.add_subcommand("pancakes", "Hemisphere halving on the 2-sphere"), pancakes);
  auto* nd = app.add_subcommand("nd", "n-dimensional checks")->require_subcommand(1)->fallthrough();
  bind(nd->add_subcommand("check", "Monte Carlo correlation check"), nd_check);
  bind(nd->add_subcommand("needle", "Needle integrals"), nd_needle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }
  try {
    return chosen(load(flags));
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const Json::exception& e) {
    std::cerr << "configuration error [config]: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
}
