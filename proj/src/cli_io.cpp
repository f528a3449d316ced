#include "fracobs/cli_io.hpp"

#include <Eigen/Core>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include "fracobs/extension.hpp"
#include "fracobs/frac_operator.hpp"
#include "fracobs/oracles.hpp"

namespace fracobs {

using nlohmann::json;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parameter:
    case ErrorKind::shape:
    case ErrorKind::data:
    case ErrorKind::configuration:
    case ErrorKind::resolution:
      return exit_config;
    case ErrorKind::numerical:
    case ErrorKind::degenerate:
    case ErrorKind::index:
      return exit_numerical;
  }
  return exit_numerical;
}

namespace {

[[noreturn]] void config_error(const std::string& what) {
  fail(ErrorKind::configuration, "config: " + what);
}

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& item : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return item.key() == k; })) {
      config_error("unknown key '" + item.key() + "' in " + where);
    }
  }
}

double number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) config_error(std::string("'") + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) config_error(std::string("'") + key + "' must be finite");
  return d;
}

std::size_t count(const json& obj, const char* key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    config_error(std::string("'") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string text(const json& obj, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) config_error(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

PayoffSpec parse_payoff(const json& obj, const std::string& where) {
  only_keys(obj, where, {"kind", "strike", "sigma", "center", "width", "height"});
  const std::string kind = text(obj, "kind", "");
  PayoffSpec p;
  try {
    p.kind = payoff_kind_from_string(kind);
  } catch (const Error&) {
    config_error("unknown payoff kind '" + kind + "' in " + where);
  }
  p.strike = number(obj, "strike", p.strike);
  p.sigma = number(obj, "sigma", p.sigma);
  p.center = number(obj, "center", p.center);
  p.width = number(obj, "width", p.width);
  p.height = number(obj, "height", p.height);
  return p;
}

json payoff_json(const PayoffSpec& p) {
  json j{{"kind", to_string(p.kind)}};
  switch (p.kind) {
    case PayoffKind::smoothed_put:
      j["strike"] = p.strike;
      j["sigma"] = p.sigma;
      break;
    case PayoffKind::gaussian_bump:
    case PayoffKind::compact_bump:
      j["center"] = p.center;
      j["width"] = p.width;
      j["height"] = p.height;
      break;
    case PayoffKind::zero:
      break;
  }
  return j;
}

const std::set<std::string> known_checks{"monitors", "exponents"};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  require_finite(doc);
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::configuration, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
  require(static_cast<bool>(out), ErrorKind::configuration, "failed writing " + path.string());
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::configuration, "cannot write " + path.string());
  return out;
}

void prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorKind::configuration, "cannot create output directory " + dir.string());
}

json fit_json(const ExponentCheck& c) {
  return json{{"exponent", c.fit.exponent},
              {"residual", c.fit.residual},
              {"target", c.target},
              {"tolerance", c.tolerance},
              {"margin", c.margin()},
              {"passed", c.passed()},
              {"hard", c.hard},
              {"radii_used", c.fit.radii.size()},
              {"dropped", c.fit.dropped}};
}

CheckResult as_check(const ExponentCheck& c) {
  CheckResult r = bound_check("exponents", c.name, std::abs(c.fit.exponent - c.target),
                              c.tolerance, c.hard);
  char buf[96];
  std::snprintf(buf, sizeof buf, "fit %.4f target %.4f", c.fit.exponent, c.target);
  r.note = buf;
  return r;
}

const char* status(const CheckResult& r) {
  if (r.skipped) return "SKIP";
  if (!r.hard) return "INFO";
  return r.passed ? "PASS" : "FAIL";
}

void print_check(std::ostream& log, const CheckResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "measured=%.4e tol=%.3e", r.measured, r.tolerance);
  log << status(r) << "  " << r.suite << " / " << r.name << "  " << buf;
  if (!r.note.empty()) log << "  (" << r.note << ")";
  if (!r.hard && !r.skipped && !r.passed) log << "  report-only, outside tolerance";
  log << '\n';
}

bool hard_pass(const std::vector<CheckResult>& checks) {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& r) { return r.skipped || !r.hard || r.passed; });
}

json checks_json(const std::vector<CheckResult>& checks) {
  json arr = json::array();
  for (const CheckResult& r : checks) arr.push_back(to_json(r));
  return arr;
}

// Runs build_report and turns a degenerate outcome into a note.
struct RegularityOutcome {
  std::optional<RegularityReport> report;
  std::string note;
};

RegularityOutcome try_report(const ProblemSpec& problem, const Solution& sol, const SpectralOp& op,
                             const ReportOptions& options) {
  try {
    return {build_report(problem, sol, op, options), ""};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::degenerate && e.kind() != ErrorKind::data) throw;
    return {std::nullopt, e.what()};
  }
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
  only_keys(doc, "config", {"problem", "scheme", "outputs", "seed", "checks", "report"});
  RunConfig c;
  if (!doc.contains("problem")) config_error("missing 'problem'");
  const json& p = doc.at("problem");
  only_keys(p, "problem", {"s", "grid", "T", "psi", "u0"});
  c.s = number(p, "s", c.s);
  c.T = number(p, "T", c.T);
  if (p.contains("grid")) {
    const json& g = p.at("grid");
    only_keys(g, "problem.grid", {"x_min", "x_max", "nodes"});
    c.x_min = number(g, "x_min", c.x_min);
    c.x_max = number(g, "x_max", c.x_max);
    c.nodes = count(g, "nodes", c.nodes);
  }
  if (!p.contains("psi")) config_error("missing 'problem.psi'");
  const json& psi = p.at("psi");
  if (psi.is_object() && psi.contains("kind") && psi.at("kind") == "random") {
    only_keys(psi, "problem.psi", {"kind"});
    c.psi.random = true;
  } else {
    c.psi.payoff = parse_payoff(psi, "problem.psi");
  }
  if (p.contains("u0")) {
    const json& u0 = p.at("u0");
    if (!(u0.is_string() && u0 == "psi")) c.u0 = parse_payoff(u0, "problem.u0");
  }

  if (doc.contains("scheme")) {
    const json& s = doc.at("scheme");
    only_keys(s, "scheme", {"scheme", "dt", "epsilon", "contact_tol", "record_every", "generator"});
    try {
      c.scheme.scheme = scheme_from_string(text(s, "scheme", "projection"));
      c.scheme.generator = generator_from_string(text(s, "generator", "spectral"));
    } catch (const Error& e) {
      config_error(e.what());
    }
    c.scheme.dt = number(s, "dt", c.scheme.dt);
    c.scheme.epsilon = number(s, "epsilon", c.scheme.epsilon);
    if (s.contains("contact_tol") && !s.at("contact_tol").is_null()) {
      c.scheme.contact_tol = number(s, "contact_tol", -1.0);
    }
    c.scheme.record_every = count(s, "record_every", c.scheme.record_every);
  }
  if (doc.contains("outputs")) {
    const json& o = doc.at("outputs");
    only_keys(o, "outputs", {"slice_path", "report_path"});
    c.slice_path = text(o, "slice_path", c.slice_path);
    c.report_path = text(o, "report_path", c.report_path);
  }
  if (doc.contains("seed")) {
    const json& seed = doc.at("seed");
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<long long>() < 0)) {
      config_error("'seed' must be a non-negative integer");
    }
    c.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("checks")) {
    const json& list = doc.at("checks");
    if (!list.is_array()) config_error("'checks' must be an array of suite names");
    c.checks.clear();
    for (const json& item : list) {
      if (!item.is_string() || !known_checks.contains(item.get<std::string>())) {
        config_error("unknown check suite " + item.dump() + " (known: monitors, exponents)");
      }
      c.checks.push_back(item.get<std::string>());
    }
  }
  if (doc.contains("report")) {
    const json& r = doc.at("report");
    only_keys(r, "report", {"feature_point", "r_max"});
    if (r.contains("feature_point") && !r.at("feature_point").is_null()) {
      c.feature_point = number(r, "feature_point", 0.0);
    }
    c.r_max = number(r, "r_max", c.r_max);
  }
  if (c.nodes < 8) config_error("problem.grid.nodes must be at least 8");
  if (c.scheme.record_every < 1) config_error("scheme.record_every must be at least 1");
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    config_error(path.string() + ": " + e.what());
  }
  return parse_run_config(doc);
}

json to_json(const RunConfig& c) {
  json psi = c.psi.random ? json{{"kind", "random"}} : payoff_json(c.psi.payoff);
  json problem{{"s", c.s},
               {"grid", {{"x_min", c.x_min}, {"x_max", c.x_max}, {"nodes", c.nodes}}},
               {"T", c.T},
               {"psi", psi},
               {"u0", c.u0 ? payoff_json(*c.u0) : json("psi")}};
  json scheme{{"scheme", to_string(c.scheme.scheme)},
              {"generator", to_string(c.scheme.generator)},
              {"dt", c.scheme.dt},
              {"epsilon", c.scheme.epsilon},
              {"contact_tol", c.scheme.contact_tol >= 0.0 ? json(c.scheme.contact_tol) : json()},
              {"record_every", c.scheme.record_every}};
  json report{{"feature_point", c.feature_point ? json(*c.feature_point) : json()},
              {"r_max", c.r_max}};
  return json{{"problem", problem},
              {"scheme", scheme},
              {"outputs", {{"slice_path", c.slice_path}, {"report_path", c.report_path}}},
              {"seed", c.seed},
              {"checks", c.checks},
              {"report", report}};
}

ProblemSpec build_problem(const RunConfig& c) {
  const Grid1D grid(c.x_min, c.x_max, c.nodes);
  if (c.psi.random) {
    ProblemSpec p = random_problem(c.seed, c.s, grid, c.T);
    if (c.u0) p.u0 = sample_payoff(*c.u0, grid);
    p.validate();
    return p;
  }
  const Field psi = sample_payoff(c.psi.payoff, grid);
  ProblemSpec p{.s = c.s,
                .grid = grid,
                .psi = psi,
                .u0 = c.u0 ? sample_payoff(*c.u0, grid) : psi,
                .T = c.T};
  p.validate();
  return p;
}

void write_slices_csv(std::ostream& out, const ProblemSpec& problem, const Solution& solution,
                      const SpectralOp& op) {
  const Grid1D& grid = problem.grid;
  out << "t,x,u,psi,flap,contact\n";
  for (std::size_t k = 0; k < solution.slices.size(); ++k) {
    const Field& u = solution.slices[k];
    const Field au = op.apply(u);
    const ContactMask mask = contact_mask(u, problem.psi, solution.contact_tol);
    const std::string t = fmt17(solution.times[k]);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out << t << ',' << fmt17(grid.x(i)) << ',' << fmt17(u[i]) << ',' << fmt17(problem.psi[i])
          << ',' << fmt17(au[i]) << ',' << static_cast<int>(mask.in_contact[i]) << '\n';
    }
  }
}

SliceSet read_slices_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::data, "slice CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "t,x,u,psi,flap,contact", ErrorKind::data,
          "slice CSV header must be t,x,u,psi,flap,contact");
  std::vector<double> times, xs, psi;
  std::vector<std::vector<double>> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    double t, x, u, p, flap;
    int contact;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%d", &t, &x, &u, &p, &flap, &contact) != 6) {
      fail(ErrorKind::data, "slice CSV row " + std::to_string(row) + " is malformed");
    }
    if (times.empty() || t != times.back()) {
      require(times.empty() || t > times.back(), ErrorKind::data,
              "slice CSV times must increase");
      if (!times.empty()) {
        require(values.back().size() == xs.size(), ErrorKind::data,
                "slice CSV slices have different lengths");
      }
      times.push_back(t);
      values.emplace_back();
    }
    const std::size_t i = values.back().size();
    if (times.size() == 1) {
      xs.push_back(x);
      psi.push_back(p);
    } else {
      require(i < xs.size() && x == xs[i] && p == psi[i], ErrorKind::data,
              "slice CSV slices disagree on x or psi at row " + std::to_string(row));
    }
    values.back().push_back(u);
  }
  require(!times.empty() && xs.size() >= 8, ErrorKind::data, "slice CSV holds no usable slice");
  require(values.back().size() == xs.size(), ErrorKind::data,
          "slice CSV slices have different lengths");
  const double h = xs[1] - xs[0];
  for (std::size_t i = 1; i < xs.size(); ++i) {
    require(std::abs(xs[i] - xs[0] - static_cast<double>(i) * h) <= 1e-9 * std::abs(h) * xs.size(),
            ErrorKind::data, "slice CSV x column is not a uniform grid");
  }
  const Grid1D grid(xs.front(), xs.front() + h * static_cast<double>(xs.size()), xs.size());
  SliceSet set{grid, Field(grid, psi), times, {}};
  for (auto& v : values) set.slices.emplace_back(grid, std::move(v));
  return set;
}

json to_json(const CheckResult& r) {
  return json{{"suite", r.suite},   {"name", r.name},     {"measured", r.measured},
              {"tolerance", r.tolerance}, {"passed", r.passed}, {"hard", r.hard},
              {"skipped", r.skipped}, {"note", r.note}};
}

json to_json(const RegularityReport& r) {
  json time = fit_json(r.time);
  time["tracked_node"] = r.tracked_node;
  time["crossing_time"] = r.crossing_time;
  const MonotonicityDiagnostic& m = r.monotonicity;
  return json{{"s", r.s},
              {"T", r.T},
              {"h", r.h},
              {"free_boundary", {{"node", r.free_boundary_node}, {"x", r.free_boundary_x}}},
              {"radii_range", {r.r_min, r.r_max}},
              {"alpha_space_detach", fit_json(r.detach)},
              {"alpha_space_flap", fit_json(r.flap)},
              {"alpha_time", time},
              {"fit_residuals", r.fit_residuals()},
              {"pass_margins", r.pass_margins()},
              {"monotonicity",
               {{"radii", m.radii},
                {"phi", m.phi},
                {"exponent", m.exponent},
                {"constant", m.constant},
                {"worst_ratio", m.worst_ratio},
                {"flagged", m.flagged}}}};
}

void require_finite(const json& doc) {
  if (doc.is_number_float()) {
    require(std::isfinite(doc.get<double>()), ErrorKind::numerical,
            "report contains a non-finite number");
  } else if (doc.is_object()) {
    for (const auto& item : doc.items()) {
      if (item.value().is_number_float() && !std::isfinite(item.value().get<double>())) {
        fail(ErrorKind::numerical, "report entry '" + item.key() + "' is not finite");
      }
      require_finite(item.value());
    }
  } else if (doc.is_array()) {
    for (const auto& v : doc) require_finite(v);
  }
}

json provenance() {
  return json{{"program", "fracobs"},
              {"compiler", __VERSION__},
              {"version", "0.1.0"},
              {"fftw", std::string(fftw_version)},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                            std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
              {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                           std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                           std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

int cmd_solve(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log) {
  const ProblemSpec problem = build_problem(config);
  const SpectralOp op = build_generator(problem.grid, problem.s, config.scheme.generator);
  const Solution sol = solve(problem, config.scheme, op);

  prepare_dir(out_dir);
  {
    std::ofstream csv = open_output(out_dir / config.slice_path);
    write_slices_csv(csv, problem, sol, op);
  }

  const auto enabled = [&](const char* name) {
    return std::find(config.checks.begin(), config.checks.end(), name) != config.checks.end();
  };
  std::vector<CheckResult> checks;
  if (enabled("monitors")) checks = solution_checks(problem, sol, op);

  ReportOptions options;
  options.feature_point = config.feature_point.value_or(
      config.psi.random ? 0.5 * (config.x_min + config.x_max) : config.psi.payoff.feature_point());
  options.r_max = config.r_max;
  RegularityOutcome reg;
  if (enabled("exponents")) {
    reg = try_report(problem, sol, op, options);
    if (reg.report) {
      for (const ExponentCheck* c : {&reg.report->detach, &reg.report->flap, &reg.report->time}) {
        checks.push_back(as_check(*c));
      }
    }
  }

  const ContactMask final_mask = contact_mask(sol.slices.back(), problem.psi, sol.contact_tol);
  json monitor_summary = json::object();
  for (const CheckResult& r : checks) {
    if (r.suite == "monitors" && !r.skipped) monitor_summary[r.name] = r.measured;
  }
  const bool pass = hard_pass(checks);
  json doc{{"document", "fracobs-report"},
           {"schema_version", 1},
           {"command", "solve"},
           {"config", to_json(config)},
           {"summary",
            {{"steps", sol.monitors.size()},
             {"dt", sol.dt},
             {"contact_tol", sol.contact_tol},
             {"slices", sol.slices.size()},
             {"final_contact_nodes", final_mask.count()},
             {"free_boundary_nodes", free_boundary(final_mask)}}},
           {"monitor_summary", monitor_summary},
           {"checks", checks_json(checks)},
           {"regularity", reg.report ? to_json(*reg.report) : json()},
           {"regularity_note", reg.note},
           {"oracles", json::array()},
           {"hard_checks_pass", pass},
           {"provenance", provenance()}};
  write_json(out_dir / config.report_path, doc);

  for (const CheckResult& r : checks) print_check(log, r);
  if (!reg.note.empty()) log << "NOTE  regularity: " << reg.note << '\n';
  log << (pass ? "solve: all hard checks pass" : "solve: hard check failure") << '\n';
  return pass ? exit_ok : exit_numerical;
}

int cmd_selftest(const SelftestOptions& options, std::ostream& log) {
  const auto& suites = check_suites();
  for (const std::string& name : options.skip) {
    const bool known = std::any_of(suites.begin(), suites.end(),
                                   [&](const Suite& s) { return s.name == name; });
    if (!known) {
      log << "selftest: unknown suite '" << name << "'\n";
      return exit_config;
    }
  }
  CheckOptions opts;
  opts.seed = options.seed;
  opts.quadrature_scale = options.quadrature_scale;
  std::vector<CheckResult> all;
  json skipped = json::array();
  for (const Suite& suite : suites) {
    if (std::find(options.skip.begin(), options.skip.end(), suite.name) != options.skip.end()) {
      log << "SKIP  " << suite.name << " (skipped by flag)\n";
      skipped.push_back(suite.name);
      continue;
    }
    for (CheckResult& r : suite.run(opts)) {
      print_check(log, r);
      all.push_back(std::move(r));
    }
  }
  std::vector<std::string> failures;
  for (const CheckResult& r : all) {
    if (r.hard && !r.skipped && !r.passed) failures.push_back(r.suite + " / " + r.name);
  }
  if (options.out_dir) {
    prepare_dir(*options.out_dir);
    write_json(*options.out_dir / "selftest.json",
               json{{"document", "fracobs-selftest"},
                    {"schema_version", 1},
                    {"checks", checks_json(all)},
                    {"skipped_suites", skipped},
                    {"hard_checks_pass", failures.empty()},
                    {"provenance", provenance()}});
  }
  if (failures.empty()) {
    log << "selftest: " << all.size() << " checks, all hard checks pass\n";
    return exit_ok;
  }
  log << "selftest: " << failures.size() << " hard check(s) failed:\n";
  for (const std::string& f : failures) log << "  " << f << '\n';
  return exit_numerical;
}

int cmd_exponents(const std::filesystem::path& slice_path, const ExponentsOptions& options,
                  const std::filesystem::path& out_dir, std::ostream& log) {
  std::ifstream in(slice_path);
  require(static_cast<bool>(in), ErrorKind::configuration, "cannot open " + slice_path.string());
  SliceSet set = read_slices_csv(in);
  require_fractional_order(options.s);
  const Grid1D& grid = set.grid;
  ProblemSpec problem{.s = options.s,
                      .grid = grid,
                      .psi = set.psi,
                      .u0 = set.slices.front(),
                      .T = set.times.back()};
  SchemeConfig sc;
  sc.contact_tol = options.contact_tol;
  const double tol = sc.resolved_contact_tol(grid, options.s);
  std::vector<std::size_t> steps(set.slices.size());
  for (std::size_t k = 0; k < steps.size(); ++k) steps[k] = k;
  const double dt = set.times.size() > 1 ? set.times[1] - set.times[0] : 0.0;
  Solution sol{.s = options.s,
               .dt = dt,
               .contact_tol = tol,
               .scheme = options.scheme,
               .psi = set.psi,
               .slices = std::move(set.slices),
               .times = set.times,
               .slice_steps = steps,
               .monitors = {}};
  const SpectralOp op = build_generator(grid, options.s, options.generator);
  ReportOptions ro;
  ro.feature_point = options.feature_point.value_or(0.5 * (grid.x_min() + grid.x_max()));
  ro.r_max = options.r_max;
  const RegularityReport report = build_report(problem, sol, op, ro);
  std::vector<CheckResult> checks;
  for (const ExponentCheck* c : {&report.detach, &report.flap, &report.time}) {
    checks.push_back(as_check(*c));
  }
  const bool pass = hard_pass(checks);
  prepare_dir(out_dir);
  json config{{"slice_path", slice_path.filename().string()},
              {"s", options.s},
              {"generator", to_string(options.generator)},
              {"scheme", to_string(options.scheme)},
              {"contact_tol", tol},
              {"feature_point", ro.feature_point},
              {"r_max", options.r_max}};
  write_json(out_dir / "exponents.json",
             json{{"document", "fracobs-report"},
                  {"schema_version", 1},
                  {"command", "exponents"},
                  {"config", config},
                  {"summary",
                   {{"slices", sol.slices.size()},
                    {"nodes", grid.size()},
                    {"contact_tol", tol}}},
                  {"monitor_summary", json::object()},
                  {"checks", checks_json(checks)},
                  {"regularity", to_json(report)},
                  {"regularity_note", ""},
                  {"oracles", json::array()},
                  {"hard_checks_pass", pass},
                  {"provenance", provenance()}});
  for (const CheckResult& r : checks) print_check(log, r);
  return pass ? exit_ok : exit_numerical;
}

int cmd_oracle_wave(const WaveOracleOptions& options, const std::filesystem::path& out_dir,
                    std::ostream& log) {
  const Grid1D grid(options.x_min, options.x_max, options.nodes);
  const Field trace = wave_trace(options.beta, grid);
  prepare_dir(out_dir);
  {
    std::ofstream csv = open_output(out_dir / "wave_trace.csv");
    csv << "x,value\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      csv << fmt17(grid.x(i)) << ',' << fmt17(trace[i]) << '\n';
    }
  }
  json doc{{"document", "fracobs-oracle"},
           {"kind", "wave"},
           {"beta", options.beta},
           {"exact_speed", wave_speed(options.beta)},
           {"provenance", provenance()}};
  log << "wave beta=" << options.beta << " exact speed " << wave_speed(options.beta) << '\n';
  if (options.evolve) {
    WaveConfig cfg;
    cfg.beta = options.beta;
    const WaveRun run = evolve_wave(cfg);
    doc["fitted_speed"] = run.fitted_speed;
    doc["speed_relative_error"] = std::abs(run.fitted_speed / run.exact_speed - 1.0);
    doc["drift"] = run.drift;
    log << "evolved front speed " << run.fitted_speed << '\n';
  }
  write_json(out_dir / "oracle.json", doc);
  return exit_ok;
}

int cmd_oracle_kernel(const KernelOracleOptions& options, const std::filesystem::path& out_dir,
                      std::ostream& log) {
  const Grid1D grid(options.x_min, options.x_max, options.nodes);
  const HeatKernel k = heat_kernel(options.s, options.t, grid);
  double mass = 0.0;
  for (double v : k.values.values()) mass += v * grid.spacing();
  prepare_dir(out_dir);
  {
    std::ofstream csv = open_output(out_dir / "kernel.csv");
    csv << "x,value\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      csv << fmt17(grid.x(i)) << ',' << fmt17(k.values[i]) << '\n';
    }
  }
  json doc{{"document", "fracobs-oracle"},
           {"kind", "kernel"},
           {"s", options.s},
           {"t", options.t},
           {"mass", mass},
           {"provenance", provenance()}};
  log << "kernel s=" << options.s << " t=" << options.t << " mass " << mass << '\n';
  if (options.s == 0.5) {
    double err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.x(i);
      err = std::max(err, std::abs(k.values[i] - options.t / std::numbers::pi /
                                                     (options.t * options.t + x * x)));
    }
    doc["cauchy_linf"] = err;
    log << "max deviation from the Cauchy profile " << err << '\n';
  }
  write_json(out_dir / "oracle.json", doc);
  return exit_ok;
}

int cmd_extension(const ExtensionOptions& options, const std::filesystem::path& out_dir,
                  std::ostream& log) {
  const Grid1D grid(-2.0 * std::numbers::pi, 2.0 * std::numbers::pi, options.nodes);
  Field f = Field::zeros(grid);
  if (options.field == "sin") {
    f = Field::sample(grid, [](double x) { return std::sin(x); });
  } else if (options.field == "sin2") {
    f = Field::sample(grid, [](double x) { return std::sin(2.0 * x); });
  } else if (options.field == "gaussian") {
    f = Field::sample(grid, [](double x) { return std::exp(-x * x); });
  } else {
    fail(ErrorKind::configuration, "unknown extension field '" + options.field +
                                       "' (sin, sin2, gaussian)");
  }
  const StripGrid strip(grid, options.s, options.height, options.layers);
  const double c = extension_constant(options.s);
  const Field lhs = dtn_trace(solve_extension(f, strip)) * (-1.0 / c);
  const Field rhs = build_spectral(grid, options.s).apply(f);
  const double rel = linf_diff(lhs, rhs) / linf_norm(rhs);
  const double fitted = fit_extension_constant(f, strip);
  const double quotient = eigen_check(options.s, 64);
  prepare_dir(out_dir);
  {
    std::ofstream csv = open_output(out_dir / "extension.csv");
    csv << "x,f,dtn_scaled,spectral\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      csv << fmt17(grid.x(i)) << ',' << fmt17(f[i]) << ',' << fmt17(lhs[i]) << ','
          << fmt17(rhs[i]) << '\n';
    }
  }
  write_json(out_dir / "extension.json",
             json{{"document", "fracobs-extension"},
                  {"s", options.s},
                  {"field", options.field},
                  {"relative_linf", rel},
                  {"fitted_constant", fitted},
                  {"exact_constant", c},
                  {"eigen_quotient", quotient},
                  {"eigen_expected", (1.0 - options.s) * options.s},
                  {"provenance", provenance()}});
  log << "extension s=" << options.s << " field " << options.field << ": relative L-inf "
      << rel << ", fitted c " << fitted << " (exact " << c << "), eigen quotient " << quotient
      << '\n';
  return exit_ok;
}

}  // namespace fracobs
