// relosc command-line front end. Reads a JSON config, writes JSON/CSV.
// Exit codes: 0 success, 2 inconclusive/unknown result, 1 error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "relosc/classify.hpp"
#include "relosc/errors.hpp"
#include "relosc/io.hpp"
#include "relosc/kneser.hpp"
#include "relosc/parallel.hpp"
#include "relosc/pruefer.hpp"
#include "relosc/relative.hpp"
#include "relosc/selftest.hpp"
#include "relosc/spectra.hpp"
#include "relosc/tail.hpp"

namespace fs = std::filesystem;
using namespace relosc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInconclusive = 2;

struct RunConfig {
  std::string command;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::optional<double> margin;
  std::optional<double> rtol;
  std::optional<double> atol;
  std::string fault = "none";
};

// Everything a command needs: the parsed config plus effective settings.
struct Context {
  RunConfig run;
  Json config = Json::object();
  Tolerances tol;
  double margin = kDefaultKneserMargin;
  WindowPolicy policy;

  const Json* get(const char* key) const {
    auto it = config.find(key);
    return it == config.end() ? nullptr : &*it;
  }

  double number(const char* key, double fallback) const {
    const Json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError(std::string("/") + key + ": expected a number");
    return v->get<double>();
  }

  int integer(const char* key, int fallback) const {
    const Json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw ConfigError(std::string("/") + key + ": expected an integer");
    return v->get<int>();
  }

  std::string string(const char* key, const std::string& fallback) const {
    const Json* v = get(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError(std::string("/") + key + ": expected a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const char* key) const {
    const Json* v = get(key);
    if (!v || !v->is_array()) throw ConfigError(std::string("/") + key + ": expected an array");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) throw ConfigError(std::string("/") + key + ": expected numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  CoefficientSet coefficients(const char* key) const {
    const Json* v = get(key);
    if (!v) throw ConfigError(std::string("/") + key + ": missing coefficient spec");
    return coefficients_from_json(*v, std::string("/") + key);
  }
};

void require_positive(const std::optional<double>& v, const char* name) {
  if (v && !(*v > 0.0)) throw ConfigError(std::string("--") + name + " must be positive");
}

WindowPolicy policy_from(const Json* j) {
  WindowPolicy p;
  if (!j) return p;
  if (!j->is_object()) throw ConfigError("/policy: expected an object");
  for (auto it = j->begin(); it != j->end(); ++it) {
    const std::string& k = it.key();
    const std::string path = "/policy/" + k;
    if (k == "x0" || k == "ratio") {
      if (!it->is_number()) throw ConfigError(path + ": expected a number");
      (k == "x0" ? p.x0 : p.ratio) = it->get<double>();
    } else if (k == "K" || k == "K_stable" || k == "K_grow") {
      if (!it->is_number_integer()) throw ConfigError(path + ": expected an integer");
      (k == "K" ? p.K : k == "K_stable" ? p.K_stable : p.K_grow) = it->get<int>();
    } else {
      throw ConfigError(path + ": unknown key");
    }
  }
  return p;
}

Context load(const RunConfig& run) {
  Context ctx;
  ctx.run = run;
  require_positive(run.rtol, "rtol");
  require_positive(run.atol, "atol");
  require_positive(run.margin, "margin");
  if (run.jobs < 1) throw ConfigError("--jobs must be at least 1");
  if (!run.config_path.empty()) {
    ctx.config = read_json_file(run.config_path);
    if (!ctx.config.is_object()) throw ConfigError(run.config_path + ": top level must be an object");
  }
  if (const Json* t = ctx.get("tolerances")) {
    if (!t->is_object()) throw ConfigError("/tolerances: expected an object");
    if (t->contains("rtol")) ctx.tol.rtol = (*t)["rtol"].get<double>();
    if (t->contains("atol")) ctx.tol.atol = (*t)["atol"].get<double>();
  }
  if (run.rtol) ctx.tol.rtol = *run.rtol;
  if (run.atol) ctx.tol.atol = *run.atol;
  if (!(ctx.tol.rtol > 0.0) || !(ctx.tol.atol > 0.0)) {
    throw ConfigError("/tolerances: rtol and atol must be positive");
  }
  ctx.margin = run.margin ? *run.margin : ctx.number("margin", kDefaultKneserMargin);
  if (!(ctx.margin > 0.0)) throw ConfigError("/margin: must be positive");
  ctx.policy = policy_from(ctx.get("policy"));
  return ctx;
}

// Settings echoed into every report.
Json relosc_envelope(const Context& ctx) {
  Json j;
  j["tool"] = "relosc";
  j["version"] = std::string(kVersion);
  j["command"] = ctx.run.command;
  j["config_hash"] = hex64(fnv1a(ctx.config.dump()));
  j["seed"] = ctx.run.seed;
  j["jobs"] = ctx.run.jobs;
  j["tolerances"] = to_json(ctx.tol);
  j["margin"] = ctx.margin;
  j["policy"] = to_json(ctx.policy);
  return j;
}

std::string csv_header(const Json& env) {
  std::ostringstream ss;
  for (auto it = env.begin(); it != env.end(); ++it) ss << it.key() << ": " << it->dump() << '\n';
  return ss.str();
}

class Output {
 public:
  explicit Output(const Context& ctx) : dir_(ctx.run.out_dir), env_(relosc_envelope(ctx)) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }

  std::string header() const { return csv_header(env_); }

  // The JSON report goes to stdout and, with --out, to <dir>/<name>.json.
  void report(const std::string& name, const Json& body) {
    Json j = env_;
    for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = *it;
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (!dir_.empty()) write(name + ".json", text);
  }

  template <typename Writer>
  void csv(const std::string& name, Writer&& w) {
    if (dir_.empty()) return;
    std::ostringstream ss;
    w(ss);
    write(name + ".csv", ss.str());
  }

 private:
  void write(const std::string& file, const std::string& text) {
    std::ofstream out(fs::path(dir_) / file, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (fs::path(dir_) / file).string());
    out << text;
  }

  std::string dir_;
  Json env_;
};

std::vector<double> grid_from(const Context& ctx, const Interval& iv, std::size_t n_default) {
  const Json* g = ctx.get("grid");
  if (!g) return make_tail_grid(iv, n_default);
  if (!g->is_object()) throw ConfigError("/grid: expected an object");
  const double from = g->value("from", iv.a + 1.0);
  const double to = g->value("to", 1e12);
  const int points = g->value("points", static_cast<int>(n_default));
  if (points < 2) throw ConfigError("/grid/points: need at least 2");
  return make_tail_grid(iv, static_cast<std::size_t>(points), from, to);
}

int cmd_trace(const Context& ctx) {
  const CoefficientSet c = ctx.coefficients("coefficients");
  const double lambda = ctx.number("lambda", 0.0);
  const double theta_a = ctx.number("theta_a", 0.0);
  const double x_end = ctx.number("x_end", 0.0);
  const SolutionTrace tr = integrate_pruefer(c, lambda, theta_a, x_end, ctx.tol);
  Output out(ctx);
  Json body;
  body["coefficients"] = to_json(c);
  body["trace"] = to_json(tr);
  out.report("trace", body);
  out.csv("trace", [&](std::ostream& os) { write_trace_csv(os, tr, out.header()); });
  return kExitOk;
}

int cmd_relosc(const Context& ctx) {
  const CoefficientSet c0 = ctx.coefficients("c0");
  const CoefficientSet c1 = ctx.get("c1") ? ctx.coefficients("c1") : c0;
  const double l0 = ctx.number("lambda0", 0.0);
  const double l1 = ctx.number("lambda1", 0.0);
  const double x_end = ctx.number("x_end", 0.0);
  const int samples = ctx.integer("samples", 200);
  if (samples < 2) throw ConfigError("/samples: need at least 2");
  const RelativeTrace rt(
      integrate_pruefer(c0, l0, ctx.number("theta0_a", 0.0), x_end, ctx.tol),
      integrate_pruefer(c1, l1, ctx.number("theta1_a", 0.0), x_end, ctx.tol));
  const double x = rt.x_end();
  const DenseZeroCount dense = wronskian_zero_count_dense(rt, x, ctx.integer("dense_grid", 2000));

  std::vector<double> grid(samples);
  const double h = (x - rt.x_begin()) / (samples - 1);
  for (int i = 0; i < samples; ++i) grid[i] = i + 1 == samples ? x : rt.x_begin() + i * h;

  Output out(ctx);
  Json body;
  body["c0"] = to_json(c0);
  body["c1"] = to_json(c1);
  body["lambda0"] = l0;
  body["lambda1"] = l1;
  body["x"] = x;
  body["relative_count"] = relative_count(rt, x);
  body["modified_wronskian"] = modified_wronskian(rt, x);
  body["degenerate"] = rt.degenerate();
  body["w_events"] = rt.w_events();
  body["dense_oracle"] = {{"count", dense.count},
                          {"zeros", dense.zeros},
                          {"grid_too_coarse", dense.grid_too_coarse}};
  out.report("relosc", body);
  out.csv("relosc", [&](std::ostream& os) { write_relative_csv(os, rt, grid, out.header()); });
  return kExitOk;
}

int cmd_classify(const Context& ctx) {
  const CoefficientSet c0 = ctx.coefficients("coefficients");
  ClassifyOptions opt;
  opt.tol = ctx.tol;
  opt.margin = ctx.margin;
  opt.theta0_a = ctx.number("theta_a", 0.0);
  OscVerdict v;
  Json body;
  body["coefficients"] = to_json(c0);
  if (ctx.get("c1") || ctx.get("lambda1")) {
    // Relative mode: tau0 - lambda relative to tau1 - lambda1.
    const CoefficientSet c1 = ctx.get("c1") ? ctx.coefficients("c1") : c0;
    opt.theta1_a = ctx.number("theta1_a", 0.0);
    const double l0 = ctx.number("lambda", 0.0);
    const double l1 = ctx.number("lambda1", l0);
    v = classify_relative(c0, l0, c1, l1, ctx.policy, opt);
    body["mode"] = "relative";
    body["c1"] = to_json(c1);
    body["lambda"] = l0;
    body["lambda1"] = l1;
  } else {
    const double l = ctx.number("lambda", 0.0);
    v = classify_oscillation(c0, l, ctx.policy, opt);
    body["mode"] = "classical";
    body["lambda"] = l;
  }
  Output out(ctx);
  body["result"] = to_json(v);
  out.report("classify", body);
  out.csv("windows", [&](std::ostream& os) { write_windows_csv(os, v, out.header()); });
  return v.kind == OscKind::Inconclusive ? kExitInconclusive : kExitOk;
}

int cmd_kneser(const Context& ctx) {
  const Json* src = ctx.get("source");
  if (!src || !src->is_object() || !src->contains("kind")) {
    throw ConfigError("/source: expected an object with a kind");
  }
  const std::string kind = (*src)["kind"].get<std::string>();
  KneserOptions opt;
  opt.margin = ctx.margin;
  const std::string mode = ctx.string("mode", "pointwise");
  if (mode == "averaged") {
    opt.mode = KneserMode::Averaged;
  } else if (mode != "pointwise") {
    throw ConfigError("/mode: expected pointwise or averaged");
  }
  if (ctx.get("ell_grid")) opt.ell_grid = ctx.numbers("ell_grid");
  opt.windows = ctx.integer("windows", opt.windows);

  Json body;
  body["source"] = *src;
  body["mode"] = to_string(opt.mode);
  KneserReport rep;
  if (kind == "samples") {
    const Json& xs = src->at("x");
    const Json& vs = src->at("value");
    if (!xs.is_array() || !vs.is_array() || xs.size() != vs.size()) {
      throw ConfigError("/source: x and value must be arrays of equal length");
    }
    std::vector<KneserSample> samples;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      samples.push_back({xs[i].get<double>(), vs[i].get<double>()});
    }
    rep = kneser_classify(samples, opt.margin, opt.windows);
  } else if (kind == "synthetic") {
    // value + amplitude sin(frequency x); no rho, so averaged mode stays inconclusive.
    const double value = src->value("value", -0.25);
    const double amp = src->value("amplitude", 0.0);
    const double freq = src->value("frequency", 1.0);
    const Interval iv{0.0, std::numeric_limits<double>::infinity()};
    const auto grid = grid_from(ctx, iv, 64);
    rep = kneser_classify([=](double x) { return value + amp * std::sin(freq * x); }, grid, opt);
  } else if (kind == "delta_tilde") {
    const CoefficientSet c1 = coefficients_from_json(src->at("coefficients"), "/source/coefficients");
    const int n = src->value("n", 0);
    const auto grid = grid_from(ctx, c1.interval(), 64);
    rep = kneser_classify([&](double x) { return delta_tilde(c1, n, x); }, grid, opt);
    body["coefficients"] = to_json(c1);
  } else if (kind == "delta") {
    const CoefficientSet c0 = coefficients_from_json(src->at("c0"), "/source/c0");
    const CoefficientSet c1 = coefficients_from_json(src->at("c1"), "/source/c1");
    if (!c0.tail() || !c1.tail()) throw MissingTail("delta source needs declared tails");
    const int n = src->value("n", 0);
    const double lambda = src->value("lambda", essential_bottom(c1));
    const PrincipalPair pair = log_scale_pair(n, c0.tail()->p_inf);
    const auto grid = grid_from(ctx, c1.interval(), 64);
    auto rho = [&](double x) { return 1.0 / (c0.p(x) * pair.u0(x) * pair.v0(x)); };
    rep = kneser_classify([&](double x) { return delta(c0, c1, lambda, pair, x); }, grid, opt, rho);
    rep.side_conditions = side_conditions_thm_gu(c0, c1, pair, grid);
    body["c0"] = to_json(c0);
    body["c1"] = to_json(c1);
    body["lambda"] = lambda;
    body["log_order"] = n;
  } else {
    throw ConfigError("/source/kind: expected samples, synthetic, delta_tilde or delta");
  }
  Output out(ctx);
  body["result"] = to_json(rep);
  out.report("kneser", body);
  out.csv("kneser", [&](std::ostream& os) { write_kneser_csv(os, rep, out.header()); });
  return rep.verdict == KneserVerdict::Inconclusive ? kExitInconclusive : kExitOk;
}

BoundaryCondition bc_from(const std::string& s, const char* key) {
  if (s == "dirichlet") return BoundaryCondition::Dirichlet;
  if (s == "neumann") return BoundaryCondition::Neumann;
  throw ConfigError(std::string("/") + key + ": expected dirichlet or neumann");
}

std::optional<GridMap> map_from(const std::string& s) {
  if (s == "auto") return std::nullopt;
  if (s == "uniform") return GridMap::Uniform;
  if (s == "logarithmic") return GridMap::Logarithmic;
  throw ConfigError("/map: expected auto, uniform or logarithmic");
}

int cmd_eigencount(const Context& ctx) {
  const CoefficientSet c = ctx.coefficients("coefficients");
  const int grid_n = ctx.integer("grid_n", 4000);
  const std::optional<GridMap> map = map_from(ctx.string("map", "auto"));
  Output out(ctx);
  Json body;
  body["coefficients"] = to_json(c);
  body["grid_n"] = grid_n;

  if (ctx.get("truncations")) {
    const auto bs = ctx.numbers("truncations");
    const auto ps = ctx.numbers("probes");
    AccumulationOptions opt{grid_n, map, ctx.run.jobs, ctx.tol};
    const AccumulationStudy st = accumulation_study(c, bs, ps, opt);
    body["mode"] = "accumulation";
    body["result"] = to_json(st);
    out.report("eigencount", body);
    out.csv("accumulation", [&](std::ostream& os) { write_accumulation_csv(os, st, out.header()); });
    return st.evidence == AccumulationEvidence::Inconclusive ? kExitInconclusive : kExitOk;
  }

  const TruncatedProblem tp{c, ctx.number("b_trunc", c.interval().b),
                            bc_from(ctx.string("bc_left", "dirichlet"), "bc_left"),
                            bc_from(ctx.string("bc_right", "dirichlet"), "bc_right")};
  const auto lambdas = ctx.numbers("lambdas");
  const double a = c.interval().a;
  const GridMap m = map ? *map
                        : (a > 0.0 && tp.b_trunc / a > 100.0 ? GridMap::Logarithmic : GridMap::Uniform);
  std::vector<std::pair<EigenCount, EigenCount>> counts(lambdas.size());
  parallel_for(lambdas.size(), ctx.run.jobs, [&](std::size_t i) {
    counts[i] = {count_below(tp, lambdas[i], ctx.tol), fd_inertia_count(tp, lambdas[i], grid_n, m)};
  });
  Json rows = Json::array();
  for (const auto& [s, f] : counts) rows.push_back({{"shooting", to_json(s)}, {"fd", to_json(f)}});
  body["mode"] = "counts";
  body["b_trunc"] = tp.b_trunc;
  body["bc_left"] = to_string(tp.left);
  body["bc_right"] = to_string(tp.right);
  body["map"] = to_string(m);
  body["result"] = rows;
  out.report("eigencount", body);
  out.csv("eigencount", [&](std::ostream& os) {
    write_csv_header(os, out.header());
    os << "lambda,count_shoot,count_fd\n";
    for (const auto& [s, f] : counts) {
      os << format_number(s.lambda) << ',' << s.count << ',' << f.count << '\n';
    }
  });
  return kExitOk;
}

int cmd_invariance(const Context& ctx) {
  const CoefficientSet c0 = ctx.coefficients("c0");
  const CoefficientSet c1 = ctx.coefficients("c1");
  const auto grid = grid_from(ctx, c0.interval(), 64);
  const InvarianceReport inv = essential_spectrum_invariance(c0, c1, grid);
  const LimitPointReport lp0 = limit_point_probe(c0, grid);
  const LimitPointReport lp1 = limit_point_probe(c1, grid);
  Output out(ctx);
  Json body;
  body["c0"] = to_json(c0);
  body["c1"] = to_json(c1);
  body["result"] = to_json(inv);
  body["limit_point"] = {{"c0", to_json(lp0)}, {"c1", to_json(lp1)}};
  out.report("invariance", body);
  return inv.verdict == Invariance::Unknown ? kExitInconclusive : kExitOk;
}

int cmd_selftest(const Context& ctx) {
  SelftestOptions opt;
  opt.seed = ctx.run.seed;
  if (ctx.run.fault == "snap0") {
    opt.fault = Fault::SnapZero;
  } else if (ctx.run.fault != "none") {
    throw ConfigError("--fault: expected none or snap0");
  }
  const SelftestReport rep = run_selftest(opt);
  Json suites = Json::array();
  for (const auto& s : rep.suites) {
    suites.push_back({{"suite", s.name},
                      {"passed", s.passed()},
                      {"checks", s.checks},
                      {"failures", s.failures},
                      {"messages", s.messages},
                      {"draws", s.draws}});
    // Timings vary run to run, so they stay out of the report.
    std::cerr << (s.passed() ? "PASS " : "FAIL ") << s.name << " (" << s.checks - s.failures << "/"
              << s.checks << ", " << s.seconds << " s)\n";
  }
  Output out(ctx);
  Json body;
  body["fault"] = to_string(rep.fault);
  body["passed"] = rep.passed();
  body["suites"] = suites;
  out.report("selftest", body);
  return rep.passed() ? kExitOk : kExitError;
}

int dispatch(const RunConfig& run) {
  const Context ctx = load(run);
  if (run.command == "trace") return cmd_trace(ctx);
  if (run.command == "relosc") return cmd_relosc(ctx);
  if (run.command == "classify") return cmd_classify(ctx);
  if (run.command == "kneser") return cmd_kneser(ctx);
  if (run.command == "eigencount") return cmd_eigencount(ctx);
  if (run.command == "invariance") return cmd_invariance(ctx);
  return cmd_selftest(ctx);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relative oscillation analysis for Sturm-Liouville expressions"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  RunConfig run;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"trace", "Integrate the Prufer system and count zeros"},
      {"relosc", "Relative count N(u0, u1) and the modified Wronskian"},
      {"classify", "(Relative) oscillation verdict from window counts and certificates"},
      {"kneser", "Kneser-type test against the -1/4 threshold"},
      {"eigencount", "Eigenvalue counts of truncated problems, or an accumulation study"},
      {"invariance", "Essential spectrum invariance and limit point probe"},
      {"selftest", "Run the invariant suites at reduced scale"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    if (name == "selftest") {
      sub->add_option("--config", run.config_path, "JSON config file")->check(CLI::ExistingFile);
      sub->add_option("--fault", run.fault, "Planted fault: none or snap0");
    } else {
      sub->add_option("--config", run.config_path, "JSON config file")
          ->required()
          ->check(CLI::ExistingFile);
    }
    sub->add_option("--out", run.out_dir, "Directory for JSON/CSV artifacts");
    sub->add_option("--seed", run.seed, "Seed for randomized suites");
    sub->add_option("--jobs", run.jobs, "Worker threads for independent counts");
    sub->add_option("--margin", run.margin, "Kneser margin around -1/4");
    sub->add_option("--rtol", run.rtol, "Relative integration tolerance");
    sub->add_option("--atol", run.atol, "Absolute integration tolerance");
    sub->callback([&run, name = name] { run.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    return dispatch(run);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const Json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kExitError;
}
