#include "relosc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "relosc/errors.hpp"

namespace relosc {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError((path.empty() ? std::string("/") : path) + ": " + what);
}

// Returns the value for key, or nullptr when absent.
const Json* find(const Json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void reject_unknown(const Json& obj, const std::string& path, std::set<std::string> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) fail(path + "/" + it.key(), "unknown key");
  }
}

double number(const Json& obj, const char* key, const std::string& path, double fallback) {
  const Json* v = find(obj, key);
  if (!v) return fallback;
  if (v->is_number()) return v->get<double>();
  if (v->is_string()) {
    const std::string s = v->get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  fail(path + "/" + key, "expected a number");
}

int integer(const Json& obj, const char* key, const std::string& path, int fallback) {
  const Json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) fail(path + "/" + key, "expected an integer");
  return v->get<int>();
}

bool boolean(const Json& obj, const char* key, const std::string& path, bool fallback) {
  const Json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) fail(path + "/" + key, "expected true or false");
  return v->get<bool>();
}

std::vector<double> numbers(const Json& obj, const char* key, const std::string& path) {
  const Json* v = find(obj, key);
  if (!v) fail(path + "/" + key, "missing array");
  if (!v->is_array()) fail(path + "/" + key, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    if (!(*v)[i].is_number()) fail(path + "/" + key + "/" + std::to_string(i), "expected a number");
    out.push_back((*v)[i].get<double>());
  }
  return out;
}

family::PowerLaw::Term term(const Json& obj, const char* key, const std::string& path,
                            family::PowerLaw::Term fallback) {
  const Json* v = find(obj, key);
  if (!v) return fallback;
  const std::string p = path + "/" + key;
  require_object(*v, p);
  reject_unknown(*v, p, {"base", "coeff", "exponent"});
  return {number(*v, "base", p, fallback.base), number(*v, "coeff", p, fallback.coeff),
          number(*v, "exponent", p, fallback.exponent)};
}

FamilySpec family_from_json(const std::string& name, const Json& params, const std::string& path) {
  require_object(params, path);
  if (name == "Constant") {
    reject_unknown(params, path, {"p", "q", "r"});
    family::Constant f;
    return family::Constant{number(params, "p", path, f.p), number(params, "q", path, f.q),
                            number(params, "r", path, f.r)};
  }
  if (name == "InverseSquare") {
    reject_unknown(params, path, {"c", "q_inf", "p_inf", "r_inf"});
    family::InverseSquare f;
    return family::InverseSquare{number(params, "c", path, f.c), number(params, "q_inf", path, f.q_inf),
                                 number(params, "p_inf", path, f.p_inf),
                                 number(params, "r_inf", path, f.r_inf)};
  }
  if (name == "IteratedLog") {
    reject_unknown(params, path, {"n", "gamma", "q_inf", "p_inf", "r_inf", "p_log_coeff"});
    family::IteratedLog f;
    f.n = integer(params, "n", path, f.n);
    f.gamma = number(params, "gamma", path, f.gamma);
    f.q_inf = number(params, "q_inf", path, f.q_inf);
    f.p_inf = number(params, "p_inf", path, f.p_inf);
    f.r_inf = number(params, "r_inf", path, f.r_inf);
    f.p_log_coeff = number(params, "p_log_coeff", path, f.p_log_coeff);
    return f;
  }
  if (name == "PerturbedWeight") {
    reject_unknown(params, path,
                   {"p_inf", "q_inf", "r_inf", "weight_coeff", "weight_exp", "q_coeff", "q_exp"});
    family::PerturbedWeight f;
    f.p_inf = number(params, "p_inf", path, f.p_inf);
    f.q_inf = number(params, "q_inf", path, f.q_inf);
    f.r_inf = number(params, "r_inf", path, f.r_inf);
    f.weight_coeff = number(params, "weight_coeff", path, f.weight_coeff);
    f.weight_exp = number(params, "weight_exp", path, f.weight_exp);
    f.q_coeff = number(params, "q_coeff", path, f.q_coeff);
    f.q_exp = number(params, "q_exp", path, f.q_exp);
    return f;
  }
  if (name == "PowerLaw") {
    reject_unknown(params, path, {"p", "q", "r"});
    family::PowerLaw f;
    f.p = term(params, "p", path, f.p);
    f.q = term(params, "q", path, f.q);
    f.r = term(params, "r", path, f.r);
    return f;
  }
  if (name == "Oscillating") {
    reject_unknown(params, path, {"p", "q", "r", "amplitude", "frequency", "log_argument"});
    family::Oscillating f;
    f.p = number(params, "p", path, f.p);
    f.q = number(params, "q", path, f.q);
    f.r = number(params, "r", path, f.r);
    f.amplitude = number(params, "amplitude", path, f.amplitude);
    f.frequency = number(params, "frequency", path, f.frequency);
    f.log_argument = boolean(params, "log_argument", path, f.log_argument);
    return f;
  }
  if (name == "Tabulated") {
    reject_unknown(params, path, {"x", "p", "q", "r"});
    return family::Tabulated{numbers(params, "x", path), numbers(params, "p", path),
                             numbers(params, "q", path), numbers(params, "r", path)};
  }
  fail(path, "unknown family '" + name + "'");
}

Json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

Json params_json(const FamilySpec& spec) {
  Json j = Json::object();
  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, family::Constant>) {
          j = {{"p", f.p}, {"q", f.q}, {"r", f.r}};
        } else if constexpr (std::is_same_v<F, family::InverseSquare>) {
          j = {{"c", f.c}, {"q_inf", f.q_inf}, {"p_inf", f.p_inf}, {"r_inf", f.r_inf}};
        } else if constexpr (std::is_same_v<F, family::IteratedLog>) {
          j = {{"n", f.n},         {"gamma", f.gamma}, {"q_inf", f.q_inf},
               {"p_inf", f.p_inf}, {"r_inf", f.r_inf}, {"p_log_coeff", f.p_log_coeff}};
        } else if constexpr (std::is_same_v<F, family::PerturbedWeight>) {
          j = {{"p_inf", f.p_inf},
               {"q_inf", f.q_inf},
               {"r_inf", f.r_inf},
               {"weight_coeff", f.weight_coeff},
               {"weight_exp", f.weight_exp},
               {"q_coeff", f.q_coeff},
               {"q_exp", f.q_exp}};
        } else if constexpr (std::is_same_v<F, family::PowerLaw>) {
          auto t = [](const family::PowerLaw::Term& s) {
            return Json{{"base", s.base}, {"coeff", s.coeff}, {"exponent", s.exponent}};
          };
          j = {{"p", t(f.p)}, {"q", t(f.q)}, {"r", t(f.r)}};
        } else if constexpr (std::is_same_v<F, family::Oscillating>) {
          j = {{"p", f.p},
               {"q", f.q},
               {"r", f.r},
               {"amplitude", f.amplitude},
               {"frequency", f.frequency},
               {"log_argument", f.log_argument}};
        } else {
          j = {{"x", f.x}, {"p", f.p}, {"q", f.q}, {"r", f.r}};
        }
      },
      spec);
  return j;
}

Json vanish_json(const VanishAssessment& v) {
  return {{"vanishes", v.vanishes}, {"last_abs_max", v.last_abs_max}};
}

Json growth_json(const GrowthAssessment& g) {
  return {{"verdict", g.verdict == GrowthVerdict::Diverging    ? "diverging"
                      : g.verdict == GrowthVerdict::Converging ? "converging"
                                                               : "inconclusive"},
          {"total", number_json(g.total)}};
}

Json side_json(const AlphaBetaSide& s) {
  return {{"r_ratio", vanish_json(s.r_ratio)},
          {"p_ratio", vanish_json(s.p_ratio)},
          {"q_drift", vanish_json(s.q_drift)},
          {"q_over_r", {{"bounded", s.q_over_r.bounded}, {"bound", s.q_over_r.bound}}},
          {"pass_alpha", s.pass_alpha},
          {"pass_beta", s.pass_beta}};
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json parse_json(std::string_view text, std::string_view source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    // Convert the byte offset to 1-based line and column.
    const std::size_t off = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < off; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(std::string(source) + ":" + std::to_string(line) + ":" +
                      std::to_string(col) + ": malformed JSON");
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = digits[v & 0xf];
  return s;
}

CoefficientSet coefficients_from_json(const Json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"family", "params", "interval"});
  const Json* fam = find(j, "family");
  if (!fam || !fam->is_string()) fail(path + "/family", "expected a family name");
  const Json* params = find(j, "params");
  const Json empty = Json::object();
  const FamilySpec spec =
      family_from_json(fam->get<std::string>(), params ? *params : empty, path + "/params");
  const Json* iv = find(j, "interval");
  if (!iv) fail(path + "/interval", "missing interval");
  require_object(*iv, path + "/interval");
  reject_unknown(*iv, path + "/interval", {"a", "b"});
  if (!find(*iv, "a")) fail(path + "/interval/a", "missing");
  const Interval interval{number(*iv, "a", path + "/interval", 0.0),
                          number(*iv, "b", path + "/interval",
                                 std::numeric_limits<double>::infinity())};
  try {
    return build_coefficients(spec, interval);
  } catch (const DomainError& e) {
    fail(path, e.what());
  } catch (const SpecError& e) {
    fail(path, e.what());
  }
}

Json to_json(const CoefficientSet& c) {
  Json j;
  j["family"] = to_string(c.tag());
  j["params"] = params_json(c.spec());
  j["interval"] = {{"a", c.interval().a}, {"b", number_json(c.interval().b)}};
  if (c.tail()) {
    j["tail"] = {{"p_inf", c.tail()->p_inf}, {"q_inf", c.tail()->q_inf}, {"r_inf", c.tail()->r_inf}};
  }
  return j;
}

Json to_json(const Tolerances& t) { return {{"rtol", t.rtol}, {"atol", t.atol}}; }

Json to_json(const WindowPolicy& p) {
  return {{"x0", number_json(p.x0)},
          {"ratio", p.ratio},
          {"K", p.K},
          {"K_stable", p.K_stable},
          {"K_grow", p.K_grow}};
}

Json to_json(const SolutionTrace& t) {
  Json j;
  j["lambda"] = t.lambda();
  j["theta_a"] = t.theta_a();
  j["tolerances"] = to_json(t.tolerances());
  j["x_begin"] = t.x_begin();
  j["x_end"] = t.x_end();
  j["steps"] = t.steps();
  j["error_estimate"] = t.error_estimate();
  j["zero_count"] = count_zeros(t, t.x_end());
  j["events"] = t.events();
  return j;
}

Json to_json(const OscVerdict& v) {
  Json j;
  j["verdict"] = to_string(v.kind);
  j["basis"] = to_string(v.basis);
  j["n_limit"] = v.n_limit ? Json(*v.n_limit) : Json(nullptr);
  j["policy"] = to_json(v.policy);
  Json w = Json::array();
  for (const auto& s : v.windows) w.push_back({{"x", s.x}, {"n", s.n}});
  j["windows"] = w;
  j["certificate"] = v.certificate ? to_json(*v.certificate) : Json(nullptr);
  j["note"] = v.note;
  return j;
}

Json to_json(const KneserReport& r) {
  Json j;
  j["mode"] = to_string(r.mode);
  j["verdict"] = to_string(r.verdict);
  j["threshold"] = kKneserThreshold;
  j["margin"] = r.margin;
  j["sup_tail"] = number_json(r.sup_tail);
  j["inf_tail"] = number_json(r.inf_tail);
  j["window_sup"] = Json::array();
  j["window_inf"] = Json::array();
  for (double v : r.window_sup) j["window_sup"].push_back(number_json(v));
  for (double v : r.window_inf) j["window_inf"].push_back(number_json(v));
  j["best_ell"] = r.best_ell ? Json(*r.best_ell) : Json(nullptr);
  if (r.rho) {
    j["rho"] = {{"bounded", r.rho->bounded},
                {"vanishes", r.rho->vanishes},
                {"averaged_variation", r.rho->averaged_variation}};
  } else {
    j["rho"] = nullptr;
  }
  if (r.side_conditions) {
    j["side_conditions"] = {{"passed", r.side_conditions->passed},
                            {"v0_p0_du0_term", vanish_json(r.side_conditions->v0_p0_du0_term)},
                            {"p_ratio_term", vanish_json(r.side_conditions->p_ratio_term)}};
  } else {
    j["side_conditions"] = nullptr;
  }
  Json s = Json::array();
  for (const auto& k : r.samples) s.push_back({number_json(k.x), number_json(k.value)});
  j["samples"] = s;
  j["note"] = r.note;
  return j;
}

Json to_json(const AlphaBetaReport& r) {
  return {{"pass_alpha", r.pass_alpha},
          {"pass_beta", r.pass_beta},
          {"symmetric_agree", r.symmetric_agree},
          {"grid_points", r.grid_points},
          {"direct", side_json(r.direct)},
          {"swapped", side_json(r.swapped)}};
}

Json to_json(const InvarianceReport& r) {
  Json j;
  j["verdict"] = to_string(r.verdict);
  j["reason"] = r.reason;
  j["hypotheses"] = r.hypotheses ? to_json(*r.hypotheses) : Json(nullptr);
  return j;
}

Json to_json(const LimitPointReport& r) {
  return {{"verdict", to_string(r.verdict)},
          {"growth_u", growth_json(r.growth_u)},
          {"growth_v", growth_json(r.growth_v)},
          {"window_sums_u", r.window_sums_u},
          {"window_sums_v", r.window_sums_v}};
}

Json to_json(const EigenCount& c) {
  return {{"lambda", c.lambda},
          {"count", c.count},
          {"method", to_string(c.method)},
          {"resolution", c.resolution},
          {"shifted", c.shifted}};
}

Json to_json(const AccumulationStudy& s) {
  Json j;
  j["bottom"] = s.bottom;
  j["evidence"] = to_string(s.evidence);
  j["max_method_gap"] = s.max_method_gap;
  j["note"] = s.note;
  Json rows = Json::array();
  for (const auto& r : s.rows) {
    rows.push_back({{"b_trunc", r.b_trunc},
                    {"lambda", r.lambda},
                    {"count_shoot", r.count_shoot},
                    {"count_fd", r.count_fd}});
  }
  j["rows"] = rows;
  return j;
}

void write_csv_header(std::ostream& os, std::string_view header) {
  std::istringstream in{std::string(header)};
  std::string line;
  while (std::getline(in, line)) os << "# " << line << '\n';
}

void write_trace_csv(std::ostream& os, const SolutionTrace& t, std::string_view header) {
  write_csv_header(os, header);
  os << "x,theta,log_rho\n";
  for (const auto& s : t.states()) {
    os << format_number(s.x) << ',' << format_number(s.theta) << ',' << format_number(s.log_rho)
       << '\n';
  }
}

void write_relative_csv(std::ostream& os, const RelativeTrace& rt, std::span<const double> grid,
                        std::string_view header) {
  write_csv_header(os, header);
  os << "x,delta,n_rel,W\n";
  for (double x : grid) {
    os << format_number(x) << ',' << format_number(rt.delta(x)) << ',' << relative_count(rt, x)
       << ',' << format_number(modified_wronskian(rt, x)) << '\n';
  }
}

void write_windows_csv(std::ostream& os, const OscVerdict& v, std::string_view header) {
  write_csv_header(os, header);
  os << "x_k,N_k\n";
  for (const auto& s : v.windows) os << format_number(s.x) << ',' << s.n << '\n';
}

void write_kneser_csv(std::ostream& os, const KneserReport& r, std::string_view header) {
  write_csv_header(os, header);
  os << "x,value\n";
  for (const auto& s : r.samples) os << format_number(s.x) << ',' << format_number(s.value) << '\n';
}

void write_accumulation_csv(std::ostream& os, const AccumulationStudy& s, std::string_view header) {
  write_csv_header(os, header);
  os << "b_trunc,lambda,count_shoot,count_fd\n";
  for (const auto& r : s.rows) {
    os << format_number(r.b_trunc) << ',' << format_number(r.lambda) << ',' << r.count_shoot << ','
       << r.count_fd << '\n';
  }
}

}  // namespace relosc
