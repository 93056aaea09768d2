#include "multisum/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "multisum/errors.hpp"

namespace multisum {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

std::string get_string(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail(where, std::string("missing key '") + key + "'");
  if (!j.at(key).is_string()) fail(where + "." + key, "expected a string");
  return j.at(key).get<std::string>();
}

bool get_bool_or(const Json& j, const char* key, bool fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) fail(where + "." + key, "expected true or false");
  return j.at(key).get<bool>();
}

int get_int(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail(where, std::string("missing key '") + key + "'");
  if (!j.at(key).is_number_integer()) fail(where + "." + key, "expected an integer");
  return j.at(key).get<int>();
}

std::vector<int> int_list(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of integers");
  std::vector<int> out;
  for (const auto& x : j) {
    if (!x.is_number_integer()) fail(where, "expected an array of integers");
    out.push_back(x.get<int>());
  }
  return out;
}

std::vector<double> number_list(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) fail(where, "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path q(p);
  return q.is_absolute() ? q : base / q;
}

}  // namespace

Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(origin + ": invalid JSON: " + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path.string());
}

void require_keys(const Json& j, const std::string& where,
                  std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional) {
  if (!j.is_object()) fail(where, "expected an object");
  std::set<std::string> allowed;
  for (const char* k : required) {
    allowed.insert(k);
    if (!j.contains(k)) fail(where, std::string("missing key '") + k + "'");
  }
  for (const char* k : optional) allowed.insert(k);
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) fail(where, "unknown key '" + item.key() + "'");
}

double get_number(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail(where, std::string("missing key '") + key + "'");
  if (!j.at(key).is_number()) fail(where + "." + key, "expected a number");
  return j.at(key).get<double>();
}

double get_number_or(const Json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? get_number(j, key, where) : fallback;
}

std::vector<double> get_numbers(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail(where, std::string("missing key '") + key + "'");
  return number_list(j.at(key), where + "." + key);
}

std::vector<int> get_ints(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail(where, std::string("missing key '") + key + "'");
  return int_list(j.at(key), where + "." + key);
}

AxisDistribution parse_axis(const Json& j, const std::string& where) {
  std::string kind;
  if (j.is_string()) {
    kind = j.get<std::string>();
  } else {
    require_keys(j, where, {"kind"}, {"beta", "nodes", "weights"});
    kind = get_string(j, "kind", where);
  }
  if (kind == "standard_normal") return AxisDistribution::standard_normal();
  if (kind == "rademacher") return AxisDistribution::rademacher();
  if (kind == "centered_exponential") return AxisDistribution::centered_exponential();
  if (kind == "compensated_poisson") return AxisDistribution::compensated_poisson();
  if (kind == "log_weibull") {
    if (!j.is_object()) fail(where, "log_weibull needs {kind, beta}");
    double beta = get_number(j, "beta", where);
    if (!(beta > 0)) fail(where + ".beta", "must be positive");
    return AxisDistribution::log_weibull(beta);
  }
  if (kind == "grid") {
    if (!j.is_object()) fail(where, "grid needs {kind, nodes, weights}");
    try {
      return AxisDistribution::grid(get_numbers(j, "nodes", where), get_numbers(j, "weights", where));
    } catch (const std::invalid_argument& e) {
      fail(where, e.what());
    }
  }
  fail(where, "unknown axis law '" + kind + "'");
}

FactorFamily parse_factor(const Json& j, const std::string& where) {
  std::string kind;
  if (j.is_string()) {
    kind = j.get<std::string>();
  } else {
    require_keys(j, where, {"kind"}, {"nodes", "columns", "mean", "sd"});
    kind = get_string(j, "kind", where);
  }
  if (kind == "hermite") return FactorFamily::hermite();
  if (kind == "rademacher_sign") return FactorFamily::rademacher_sign();
  if (kind == "centered_poisson_charlier") return FactorFamily::centered_poisson_charlier();
  if (kind == "centered_exponential_poly") return FactorFamily::centered_exponential_poly();
  if (kind == "standardized_identity") {
    if (!j.is_object()) fail(where, "standardized_identity needs {kind, mean, sd}");
    return FactorFamily::standardized_identity(get_number(j, "mean", where),
                                               get_number(j, "sd", where));
  }
  if (kind == "tabulated") {
    if (!j.is_object()) fail(where, "tabulated needs {kind, nodes, columns}");
    auto nodes = get_numbers(j, "nodes", where);
    if (!j.contains("columns") || !j.at("columns").is_array())
      fail(where, "missing array 'columns'");
    std::vector<std::vector<double>> cols;
    for (std::size_t i = 0; i < j.at("columns").size(); ++i)
      cols.push_back(number_list(j.at("columns")[i], where + ".columns[" + std::to_string(i) + "]"));
    try {
      return FactorFamily::tabulated(nodes, cols);
    } catch (const std::invalid_argument& e) {
      fail(where, e.what());
    }
  }
  fail(where, "unknown factor family '" + kind + "'");
}

DegenerateKernel parse_kernel(const Json& j, const std::string& where) {
  require_keys(j, where, {"factors", "terms"}, {"axes", "orthonormal"});
  if (!j.at("factors").is_array() || j.at("factors").empty())
    fail(where + ".factors", "expected a nonempty array");
  std::vector<FactorFamily> factors;
  for (std::size_t s = 0; s < j.at("factors").size(); ++s)
    factors.push_back(parse_factor(j.at("factors")[s], where + ".factors[" + std::to_string(s) + "]"));
  std::vector<AxisDistribution> axes;
  if (j.contains("axes")) {
    if (!j.at("axes").is_array()) fail(where + ".axes", "expected an array");
    for (std::size_t s = 0; s < j.at("axes").size(); ++s)
      axes.push_back(parse_axis(j.at("axes")[s], where + ".axes[" + std::to_string(s) + "]"));
  } else {
    for (std::size_t s = 0; s < factors.size(); ++s) {
      try {
        axes.push_back(factors[s].natural_axis());
      } catch (const std::logic_error&) {
        fail(where + ".axes", "factor family " + factors[s].name() + " needs an explicit axis law");
      }
    }
  }
  if (!j.at("terms").is_array()) fail(where + ".terms", "expected an array");
  std::vector<KernelTerm> terms;
  for (std::size_t i = 0; i < j.at("terms").size(); ++i) {
    std::string w = where + ".terms[" + std::to_string(i) + "]";
    const auto& t = j.at("terms")[i];
    require_keys(t, w, {"k", "w"}, {});
    terms.push_back({get_ints(t, "k", w), get_number(t, "w", w)});
  }
  bool ortho = get_bool_or(j, "orthonormal", false, where);
  try {
    return DegenerateKernel(factors, axes, terms, ortho);
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
}

ParametricKernel parse_parametric_kernel(const Json& j, const std::string& where,
                                         const std::filesystem::path&) {
  if (j.is_object() && j.contains("builtin")) {
    require_keys(j, where, {"builtin", "n", "theta"}, {});
    std::string b = get_string(j, "builtin", where);
    if (b != "holder_rotation") fail(where + ".builtin", "unknown builtin '" + b + "'");
    int n = get_int(j, "n", where);
    if (n < 1) fail(where + ".n", "must be >= 1");
    return holder_rotation_kernel(n, get_number(j, "theta", where));
  }
  require_keys(j, where, {"V", "lambda", "factors"}, {"axes", "orthonormal"});
  std::vector<std::vector<double>> grid;
  if (!j.at("V").is_array() || j.at("V").empty()) fail(where + ".V", "expected a nonempty array");
  for (std::size_t i = 0; i < j.at("V").size(); ++i) {
    const auto& v = j.at("V")[i];
    std::string w = where + ".V[" + std::to_string(i) + "]";
    if (v.is_object()) {
      require_keys(v, w, {"coords"}, {});
      grid.push_back(get_numbers(v, "coords", w));
    } else {
      grid.push_back(number_list(v, w));
    }
  }
  std::vector<FactorFamily> factors;
  if (!j.at("factors").is_array()) fail(where + ".factors", "expected an array");
  for (std::size_t s = 0; s < j.at("factors").size(); ++s)
    factors.push_back(parse_factor(j.at("factors")[s], where + ".factors[" + std::to_string(s) + "]"));
  std::vector<AxisDistribution> axes;
  if (j.contains("axes")) {
    for (std::size_t s = 0; s < j.at("axes").size(); ++s)
      axes.push_back(parse_axis(j.at("axes")[s], where + ".axes[" + std::to_string(s) + "]"));
  } else {
    for (const auto& f : factors) {
      try {
        axes.push_back(f.natural_axis());
      } catch (const std::logic_error&) {
        fail(where + ".axes", "factor family " + f.name() + " needs an explicit axis law");
      }
    }
  }
  std::vector<ParametricEntry> entries;
  if (!j.at("lambda").is_array()) fail(where + ".lambda", "expected an array");
  for (std::size_t i = 0; i < j.at("lambda").size(); ++i) {
    std::string w = where + ".lambda[" + std::to_string(i) + "]";
    const auto& e = j.at("lambda")[i];
    require_keys(e, w, {"v_index", "k", "w"}, {});
    entries.push_back({get_int(e, "v_index", w), get_ints(e, "k", w), get_number(e, "w", w)});
  }
  try {
    return ParametricKernel(grid, factors, axes, entries, get_bool_or(j, "orthonormal", false, where));
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
}

TabulatedKernel parse_tabulated_kernel(const Json& j, const std::string& where,
                                       const std::filesystem::path& base_dir) {
  TabulatedKernel tk = [&] {
    if (j.contains("builtin")) {
      require_keys(j, where, {"builtin", "n"}, {"centered"});
      std::string b = get_string(j, "builtin", where);
      if (b != "brownian_min") fail(where + ".builtin", "unknown builtin '" + b + "'");
      int n = get_int(j, "n", where);
      if (n < 2) fail(where + ".n", "must be >= 2");
      return TabulatedKernel::brownian_min(n);
    }
    require_keys(j, where, {"grid_csv", "weights_csv"}, {"centered"});
    try {
      return TabulatedKernel::read_csv(resolve(base_dir, get_string(j, "grid_csv", where)),
                                       resolve(base_dir, get_string(j, "weights_csv", where)));
    } catch (const std::invalid_argument& e) {
      fail(where, e.what());
    } catch (const std::runtime_error& e) {
      fail(where, e.what());
    }
  }();
  return get_bool_or(j, "centered", false, where) ? tk.double_centered() : tk;
}

IndexSet parse_index_set(const Json& j, const std::string& where) {
  try {
    if (j.contains("generator")) {
      require_keys(j, where, {"generator", "n"}, {"d"});
      std::string g = get_string(j, "generator", where);
      int n = get_int(j, "n", where);
      if (g == "square_minus_corner") return square_minus_corner(n);
      if (g == "square_plus_cell") return square_plus_cell(n);
      if (g == "lshape_fixed_fraction") return lshape_fixed_fraction(n);
      if (g == "cube") return cube(j.contains("d") ? get_int(j, "d", where) : 2, n);
      fail(where + ".generator", "unknown generator '" + g + "'");
    }
    require_keys(j, where, {"kind"}, {"n", "profile", "d", "cells"});
    std::string kind = get_string(j, "kind", where);
    if (kind == "rect") return IndexSet::rect(get_ints(j, "n", where));
    if (kind == "staircase") return IndexSet::staircase(get_ints(j, "profile", where));
    if (kind == "explicit") {
      int d = get_int(j, "d", where);
      if (!j.contains("cells") || !j.at("cells").is_array()) fail(where, "missing array 'cells'");
      std::vector<std::vector<int>> cells;
      for (std::size_t i = 0; i < j.at("cells").size(); ++i)
        cells.push_back(int_list(j.at("cells")[i], where + ".cells[" + std::to_string(i) + "]"));
      return IndexSet::explicit_set(d, cells);
    }
    fail(where + ".kind", "unknown index-set kind '" + kind + "'");
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
}

std::vector<IndexSet> parse_family(const Json& j, const std::string& where) {
  std::vector<IndexSet> out;
  if (j.is_array()) {
    if (j.empty()) fail(where, "empty index-set list");
    for (std::size_t i = 0; i < j.size(); ++i)
      out.push_back(parse_index_set(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
  }
  require_keys(j, where, {"generator", "sizes"}, {"d"});
  auto sizes = get_ints(j, "sizes", where);
  if (sizes.empty()) fail(where + ".sizes", "empty size list");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    Json one = {{"generator", j.at("generator")}, {"n", sizes[i]}};
    if (j.contains("d")) one["d"] = j.at("d");
    out.push_back(parse_index_set(one, where + ".sizes[" + std::to_string(i) + "]"));
  }
  return out;
}

PsiFunction parse_psi(const Json& j, const std::string& where) {
  require_keys(j, where, {"family"}, {"params", "support_upper"});
  std::string fam = get_string(j, "family", where);
  Json params = j.contains("params") ? j.at("params") : Json::object();
  std::string pw = where + ".params";
  try {
    if (fam == "power_log") {
      require_keys(params, pw, {"m"}, {"r"});
      return PsiFunction::power_log(get_number(params, "m", pw), get_number_or(params, "r", 0, pw));
    }
    if (fam == "extremal") {
      require_keys(params, pw, {"r"}, {});
      return PsiFunction::extremal(get_number(params, "r", pw));
    }
    if (fam == "bounded_support") {
      require_keys(params, pw, {"b", "gamma"}, {"r"});
      return PsiFunction::bounded_support(get_number(params, "b", pw), get_number(params, "gamma", pw),
                                          get_number_or(params, "r", 0, pw));
    }
    if (fam == "exp_power") {
      require_keys(params, pw, {"beta", "C"}, {});
      return PsiFunction::exp_power(get_number(params, "beta", pw), get_number(params, "C", pw));
    }
    if (fam == "product_of") {
      require_keys(params, pw, {"factors"}, {});
      std::vector<PsiFunction> fs;
      for (std::size_t i = 0; i < params.at("factors").size(); ++i)
        fs.push_back(parse_psi(params.at("factors")[i], pw + ".factors[" + std::to_string(i) + "]"));
      return PsiFunction::product_of(fs);
    }
    if (fam == "rosenthal_scaled") {
      require_keys(params, pw, {"base", "d"}, {});
      return PsiFunction::rosenthal_scaled(parse_psi(params.at("base"), pw + ".base"),
                                           get_int(params, "d", pw));
    }
    if (fam == "tabulated") {
      require_keys(params, pw, {"p", "values"}, {});
      return PsiFunction::tabulated(get_numbers(params, "p", pw), get_numbers(params, "values", pw));
    }
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  } catch (const std::domain_error& e) {
    fail(where, e.what());
  }
  fail(where + ".family", "unknown psi family '" + fam + "'");
}

Json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

Json psi_to_json(const PsiFunction& psi) {
  Json j;
  j["family"] = psi.family_name();
  Json params = Json::object();
  const auto& p = psi.params();
  switch (psi.family()) {
    case PsiFamily::power_log:
      params["m"] = p.at(0);
      params["r"] = p.at(1);
      break;
    case PsiFamily::extremal:
      params["r"] = p.at(0);
      break;
    case PsiFamily::bounded_support:
      params["b"] = p.at(0);
      params["gamma"] = p.at(1);
      params["r"] = p.at(2);
      break;
    case PsiFamily::exp_power:
      params["beta"] = p.at(0);
      params["C"] = p.at(1);
      break;
    case PsiFamily::product_of: {
      Json fs = Json::array();
      for (const auto& c : psi.children()) fs.push_back(psi_to_json(c));
      params["factors"] = fs;
      break;
    }
    case PsiFamily::rosenthal_scaled:
      params["base"] = psi_to_json(psi.children().at(0));
      params["d"] = static_cast<int>(p.at(0));
      break;
    case PsiFamily::tabulated:
      params["p"] = psi.table_p();
      params["values"] = psi.table_values();
      break;
  }
  j["params"] = params;
  j["support_upper"] = num(psi.support_upper());
  return j;
}

Json estimate_json(const Estimate& e) {
  return Json{{"value", num(e.value)}, {"standard_error", num(e.standard_error)}};
}

Json convergence_json(const ConvergenceReport& rep) {
  Json j;
  j["family"] = rep.family;
  j["verdict"] = verdict_name(rep.verdict);
  j["ks_verdict"] = verdict_name(rep.ks_verdict);
  j["sigma2"] = num(rep.sigma2);
  j["limit_variance"] = estimate_json(rep.limit_variance);
  j["noise_budget"] = num(rep.noise_budget);
  j["ks_threshold"] = num(rep.ks_threshold);
  j["ks_nonincreasing"] = rep.ks_nonincreasing;
  j["final_below_threshold"] = rep.final_below_threshold;
  j["variance_consistent"] = rep.variance_consistent;
  Json stages = Json::array();
  for (const auto& s : rep.stages)
    stages.push_back({{"label", s.label},
                      {"cardinality", s.cardinality},
                      {"kappa_minus", num(s.kappa_minus)},
                      {"kappa_plus", num(s.kappa_plus)},
                      {"inner_min_side", s.inner_min_side},
                      {"outer_min_side", s.outer_min_side},
                      {"ks", num(s.ks)},
                      {"ks_margin", num(rep.ks_threshold - s.ks)},
                      {"variance", estimate_json(s.variance)}});
  j["stages"] = stages;
  if (rep.conditions) {
    const auto& c = *rep.conditions;
    j["conditions"] = {{"kappa_threshold", c.kappa_threshold},
                       {"inscribed_conditions_met", c.inscribed_conditions_met},
                       {"circumscribed_conditions_met", c.circumscribed_conditions_met}};
  }
  return j;
}

std::string convergence_csv(const ConvergenceReport& rep) {
  std::string out = "stage,cardinality,kappa_minus,kappa_plus,ks,verdict\n";
  for (std::size_t i = 0; i < rep.stages.size(); ++i) {
    const auto& s = rep.stages[i];
    bool stage_ok = s.ks <= rep.ks_threshold;
    out += std::to_string(i + 1) + "," + std::to_string(s.cardinality) + "," + fmt(s.kappa_minus) +
           "," + fmt(s.kappa_plus) + "," + fmt(s.ks) + "," + (stage_ok ? "below" : "above") + "\n";
  }
  return out;
}

Json sandwich_json(const SandwichReport& rep) {
  Json j;
  j["verdict"] = rep.pass ? "pass" : "fail";
  j["rank_one"] = rep.rank_one;
  Json rows = Json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"p", r.p},
                    {"lower", num(r.lower)},
                    {"empirical", estimate_json(r.empirical)},
                    {"argmax_cardinality", r.argmax_cardinality},
                    {"upper", num(r.upper)},
                    {"ratio_empirical_lower", num(r.empirical.value / r.lower)},
                    {"ratio_upper_lower", num(r.upper / r.lower)},
                    {"lower_ok", r.lower_ok},
                    {"upper_ok", r.upper_ok}});
  j["rows"] = rows;
  Json fits = Json::array();
  for (const auto& f : rep.shape_fits)
    fits.push_back({{"name", f.name},
                    {"p_lo", f.p_lo},
                    {"p_hi", f.p_hi},
                    {"fitted_exponent", num(f.fitted_exponent)},
                    {"expected_exponent", f.expected_exponent},
                    {"relative_deviation", num(f.relative_deviation)},
                    {"within_tolerance", f.within_tolerance}});
  j["shape_fits"] = fits;
  return j;
}

Json tail_json(const TailDominationReport& rep) {
  Json j;
  j["verdict"] = rep.pass ? "pass" : "fail";
  j["gls_norm"] = num(rep.gls_norm);
  j["threshold"] = num(rep.threshold);
  j["checked"] = rep.checked;
  j["violations"] = rep.violations;
  j["fitted_growth_exponent"] = num(rep.fitted_growth_exponent);
  Json sets = Json::array();
  for (const auto& s : rep.sets)
    sets.push_back({{"cardinality", s.cardinality},
                    {"checked", s.checked},
                    {"violations", s.violations},
                    {"worst_ratio", num(s.worst_ratio)}});
  j["sets"] = sets;
  if (rep.envelope)
    j["envelope"] = {{"exponent", num(rep.envelope->exponent)},
                     {"c_upper", num(rep.envelope->c_upper)},
                     {"c_lower", num(rep.envelope->c_lower)},
                     {"confirmed", rep.envelope->confirmed}};
  return j;
}

Json entropy_profile_json(const EntropyProfile& profile) {
  Json rows = Json::array();
  for (const auto& r : profile.rows)
    rows.push_back({{"eps", r.eps}, {"N", num(r.n)}, {"H", num(r.h)}, {"greedy", num(r.greedy)},
                    {"exact", r.exact}});
  return rows;
}

std::string entropy_profile_csv(const EntropyProfile& profile) {
  std::string out = "eps,N,H\n";
  for (const auto& r : profile.rows) out += fmt(r.eps) + "," + fmt(r.n) + "," + fmt(r.h) + "\n";
  return out;
}

Json parametric_json(const ParametricReport& rep) {
  Json j;
  j["verdict"] = verdict_name(rep.verdict);
  j["level"] = rep.level;
  j["p"] = rep.p;
  j["sigma_lambda"] = num(rep.sigma);
  j["G"] = num(rep.g);
  j["scale"] = num(rep.scale);
  j["hypotheses_met"] = rep.hypotheses_met;
  j["entropy_integral"] = {{"value", num(rep.integral.value)},
                           {"tail_exponent", num(rep.integral.tail_exponent)},
                           {"divergent", rep.integral.divergent}};
  j["majorant"] = num(rep.majorant);
  j["sup_ok"] = rep.sup_ok;
  Json sups = Json::array();
  for (const auto& s : rep.sup_moments)
    sups.push_back({{"cardinality", s.cardinality}, {"moment", estimate_json(s.moment)}});
  j["sup_moments"] = sups;
  Json pts = Json::array();
  for (const auto& pr : rep.per_point) pts.push_back(convergence_json(pr));
  j["per_point"] = pts;
  j["profile"] = entropy_profile_json(rep.profile);
  return j;
}

}  // namespace multisum
