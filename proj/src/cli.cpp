#include "multisum/cli.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "multisum/digest.hpp"
#include "multisum/errors.hpp"
#include "multisum/simulate.hpp"

namespace multisum {

namespace {

// Writes files named <role>-<content digest>.<ext> and a manifest.json.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  void text(const std::string& role, const std::string& ext, const std::string& content) {
    std::string name = role + "-" + digest_of(content) + "." + ext;
    std::ofstream os(dir_ / name, std::ios::binary);
    os << content;
    if (!os) throw std::runtime_error("cannot write " + (dir_ / name).string());
    files_[role] = name;
  }

  void json(const std::string& role, const Json& j) { text(role, "json", j.dump(2) + "\n"); }

  void binary(const std::string& role, const EmpiricalDist& dist) {
    auto tmp = dir_ / (".tmp-" + role);
    write_binary(dist, tmp);
    std::ifstream in(tmp, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    in.close();
    std::string name = role + "-" + digest_of(ss.str()) + ".bin";
    std::filesystem::rename(tmp, dir_ / name);
    files_[role] = name;
  }

  const std::map<std::string, std::string>& files() const { return files_; }

  void finish(const std::string& command, const std::string& config_digest) {
    Json m;
    m["command"] = command;
    m["config_digest"] = config_digest;
    Json f = Json::object();
    for (const auto& [role, name] : files_) f[role] = name;
    m["files"] = f;
    std::ofstream os(dir_ / "manifest.json", std::ios::binary);
    os << m.dump(2) << "\n";
    files_["manifest"] = "manifest.json";
  }

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> files_;
};

std::string gnuplot_script(const std::string& title, const std::string& csv, int xcol, int ycol,
                           bool logscale) {
  std::string s = "set datafile separator ','\nset key autotitle columnhead\n";
  s += "set title '" + title + "'\n";
  if (logscale) s += "set logscale xy\n";
  s += "plot '" + csv + "' using " + std::to_string(xcol) + ":" + std::to_string(ycol) +
       " with linespoints\n";
  return s;
}

struct Context {
  const Json& cfg;
  std::filesystem::path base;
  const CliOptions& opts;
  std::uint64_t seed = 0;
  OutputSet out;
};

void check_top_level(const Json& cfg) {
  require_keys(cfg, "config", {"seed"},
               {"description", "kernel", "tabulated_kernel", "parametric_kernel", "index_sets",
                "index_family", "p_grid", "N", "N_limit", "bound", "simulate", "verify", "psi"});
  const Json& seed = cfg.at("seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0))
    throw ConfigError("config.seed: expected an unsigned 64-bit integer");
}

std::uint64_t get_count(const Json& cfg, const char* key, std::uint64_t fallback) {
  if (!cfg.contains(key)) return fallback;
  const Json& v = cfg.at(key);
  bool ok = v.is_number_unsigned() ? v.get<std::uint64_t>() >= 1
                                   : v.is_number_integer() && v.get<std::int64_t>() >= 1;
  if (!ok)
    throw ConfigError(std::string("config.") + key + ": expected a positive integer");
  return cfg.at(key).get<std::uint64_t>();
}

DegenerateKernel need_kernel(const Json& cfg) {
  if (!cfg.contains("kernel")) throw ConfigError("config: missing key 'kernel'");
  return parse_kernel(cfg.at("kernel"), "config.kernel");
}

std::vector<IndexSet> need_family(const Json& cfg) {
  if (cfg.contains("index_family")) return parse_family(cfg.at("index_family"), "config.index_family");
  if (cfg.contains("index_sets")) return parse_family(cfg.at("index_sets"), "config.index_sets");
  throw ConfigError("config: need 'index_sets' or 'index_family'");
}

std::vector<double> need_p_grid(const Json& cfg, double min_p) {
  auto p = get_numbers(cfg, "p_grid", "config");
  if (p.empty()) throw ConfigError("config.p_grid: empty");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= min_p))
      throw ConfigError("config.p_grid: values must be >= " + fmt(min_p));
    if (i && !(p[i] > p[i - 1])) throw ConfigError("config.p_grid: must be strictly ascending");
  }
  return p;
}

bool any_nonfinite(const Json& j) {
  if (j.is_string()) {
    auto s = j.get<std::string>();
    return s == "inf" || s == "-inf" || s == "nan";
  }
  if (j.is_structured())
    for (const auto& x : j)
      if (any_nonfinite(x)) return true;
  return false;
}

// ---------------------------------------------------------------- bound

int cmd_bound(Context& c) {
  const Json& cfg = c.cfg;
  Json b = cfg.contains("bound") ? cfg.at("bound") : Json::object();
  require_keys(b, "config.bound", {}, {"routes", "l_sizes", "m_max"});
  auto p_grid = need_p_grid(cfg, 2.0);
  std::vector<int> l_sizes = b.contains("l_sizes") ? get_ints(b, "l_sizes", "config.bound")
                                                   : std::vector<int>{1};
  for (int l : l_sizes)
    if (l < 1) throw ConfigError("config.bound.l_sizes: entries must be >= 1");
  int m_max = b.contains("m_max") ? static_cast<int>(get_number(b, "m_max", "config.bound")) : 8;
  if (m_max < 1) throw ConfigError("config.bound.m_max: must be >= 1");

  std::vector<std::string> routes;
  const bool tabulated = cfg.contains("tabulated_kernel");
  if (b.contains("routes")) {
    for (const auto& r : b.at("routes")) {
      if (!r.is_string()) throw ConfigError("config.bound.routes: expected strings");
      routes.push_back(r.get<std::string>());
    }
  }

  Json rows = Json::array();
  std::string csv = "p,route,M*,value,l_size\n";
  auto emit = [&](double p, const std::string& route, std::optional<int> m, double v,
                  std::uint64_t l, bool surrogate) {
    csv += fmt(p) + "," + route + "," + (m ? std::to_string(*m) : std::string("-")) + "," + fmt(v) +
           "," + std::to_string(l) + "\n";
    Json row{{"p", p}, {"route", route}, {"M_star", m ? Json(*m) : Json(nullptr)},
             {"value", num(v)}, {"l_size", l}, {"surrogate", surrogate}};
    rows.push_back(row);
  };

  std::string digest;
  if (tabulated) {
    TabulatedKernel tk = parse_tabulated_kernel(cfg.at("tabulated_kernel"), "config.tabulated_kernel", c.base);
    digest = tk.digest();
    if (routes.empty()) routes = {"trivial", "theorem_W"};
    TabulatedApproximable ak(tk);
    for (double p : p_grid) {
      for (const auto& route : routes) {
        if (route == "trivial") {
          double s = 0;
          const auto& x = tk.x();
          const auto& y = tk.y();
          for (int i = 0; i < x.size(); ++i)
            for (int j = 0; j < y.size(); ++j)
              s += x.weights[i] * y.weights[j] * std::pow(std::fabs(tk.values()(i, j)), p);
          double fm = std::pow(s, 1.0 / p);
          for (int l : l_sizes) emit(p, route, std::nullopt, trivial_bound(fm, p, l), l, false);
        } else if (route == "theorem_W") {
          for (int l : l_sizes) {
            auto r = theorem_w_bound(ak, p, l, m_max);
            emit(p, route, r.m_star, r.value, l, r.surrogate);
          }
        } else {
          throw ConfigError("config.bound.routes: route '" + route +
                            "' needs a degenerate kernel, not a tabulated one");
        }
      }
    }
  } else {
    DegenerateKernel k = need_kernel(cfg);
    digest = k.digest();
    const bool rank_one = k.terms().size() == 1;
    if (routes.empty()) {
      routes = {"trivial"};
      if (rank_one) routes.push_back("klesov_product");
      routes.push_back("dp_quasinorm");
      routes.push_back("theorem_W");
    }
    MomentCurve fm = kernel_moment_curve(k, p_grid);
    TruncatedDegenerate ak(k);
    const int d = k.dimension();
    for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
      double p = p_grid[pi];
      for (const auto& route : routes) {
        if (route == "trivial") {
          for (int l : l_sizes) emit(p, route, std::nullopt, trivial_bound(fm.values()[pi], p, l), l, false);
        } else if (route == "klesov_product") {
          if (!rank_one)
            throw ConfigError("config.bound.routes: klesov_product needs a rank-one kernel");
          const auto& t = k.terms().front();
          std::vector<double> moments;
          for (int s = 0; s < d; ++s) moments.push_back(factor_moment(k.factors()[s], t.k[s], k.axes()[s], p));
          emit(p, route, std::nullopt, std::fabs(t.w) * klesov_bound(moments, p), 1, false);
        } else if (route == "dp_quasinorm") {
          emit(p, route, std::nullopt, std::pow(rosenthal_K(p), d) * dp_quasinorm(k, p), 1, false);
        } else if (route == "theorem_W") {
          for (int l : l_sizes) {
            auto r = theorem_w_bound(ak, p, l, m_max);
            emit(p, route, r.m_star, r.value, l, r.surrogate);
          }
        } else {
          throw ConfigError("config.bound.routes: unknown route '" + route + "'");
        }
      }
    }
  }
  Json rep{{"command", "bound"}, {"kernel_digest", digest}, {"rows", rows}};
  c.out.text("bound_table", "csv", csv);
  c.out.json("bound_report", rep);
  c.out.text("plot", "gp", gnuplot_script("bounds", c.out.files().at("bound_table"), 1, 4, true));
  return any_nonfinite(rows) ? kExitDivergence : kExitOk;
}

// ---------------------------------------------------------------- simulate

std::vector<double> quantile_probs(const Json& s) {
  if (s.contains("quantiles")) return get_numbers(s, "quantiles", "config.simulate");
  return {0.001, 0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99, 0.999};
}

int cmd_simulate(Context& c) {
  const Json& cfg = c.cfg;
  Json s = cfg.contains("simulate") ? cfg.at("simulate") : Json::object();
  require_keys(s, "config.simulate", {}, {"quantiles", "limit"});
  const std::uint64_t n = get_count(cfg, "N", 0);
  if (n == 0) throw ConfigError("config: missing key 'N'");
  auto family = need_family(cfg);
  auto probs = quantile_probs(s);
  for (double q : probs)
    if (!(q >= 0 && q <= 1)) throw ConfigError("config.simulate.quantiles: must lie in [0, 1]");
  RngSpec rng{c.seed};
  Json sets = Json::array();

  if (cfg.contains("parametric_kernel")) {
    ParametricKernel pk = parse_parametric_kernel(cfg.at("parametric_kernel"), "config.parametric_kernel", c.base);
    for (std::size_t i = 0; i < family.size(); ++i) {
      FieldSample fs = simulate_Q_L(pk, family[i], pk.axes(), n, rng.derive(100 + i), c.opts.workers);
      std::string tag = "L" + std::to_string(i + 1);
      EmpiricalDist sup = fs.sup_dist();
      c.out.binary("sup_" + tag, sup);
      c.out.text("sup_quantiles_" + tag, "csv", quantiles_csv(sup, probs));
      Json per_v = Json::array();
      for (std::size_t v = 0; v < pk.size(); ++v) {
        auto var = empirical_variance(std::span<const double>(fs.paths[v]));
        double sigma2 = pk.slice(v).sum_sq_weights();
        per_v.push_back({{"v", v}, {"variance", estimate_json(var)}, {"sigma2", sigma2},
                         {"var_ratio", num(var.value / sigma2)}});
      }
      sets.push_back({{"index_set", family[i].kind_name()},
                      {"cardinality", family[i].cardinality()},
                      {"sup_digest", sup.digest()},
                      {"sup_mean", num(sup.mean())},
                      {"per_v", per_v}});
    }
  } else {
    DegenerateKernel k = need_kernel(cfg);
    const double sigma2 = k.sum_sq_weights();
    for (std::size_t i = 0; i < family.size(); ++i) {
      EmpiricalDist dist = simulate_S_L(k, family[i], n, rng.derive(100 + i), c.opts.workers);
      std::string tag = "L" + std::to_string(i + 1);
      c.out.binary("samples_" + tag, dist);
      c.out.text("quantiles_" + tag, "csv", quantiles_csv(dist, probs));
      auto var = empirical_variance(dist);
      sets.push_back({{"index_set", family[i].kind_name()},
                      {"cardinality", family[i].cardinality()},
                      {"digest", dist.digest()},
                      {"mean", num(dist.mean())},
                      {"variance", estimate_json(var)},
                      {"sigma2", sigma2},
                      {"var_ratio", num(sigma2 > 0 ? var.value / sigma2 : std::nan(""))}});
    }
    if (s.contains("limit") && s.at("limit").is_boolean() && s.at("limit").get<bool>()) {
      EmpiricalDist lim = sample_S_infty(k.terms(), k.dimension(), n, rng.derive(1), c.opts.workers);
      c.out.binary("limit", lim);
      c.out.text("limit_quantiles", "csv", quantiles_csv(lim, probs));
    }
  }
  c.out.json("summary", Json{{"command", "simulate"}, {"N", n}, {"seed", c.seed}, {"sets", sets}});
  if (c.out.files().count("quantiles_L1"))
    c.out.text("plot", "gp", gnuplot_script("quantiles", c.out.files().at("quantiles_L1"), 1, 2, false));
  return kExitOk;
}

// ---------------------------------------------------------------- verify

VerifyOptions verify_options(const Context& c, const Json& v) {
  VerifyOptions o;
  o.n = get_count(c.cfg, "N", 20000);
  o.n_limit = get_count(c.cfg, "N_limit", 100000);
  o.ks_threshold = get_number_or(v, "ks_threshold", 0.05, "config.verify");
  o.kappa_threshold = get_number_or(v, "kappa_threshold", 0.1, "config.verify");
  o.workers = c.opts.workers;
  return o;
}

int cmd_verify(Context& c) {
  const Json& cfg = c.cfg;
  Json v = cfg.contains("verify") ? cfg.at("verify") : Json::object();
  require_keys(v, "config.verify", {},
               {"which", "sizes", "ks_threshold", "kappa_threshold", "shape_fit", "tail_p_grid",
                "log_weibull_beta", "gls_norm", "level", "budget", "eps_grid", "family_name"});
  std::string which = c.opts.which;
  if (which.empty() && v.contains("which") && v.at("which").is_string())
    which = v.at("which").get<std::string>();
  if (which.empty()) throw ConfigError("verify: no check selected (use --which or verify.which)");
  VerifyOptions vo = verify_options(c, v);
  RngSpec rng{c.seed};
  Json rep;
  int code = kExitOk;

  if (which == "nclt") {
    DegenerateKernel k = need_kernel(cfg);
    ConvergenceReport r;
    if (v.contains("sizes")) {
      r = verify_rect_nclt(k, k.axes(), get_ints(v, "sizes", "config.verify"), rng, vo);
    } else {
      std::string name = "custom";
      if (v.contains("family_name") && v.at("family_name").is_string())
        name = v.at("family_name").get<std::string>();
      else if (cfg.contains("index_family") && cfg.at("index_family").contains("generator"))
        name = cfg.at("index_family").at("generator").get<std::string>();
      r = verify_irregular_nclt(k, k.axes(), need_family(cfg), rng, vo, name);
    }
    rep = convergence_json(r);
    c.out.text("stages", "csv", convergence_csv(r));
    c.out.text("plot", "gp", gnuplot_script("KS by stage", c.out.files().at("stages"), 2, 5, true));
    if (r.verdict == Verdict::hypotheses_not_met) code = kExitHypotheses;
  } else if (which == "sandwich") {
    DegenerateKernel k = need_kernel(cfg);
    std::optional<ShapeFitRequest> shape;
    if (v.contains("shape_fit")) {
      const Json& sf = v.at("shape_fit");
      require_keys(sf, "config.verify.shape_fit", {}, {"p_lo", "p_hi", "tolerance"});
      ShapeFitRequest req;
      req.p_lo = get_number_or(sf, "p_lo", req.p_lo, "config.verify.shape_fit");
      req.p_hi = get_number_or(sf, "p_hi", req.p_hi, "config.verify.shape_fit");
      req.tolerance = get_number_or(sf, "tolerance", req.tolerance, "config.verify.shape_fit");
      shape = req;
    }
    auto r = verify_moment_sandwich(k, k.axes(), need_family(cfg), need_p_grid(cfg, 2.0), rng, vo, shape);
    rep = sandwich_json(r);
    std::string csv = "p,lower,empirical,se,upper\n";
    for (const auto& row : r.rows)
      csv += fmt(row.p) + "," + fmt(row.lower) + "," + fmt(row.empirical.value) + "," +
             fmt(row.empirical.standard_error) + "," + fmt(row.upper) + "\n";
    c.out.text("sandwich", "csv", csv);
    c.out.text("plot", "gp", gnuplot_script("moment sandwich", c.out.files().at("sandwich"), 1, 3, true));
  } else if (which == "tail") {
    DegenerateKernel k = need_kernel(cfg);
    std::vector<double> pg;
    if (v.contains("tail_p_grid")) {
      pg = get_numbers(v, "tail_p_grid", "config.verify");
    } else {
      for (int i = 0; i <= 24; ++i) pg.push_back(2.0 * std::pow(64.0, i / 24.0));
    }
    PsiFunction psi = kernel_composite_psi(k, pg);
    double norm = get_number_or(v, "gls_norm", k.l1_weights(), "config.verify");
    std::optional<double> beta;
    if (v.contains("log_weibull_beta")) {
      beta = get_number(v, "log_weibull_beta", "config.verify");
    } else {
      bool all = true;
      for (const auto& a : k.axes()) all = all && a.kind() == AxisKind::log_weibull;
      if (all) beta = k.axes().front().beta();
    }
    auto r = verify_tail_domination(k, k.axes(), need_family(cfg), psi, norm, rng, vo, beta);
    rep = tail_json(r);
    rep["psi_composite"] = psi_to_json(psi);
  } else if (which == "parametric") {
    if (!cfg.contains("parametric_kernel")) throw ConfigError("config: missing key 'parametric_kernel'");
    ParametricKernel pk = parse_parametric_kernel(cfg.at("parametric_kernel"), "config.parametric_kernel", c.base);
    ParametricLevel level = ParametricLevel::power(2.0);
    if (v.contains("level")) {
      const Json& l = v.at("level");
      require_keys(l, "config.verify.level", {"kind"}, {"p", "tau"});
      std::string kind = l.at("kind").get<std::string>();
      if (kind == "power") {
        level = ParametricLevel::power(get_number_or(l, "p", 2.0, "config.verify.level"));
      } else if (kind == "exponential") {
        if (!l.contains("tau")) throw ConfigError("config.verify.level: exponential level needs 'tau'");
        level = ParametricLevel::exponential(parse_psi(l.at("tau"), "config.verify.level.tau"));
      } else {
        throw ConfigError("config.verify.level.kind: expected 'power' or 'exponential'");
      }
    }
    ParametricOptions po;
    po.verify = vo;
    po.budget = get_number_or(v, "budget", 1.0, "config.verify");
    if (v.contains("eps_grid")) po.eps_grid = get_numbers(v, "eps_grid", "config.verify");
    auto r = check_parametric_nclt(pk, level, pk.axes(), need_family(cfg), rng, po);
    rep = parametric_json(r);
    c.out.text("entropy_profile", "csv", entropy_profile_csv(r.profile));
    c.out.text("plot", "gp",
               gnuplot_script("covering numbers", c.out.files().at("entropy_profile"), 1, 2, true));
    if (r.verdict == Verdict::hypotheses_not_met) code = kExitHypotheses;
    if (r.integral.divergent && code == kExitOk) code = kExitDivergence;
  } else {
    throw ConfigError("verify: unknown check '" + which + "' (nclt | sandwich | tail | parametric)");
  }
  Json out{{"command", "verify"}, {"which", which}, {"seed", c.seed}, {"N", vo.n},
           {"N_limit", vo.n_limit}, {"report", rep}};
  c.out.json("verdict", out);
  return code;
}

// ---------------------------------------------------------------- psi

int cmd_psi(Context& c) {
  const Json& cfg = c.cfg;
  if (!cfg.contains("psi")) throw ConfigError("config: missing key 'psi'");
  const Json& ps = cfg.at("psi");
  require_keys(ps, "config.psi", {"functions"}, {"p_grid", "x_grid", "y_grid", "gls_norm"});
  std::vector<PsiFunction> fns;
  if (!ps.at("functions").is_array() || ps.at("functions").empty())
    throw ConfigError("config.psi.functions: expected a nonempty array");
  for (std::size_t i = 0; i < ps.at("functions").size(); ++i)
    fns.push_back(parse_psi(ps.at("functions")[i], "config.psi.functions[" + std::to_string(i) + "]"));
  auto p_grid = ps.contains("p_grid") ? get_numbers(ps, "p_grid", "config.psi")
                                      : std::vector<double>{1, 2, 4, 8, 16};
  auto x_grid = ps.contains("x_grid") ? get_numbers(ps, "x_grid", "config.psi")
                                      : std::vector<double>{1, 1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5};
  auto y_grid = ps.contains("y_grid") ? get_numbers(ps, "y_grid", "config.psi")
                                      : std::vector<double>{1, 2, 3, 5, 10};
  double norm = get_number_or(ps, "gls_norm", 1.0, "config.psi");
  if (!(norm > 0)) throw ConfigError("config.psi.gls_norm: must be positive");
  for (double y : y_grid)
    if (y < 0) throw ConfigError("config.psi.y_grid: tail levels must be >= 0");

  std::string table = "function,p,psi,v\n", conj = "function,x,vstar,argmax\n",
              tail = "function,y,bound\n";
  bool divergent = false;
  Json funcs = Json::array();
  for (std::size_t i = 0; i < fns.size(); ++i) {
    const auto& f = fns[i];
    std::string label = std::to_string(i) + ":" + f.family_name();
    for (double p : p_grid) {
      if (!f.in_support(p)) continue;
      double lv = f.log_value(p);
      table += label + "," + fmt(p) + "," + fmt(std::exp(lv)) + "," + fmt(p * lv) + "\n";
    }
    for (double x : x_grid) {
      auto r = young_fenchel_detail(f, x);
      divergent = divergent || r.diverged || !std::isfinite(r.value);
      conj += label + "," + fmt(x) + "," + fmt(r.value) + "," + fmt(r.argmax) + "\n";
    }
    TailBound tb{norm, f};
    for (double y : y_grid) tail += label + "," + fmt(y) + "," + fmt(tail_bound_eval(tb, y)) + "\n";
    Json fj = psi_to_json(f);
    fj["support"] = f.support_string();
    funcs.push_back(fj);
  }
  c.out.text("psi_table", "csv", table);
  c.out.text("conjugate", "csv", conj);
  c.out.text("tail_bound", "csv", tail);
  c.out.json("psi", Json{{"command", "psi"}, {"gls_norm", norm}, {"functions", funcs}});
  c.out.text("plot", "gp", gnuplot_script("Young-Fenchel conjugate", c.out.files().at("conjugate"), 2, 3, false));
  return divergent ? kExitDivergence : kExitOk;
}

Json error_json(const std::string& kind, const std::string& message) {
  return Json{{"error", {{"kind", kind}, {"message", message}}}};
}

}  // namespace

CommandResult run_command_json(const std::string& subcommand, const Json& config,
                               const std::filesystem::path& base_dir, const CliOptions& opts) {
  CommandResult res;
  try {
    check_top_level(config);
    Json cfg = config;
    if (opts.seed_override) cfg["seed"] = *opts.seed_override;
    if (opts.workers < 1) throw ConfigError("--workers must be >= 1");
    Context c{cfg, base_dir, opts, cfg.at("seed").get<std::uint64_t>(), OutputSet(opts.out)};
    if (subcommand == "bound")
      res.exit_code = cmd_bound(c);
    else if (subcommand == "simulate")
      res.exit_code = cmd_simulate(c);
    else if (subcommand == "verify")
      res.exit_code = cmd_verify(c);
    else if (subcommand == "psi")
      res.exit_code = cmd_psi(c);
    else
      throw ConfigError("unknown subcommand '" + subcommand + "'");
    c.out.finish(subcommand, digest_of(cfg.dump()));
    res.files = c.out.files();
  } catch (const ConfigError& e) {
    res.exit_code = kExitConfig;
    res.error_json = error_json("config_error", e.what()).dump();
  } catch (const ArgumentError& e) {
    res.exit_code = kExitConfig;
    res.error_json = error_json("argument_error", e.what()).dump();
  } catch (const DomainError& e) {
    res.exit_code = kExitConfig;
    res.error_json = error_json("domain_error", e.what()).dump();
  } catch (const PreconditionError& e) {
    res.exit_code = kExitConfig;
    res.error_json = error_json("precondition_error", e.what()).dump();
  } catch (const nlohmann::json::exception& e) {
    res.exit_code = kExitConfig;
    res.error_json = error_json("config_error", e.what()).dump();
  } catch (const std::exception& e) {
    res.exit_code = kExitInternal;
    res.error_json = error_json("internal_error", e.what()).dump();
  }
  return res;
}

CommandResult run_command(const std::string& subcommand, const CliOptions& opts) {
  try {
    Json cfg = read_json_file(opts.config);
    return run_command_json(subcommand, cfg, opts.config.parent_path(), opts);
  } catch (const ConfigError& e) {
    CommandResult res;
    res.exit_code = kExitConfig;
    res.error_json = error_json("config_error", e.what()).dump();
    return res;
  }
}

}  // namespace multisum
