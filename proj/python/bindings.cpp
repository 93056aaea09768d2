#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "multisum/cli.hpp"
#include "multisum/errors.hpp"
#include "multisum/json_io.hpp"
#include "multisum/parametric.hpp"
#include "multisum/rosenthal.hpp"
#include "multisum/simulate.hpp"
#include "multisum/tabulated.hpp"
#include "multisum/verifier.hpp"

namespace py = pybind11;
using namespace multisum;

namespace {

py::array_t<double> to_numpy(const std::vector<double>& v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

EmpiricalDist from_numpy(py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  return EmpiricalDist(std::vector<double>(a.data(), a.data() + a.size()));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "C++ core of multisum";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<PsiFunction>(m, "PsiFunction")
      .def_static("power_log", &PsiFunction::power_log, py::arg("m"), py::arg("r") = 0.0)
      .def_static("extremal", &PsiFunction::extremal, py::arg("r"))
      .def_static("bounded_support", &PsiFunction::bounded_support, py::arg("b"), py::arg("gamma"),
                  py::arg("r") = 0.0)
      .def_static("exp_power", &PsiFunction::exp_power, py::arg("beta"), py::arg("C"))
      .def_static("product_of", &PsiFunction::product_of)
      .def_static("rosenthal_scaled", &PsiFunction::rosenthal_scaled, py::arg("base"), py::arg("d"))
      .def_static("tabulated", &PsiFunction::tabulated, py::arg("p"), py::arg("values"))
      .def("__call__", &PsiFunction::operator())
      .def("log_value", &PsiFunction::log_value)
      .def("in_support", &PsiFunction::in_support)
      .def_property_readonly("family", &PsiFunction::family_name)
      .def_property_readonly("support_lower", &PsiFunction::support_lower)
      .def_property_readonly("support_upper", &PsiFunction::support_upper)
      .def("__repr__", [](const PsiFunction& p) {
        return "PsiFunction(" + p.family_name() + ", support " + p.support_string() + ")";
      });

  m.def("young_fenchel", [](const PsiFunction& psi, double x) { return young_fenchel(psi, x); });
  m.def("tail_bound", [](const PsiFunction& psi, double gls_norm, double y) {
    return tail_bound_eval(TailBound{gls_norm, psi}, y);
  });
  m.def("compose_psi_product", &compose_psi_product, py::arg("factors"), py::arg("rosenthal_power"));

  m.def("rosenthal_K", &rosenthal_K);
  m.def("trivial_bound", &trivial_bound);
  m.def("klesov_bound", [](const std::vector<double>& moments, double p) {
    return klesov_bound(moments, p);
  });

  py::class_<AxisDistribution>(m, "AxisDistribution")
      .def_static("standard_normal", &AxisDistribution::standard_normal)
      .def_static("rademacher", &AxisDistribution::rademacher)
      .def_static("centered_exponential", &AxisDistribution::centered_exponential)
      .def_static("compensated_poisson", &AxisDistribution::compensated_poisson)
      .def_static("log_weibull", &AxisDistribution::log_weibull)
      .def_static("grid", &AxisDistribution::grid)
      .def_property_readonly("name", &AxisDistribution::name);

  py::class_<FactorFamily>(m, "FactorFamily")
      .def_static("hermite", &FactorFamily::hermite)
      .def_static("rademacher_sign", &FactorFamily::rademacher_sign)
      .def_static("centered_poisson_charlier", &FactorFamily::centered_poisson_charlier)
      .def_static("centered_exponential_poly", &FactorFamily::centered_exponential_poly)
      .def_property_readonly("name", &FactorFamily::name);

  m.def("factor_moment", &factor_moment, py::arg("family"), py::arg("k"), py::arg("axis"), py::arg("p"));

  py::class_<DegenerateKernel>(m, "DegenerateKernel")
      .def(py::init([](std::vector<FactorFamily> factors,
                       std::vector<std::pair<std::vector<int>, double>> terms, bool orthonormal,
                       std::optional<std::vector<AxisDistribution>> axes) {
             std::vector<KernelTerm> t;
             for (auto& [k, w] : terms) t.push_back({k, w});
             if (axes) return DegenerateKernel(factors, *axes, t, orthonormal);
             return DegenerateKernel(factors, t, orthonormal);
           }),
           py::arg("factors"), py::arg("terms"), py::arg("orthonormal") = true,
           py::arg("axes") = py::none())
      .def_property_readonly("dimension", &DegenerateKernel::dimension)
      .def("sum_sq_weights", &DegenerateKernel::sum_sq_weights)
      .def("digest", &DegenerateKernel::digest);
  m.def("dp_quasinorm", &dp_quasinorm);

  py::class_<IndexSet>(m, "IndexSet")
      .def_static("rect", &IndexSet::rect)
      .def_static("staircase", &IndexSet::staircase)
      .def_static("explicit_set", &IndexSet::explicit_set)
      .def_property_readonly("dimension", &IndexSet::dimension)
      .def_property_readonly("cardinality", &IndexSet::cardinality)
      .def("digest", &IndexSet::digest);
  m.def("square_minus_corner", &square_minus_corner);
  m.def("square_plus_cell", &square_plus_cell);
  m.def("lshape_fixed_fraction", &lshape_fixed_fraction);
  m.def("cube", &cube);
  m.def("rect_pair", [](const IndexSet& L) {
    auto r = rect_pair(L);
    py::dict d;
    d["inner_lo"] = r.inner.lo;
    d["inner_hi"] = r.inner.hi;
    d["outer_lo"] = r.outer.lo;
    d["outer_hi"] = r.outer.hi;
    d["kappa_minus"] = r.kappa_minus;
    d["kappa_plus"] = r.kappa_plus;
    d["heuristic"] = r.heuristic;
    return d;
  });

  m.def(
      "simulate_S_L",
      [](const DegenerateKernel& k, const IndexSet& L, std::uint64_t n, std::uint64_t seed,
         unsigned workers) {
        std::vector<double> v;
        {
          py::gil_scoped_release nogil;
          v = simulate_S_L(k, L, n, RngSpec{seed}, workers).values();
        }
        return to_numpy(v);
      },
      py::arg("kernel"), py::arg("L"), py::arg("N"), py::arg("seed"), py::arg("workers") = 1);
  m.def(
      "sample_S_infty",
      [](const DegenerateKernel& k, std::uint64_t n, std::uint64_t seed, unsigned workers) {
        auto d = sample_S_infty(k.terms(), k.dimension(), n, RngSpec{seed}, workers);
        return to_numpy(d.values());
      },
      py::arg("kernel"), py::arg("N"), py::arg("seed"), py::arg("workers") = 1);
  m.def("ks_distance", [](py::array_t<double> a, py::array_t<double> b) {
    return ks_distance(from_numpy(a), from_numpy(b));
  });
  m.def("empirical_moment", [](py::array_t<double> a, double p) {
    auto e = empirical_moment(from_numpy(a), p);
    return std::make_pair(e.value, e.standard_error);
  });

  m.def(
      "verify_rect_nclt",
      [](const DegenerateKernel& k, std::vector<int> sizes, std::uint64_t seed, std::uint64_t n,
         std::uint64_t n_limit, unsigned workers) {
        VerifyOptions o;
        o.n = n;
        o.n_limit = n_limit;
        o.workers = workers;
        return convergence_json(verify_rect_nclt(k, k.axes(), sizes, RngSpec{seed}, o)).dump();
      },
      py::arg("kernel"), py::arg("sizes"), py::arg("seed"), py::arg("N") = 20000,
      py::arg("N_limit") = 100000, py::arg("workers") = 1);

  m.def("brownian_singular_values", [](int n) {
    auto sd = spectral_decompose(TabulatedKernel::brownian_min(n));
    return std::vector<double>(sd.singular_values.data(),
                               sd.singular_values.data() + sd.singular_values.size());
  });

  m.def("greedy_cover", [](py::array_t<double> dist, double eps) {
    auto r = dist.unchecked<2>();
    std::size_t n = r.shape(0);
    return greedy_cover(n, [&](std::size_t i, std::size_t j) { return r(i, j); }, eps);
  });
  m.def("exact_min_cover", [](py::array_t<double> dist, double eps) {
    auto r = dist.unchecked<2>();
    std::size_t n = r.shape(0);
    return exact_min_cover(n, [&](std::size_t i, std::size_t j) { return r(i, j); }, eps);
  });
  m.def("entropy_integral_power", [](std::vector<double> eps, std::vector<double> n, double p) {
    auto r = entropy_integral_power(EntropyProfile::from_counts(eps, n), p);
    return py::make_tuple(r.value, r.tail_exponent, r.divergent);
  });

  m.def(
      "run_command",
      [](const std::string& sub, const std::filesystem::path& config, const std::filesystem::path& out,
         unsigned workers, std::optional<std::uint64_t> seed_override, const std::string& which) {
        CliOptions o;
        o.config = config;
        o.out = out;
        o.workers = workers;
        o.seed_override = seed_override;
        o.which = which;
        CommandResult r;
        {
          py::gil_scoped_release nogil;
          r = run_command(sub, o);
        }
        return py::make_tuple(r.exit_code, r.files, r.error_json);
      },
      py::arg("subcommand"), py::arg("config"), py::arg("out"), py::arg("workers") = 1,
      py::arg("seed_override") = py::none(), py::arg("which") = "");
}
