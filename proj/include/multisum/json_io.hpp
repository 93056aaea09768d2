#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include "json.hpp"
#include "multisum/distributions.hpp"
#include "multisum/factors.hpp"
#include "multisum/index_set.hpp"
#include "multisum/kernel.hpp"
#include "multisum/parametric.hpp"
#include "multisum/psi.hpp"
#include "multisum/rosenthal.hpp"
#include "multisum/tabulated.hpp"
#include "multisum/verifier.hpp"

namespace multisum {

using Json = nlohmann::ordered_json;

// Schema helpers; every failure is a ConfigError naming the JSON path.
Json parse_json_text(const std::string& text, const std::string& origin);
Json read_json_file(const std::filesystem::path& path);
void require_keys(const Json& j, const std::string& where,
                  std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional);
double get_number(const Json& j, const char* key, const std::string& where);
double get_number_or(const Json& j, const char* key, double fallback, const std::string& where);
std::vector<double> get_numbers(const Json& j, const char* key, const std::string& where);
std::vector<int> get_ints(const Json& j, const char* key, const std::string& where);

AxisDistribution parse_axis(const Json& j, const std::string& where);
FactorFamily parse_factor(const Json& j, const std::string& where);
// {factors, axes?, terms: [{k, w}], orthonormal}
DegenerateKernel parse_kernel(const Json& j, const std::string& where);
// {V: [[coords] | {coords}], lambda: [{v_index, k, w}], factors, axes?, orthonormal}
// or {builtin: "holder_rotation", n, theta}.
ParametricKernel parse_parametric_kernel(const Json& j, const std::string& where,
                                         const std::filesystem::path& base_dir);
// {builtin: "brownian_min", n, centered?} or {grid_csv, weights_csv, centered?}.
TabulatedKernel parse_tabulated_kernel(const Json& j, const std::string& where,
                                       const std::filesystem::path& base_dir);
// {kind: rect, n: [...]} | {kind: staircase, profile} | {kind: explicit, d, cells}
// | {generator, n, d?}.
IndexSet parse_index_set(const Json& j, const std::string& where);
// {generator, sizes, d?} or a list of index sets.
std::vector<IndexSet> parse_family(const Json& j, const std::string& where);
// {family, params: {...}}
PsiFunction parse_psi(const Json& j, const std::string& where);

// Finite numbers as JSON numbers; infinities and NaN as strings.
Json num(double x);
// %.12g, with "inf" / "-inf" / "nan" markers.
std::string fmt(double x);

Json psi_to_json(const PsiFunction& psi);
Json estimate_json(const Estimate& e);
Json convergence_json(const ConvergenceReport& rep);
std::string convergence_csv(const ConvergenceReport& rep);
Json sandwich_json(const SandwichReport& rep);
Json tail_json(const TailDominationReport& rep);
Json parametric_json(const ParametricReport& rep);
Json entropy_profile_json(const EntropyProfile& profile);
std::string entropy_profile_csv(const EntropyProfile& profile);

}  // namespace multisum
