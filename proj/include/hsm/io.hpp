#ifndef HSM_IO_HPP
#define HSM_IO_HPP

#include "hsm/exact_test.hpp"
#include "hsm/fit.hpp"
#include "hsm/subspace.hpp"
#include "hsm/table.hpp"

#include <string>
#include <vector>

namespace hsm::io {

/// Reads a table from a .json file ({"shape":[...], "counts":[...row-major...],
/// "structural_zeros":[[i,j,k],...]}) or a .csv file (one row per cell,
/// columns i_1,...,i_m,count; unlisted cells are 0; count "NA" marks a
/// structural zero; levels inferred as the per-column maxima, at least 2).
/// Throws std::runtime_error with file/line context on parse failure.
Table load_table(const std::string& path);

/// Writes the JSON table format.
void save_table(const Table& t, const std::string& path);

/// Reads a model spec: {"shape":[...], "terms":[...]} where each term is one of
///   {"kind":"interaction","D":[...]}
///   {"kind":"facets","facets":[[...],[...]]}            (one interaction per facet)
///   {"kind":"uniform_assoc","D":[a,b]}
///   {"kind":"change_point","D":[a,b],"cut":[ci,cj]}
///   {"kind":"diag","D":[a,b]}
///   {"kind":"csi","D":[...],"B":[...],"level":[...]}
///   {"kind":"covariate","D":[...],"phi":[...]}          (row-major over the D-box)
/// The constant and all main effects are implicit.  Alternatively the spec may
/// hold "split": {"root":[[...]...], "Z":[{"C":[...],"Z":[...]}],
/// "slices":[{"C":[...],"level":[...],"facets":[[...]...]}]} for split models.
/// The structural-zero mask is taken from the table the model is paired with.
Subspace load_model(const std::string& path, std::vector<char> mask = {});

/// Model spec shape without building the subspace (for early validation).
Shape model_shape(const std::string& path);

/// {"fitted_counts":[...row-major, full precision...], "G2":..., "df":...,
///  "loglik":..., "iterations":..., "converged":..., "boundary":...,
///  "max_residual":...}
void save_fit(const FitResult& r, double n, const std::string& path);

/// {"observed_statistic":..., "p_hat":..., "ci_halfwidth":...,
///  "acceptance_rate":..., "num_samples":...}
void save_test(const TestResult& r, const std::string& path);

/// bin_center,empirical_density,chisq_density rows with a header line.
void save_histogram(const std::vector<HistogramRow>& rows, const std::string& path);

}  // namespace hsm::io

#endif
