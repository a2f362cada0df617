#ifndef HSM_DATASETS_HPP
#define HSM_DATASETS_HPP

#include "hsm/subspace.hpp"
#include "hsm/table.hpp"

namespace hsm {
namespace datasets {

/// Wood pewee song triples: 4x4x4, n = 198, cells (i,i,k) and (i,j,j)
/// structural zeros.
Table wood_pewee();

/// Conditional independence L_{12} + L_{23} on the pewee support.
Subspace pewee_model1();

/// Three-way quasi-independence: main effects only on the pewee support.
Subspace pewee_model2();

/// Women-and-mathematics survey: 2^6, n = 1190.  Factor order:
/// 1 attendance, 2 sex, 3 school, 4 agree, 5 preference, 6 plans.
Table wam();

/// Decomposable L_{1235} + L_{2345} + L_{3456}.
Subspace wam_model1();

/// Split model L_{1235} + L_{25}^{j3=1} + L_{45}^{j3=1} + L_{245}^{j3=2} + L_{3456}.
Subspace wam_model2();

}  // namespace datasets
}  // namespace hsm

#endif
