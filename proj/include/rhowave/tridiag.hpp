#pragma once

#include <cstdint>
#include <vector>

namespace rhowave::tridiag {

// Real symmetric tridiagonal matrix: diagonal d[0..n-1], off-diagonal e[0..n-2].

// Number of eigenvalues strictly below x (signs of the shifted LDL^T pivots).
int count_below(const std::vector<double>& d, const std::vector<double>& e, double x);

// The count smallest eigenvalues, ascending, each bisected until the bracket
// width drops below rel_tol * max(1, |endpoint|).
std::vector<double> smallest_eigenvalues(const std::vector<double>& d,
                                         const std::vector<double>& e, int count,
                                         double rel_tol = 1e-13);

// Inverse iteration at the (already converged) eigenvalue lam. Returns a unit
// vector in the plain Euclidean norm with a deterministic sign convention.
std::vector<double> eigenvector(const std::vector<double>& d, const std::vector<double>& e,
                                double lam, std::uint64_t seed);

}  // namespace rhowave::tridiag
