#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace netinfer {

// Inversions guarded by this condition-number limit throw ConditioningError.
inline constexpr double kConditionLimit = 1e12;

// Relative truncation tolerance for matrix geometric series.
inline constexpr double kSeriesTol = 1e-12;

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m,
                          const std::vector<int>& rows,
                          const std::vector<int>& cols);

// Largest eigenvalue modulus, computed from the full eigendecomposition.
double spectral_radius(const Eigen::MatrixXd& m);

// 2-norm condition number via SVD.
double condition_number(const Eigen::MatrixXd& m);

// SVD-based inverse; throws ConditioningError naming `what` if the condition
// number reaches kConditionLimit.
Eigen::MatrixXd guarded_inverse(const Eigen::MatrixXd& m,
                                const std::string& what);

// Sum of the geometric series  sum_{i>=0} left^i * t0 * right^i, truncated
// once the current term's max-abs entry drops below rel_tol times the running
// sum's max-abs entry. Throws StabilityError if max_iter is exhausted.
Eigen::MatrixXd sum_sandwich_series(const Eigen::MatrixXd& t0,
                                    const Eigen::MatrixXd& left,
                                    const Eigen::MatrixXd& right,
                                    double rel_tol = kSeriesTol,
                                    int max_iter = 200000);

// Binary support of a matrix: entries with |x| > tol map to 1.
Eigen::MatrixXi support_of(const Eigen::MatrixXd& m, double tol = 0.0);

}  // namespace netinfer
