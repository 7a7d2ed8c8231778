#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cpdp {

// Inverse standard normal CDF (Acklam's rational approximation, |err| < 1e-9).
double probit(double p);

// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

// Chi-square quantile for probability p and (possibly fractional) df.
double chi2_quantile(double p, double df);

double mean(std::span<const double> xs);
double variance(std::span<const double> xs);  // sample variance, n-1

// Solves A x = b for symmetric positive definite A (row-major n x n) via
// Cholesky. Adds a small diagonal jitter and retries if the factorization
// breaks down. Returns false only if it fails even with jitter.
bool cholesky_solve(std::vector<double> a, std::vector<double> b, std::size_t n,
                    std::vector<double>& x);

// Median of an unsorted list (copies; average of the middle pair for even n).
double median(std::vector<double> xs);

}  // namespace cpdp
