#pragma once

#include <span>
#include <string>
#include <vector>

namespace halearn {

/// Multivariate polynomial relation from the input channels to every output
/// channel. The monomial basis is shared across outputs and ordered by total
/// degree, then lexicographically (first variable major), so serialized
/// coefficient lists are stable.
struct PolynomialFlow {
    int degree = 0;
    std::vector<std::string> inputs;                // variable names, x0 = inputs[0]
    std::vector<std::vector<int>> exponents;        // basis, one tuple per monomial
    struct Output {
        std::string name;
        std::vector<double> coef;                   // aligned with `exponents`
        double rmse = 0.0;
    };
    std::vector<Output> outputs;
};

/// All exponent tuples with total degree <= degree over nvars variables,
/// graded-lexicographic order (constant term first).
std::vector<std::vector<int>> monomial_basis(std::size_t nvars, int degree);

/// Ridge-regularized least squares of each target on the monomial basis of the
/// rows of X (samples x variables). The intercept is never penalized. With
/// ridge == 0 a rank-revealing QR is used and rank deficiency is an error.
PolynomialFlow fit_polynomial(const std::vector<std::vector<double>>& X,
                              const std::vector<std::vector<double>>& Y,
                              const std::vector<std::string>& input_names,
                              const std::vector<std::string>& output_names,
                              int degree, double ridge);

/// Exact symbolic partial derivatives, one flow per input variable.
std::vector<PolynomialFlow> partial_derivatives(const PolynomialFlow& flow);

std::vector<double> evaluate_flow(const PolynomialFlow& flow, std::span<const double> x);

/// Human-readable form of one output, e.g. "y = 2 + 3*x - x^2".
std::string flow_to_string(const PolynomialFlow& flow, std::size_t output);

} // namespace halearn
