#include "halearn/flows.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "halearn/errors.hpp"

namespace halearn {

namespace {

void gen_exponents(std::size_t nvars, int total, std::vector<int>& cur,
                   std::vector<std::vector<int>>& out) {
    if (cur.size() == nvars) {
        if (total == 0) out.push_back(cur);
        return;
    }
    // First variable takes the largest exponent first: lexicographic descending
    // within a degree block.
    for (int e = total; e >= 0; --e) {
        cur.push_back(e);
        gen_exponents(nvars, total - e, cur, out);
        cur.pop_back();
    }
}

double monomial_value(const std::vector<int>& exp, std::span<const double> x) {
    double v = 1.0;
    for (std::size_t k = 0; k < exp.size(); ++k)
        for (int e = 0; e < exp[k]; ++e) v *= x[k];
    return v;
}

} // namespace

std::vector<std::vector<int>> monomial_basis(std::size_t nvars, int degree) {
    std::vector<std::vector<int>> basis;
    std::vector<int> cur;
    for (int d = 0; d <= degree; ++d) gen_exponents(nvars, d, cur, basis);
    return basis;
}

PolynomialFlow fit_polynomial(const std::vector<std::vector<double>>& X,
                              const std::vector<std::vector<double>>& Y,
                              const std::vector<std::string>& input_names,
                              const std::vector<std::string>& output_names,
                              int degree, double ridge) {
    if (degree < 1) throw Error(ErrorCode::InvalidArgument, "degree must be >= 1");
    if (ridge < 0.0) throw Error(ErrorCode::InvalidArgument, "ridge must be >= 0");
    const std::size_t n = X.size();
    const std::size_t nvars = input_names.size();
    if (n == 0) throw Error(ErrorCode::Underdetermined, "no samples");
    if (Y.size() != n) throw Error(ErrorCode::DimensionMismatch, "X/Y row counts differ");

    PolynomialFlow flow;
    flow.degree = degree;
    flow.inputs = input_names;
    flow.exponents = monomial_basis(nvars, degree);
    const std::size_t m = flow.exponents.size();
    if (n < m && ridge == 0.0)
        throw Error(ErrorCode::Underdetermined,
                    std::to_string(n) + " samples for " + std::to_string(m) + " monomials");

    Eigen::MatrixXd A(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        if (X[i].size() != nvars)
            throw Error(ErrorCode::DimensionMismatch, "sample arity mismatch");
        for (std::size_t j = 0; j < m; ++j)
            A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                monomial_value(flow.exponents[j], X[i]);
    }

    Eigen::MatrixXd B(n, output_names.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (Y[i].size() != output_names.size())
            throw Error(ErrorCode::DimensionMismatch, "target arity mismatch");
        for (std::size_t j = 0; j < output_names.size(); ++j)
            B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = Y[i][j];
    }

    Eigen::MatrixXd coef;
    if (ridge == 0.0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
        if (qr.rank() < static_cast<Eigen::Index>(m))
            throw Error(ErrorCode::DegenerateDesign,
                        "design matrix rank " + std::to_string(qr.rank()) + " < " +
                            std::to_string(m));
        coef = qr.solve(B);
    } else {
        Eigen::MatrixXd ata = A.transpose() * A;
        for (std::size_t j = 1; j < m; ++j)  // intercept stays unpenalized
            ata(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) += ridge;
        coef = ata.ldlt().solve(A.transpose() * B);
    }

    Eigen::MatrixXd resid = A * coef - B;
    for (std::size_t o = 0; o < output_names.size(); ++o) {
        PolynomialFlow::Output out;
        out.name = output_names[o];
        out.coef.resize(m);
        for (std::size_t j = 0; j < m; ++j)
            out.coef[j] = coef(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(o));
        out.rmse = std::sqrt(resid.col(static_cast<Eigen::Index>(o)).squaredNorm() /
                             static_cast<double>(n));
        flow.outputs.push_back(std::move(out));
    }
    return flow;
}

std::vector<PolynomialFlow> partial_derivatives(const PolynomialFlow& flow) {
    std::vector<PolynomialFlow> result;
    const std::size_t nvars = flow.inputs.size();
    for (std::size_t k = 0; k < nvars; ++k) {
        PolynomialFlow d;
        d.degree = std::max(0, flow.degree - 1);
        d.inputs = flow.inputs;
        d.exponents = monomial_basis(nvars, d.degree);
        for (const auto& src : flow.outputs) {
            PolynomialFlow::Output out;
            out.name = src.name;
            out.coef.assign(d.exponents.size(), 0.0);
            for (std::size_t j = 0; j < flow.exponents.size(); ++j) {
                const auto& e = flow.exponents[j];
                if (e[k] == 0) continue;
                std::vector<int> de = e;
                de[k] -= 1;
                auto it = std::find(d.exponents.begin(), d.exponents.end(), de);
                out.coef[static_cast<std::size_t>(it - d.exponents.begin())] +=
                    src.coef[j] * static_cast<double>(e[k]);
            }
            d.outputs.push_back(std::move(out));
        }
        result.push_back(std::move(d));
    }
    return result;
}

std::vector<double> evaluate_flow(const PolynomialFlow& flow, std::span<const double> x) {
    if (x.size() != flow.inputs.size())
        throw Error(ErrorCode::DimensionMismatch,
                    "expected " + std::to_string(flow.inputs.size()) + " inputs");
    std::vector<double> y(flow.outputs.size(), 0.0);
    for (std::size_t j = 0; j < flow.exponents.size(); ++j) {
        double mono = monomial_value(flow.exponents[j], x);
        for (std::size_t o = 0; o < flow.outputs.size(); ++o)
            y[o] += flow.outputs[o].coef[j] * mono;
    }
    return y;
}

std::string flow_to_string(const PolynomialFlow& flow, std::size_t output) {
    const auto& out = flow.outputs.at(output);
    std::string s = out.name + " =";
    bool first = true;
    for (std::size_t j = 0; j < flow.exponents.size(); ++j) {
        double c = out.coef[j];
        if (std::abs(c) < 1e-12 && !(j == 0 && first)) continue;
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%.4g", std::abs(c));
        if (first) {
            s += c < 0 ? " -" : " ";
            first = false;
        } else {
            s += c < 0 ? " - " : " + ";
        }
        std::string term = buf;
        std::string vars;
        for (std::size_t k = 0; k < flow.exponents[j].size(); ++k) {
            int e = flow.exponents[j][k];
            if (e == 0) continue;
            if (!vars.empty()) vars += "*";
            vars += flow.inputs[k];
            if (e > 1) vars += "^" + std::to_string(e);
        }
        if (!vars.empty()) {
            if (term == "1") term = vars;
            else term += "*" + vars;
        }
        s += term;
    }
    if (first) s += " 0";
    return s;
}

} // namespace halearn
