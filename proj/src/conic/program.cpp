// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The crsma-energy Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "crsma/conic.hpp"

#include <cmath>
#include <stdexcept>

namespace crsma::conic {

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

int ConicProgram::add_variable(std::string name) {
    if (name.empty()) name = "x" + std::to_string(names_.size());
    names_.push_back(std::move(name));
    return static_cast<int>(names_.size()) - 1;
}

int ConicProgram::add_variables(int count, const std::string& prefix) {
    if (count <= 0) throw std::invalid_argument("add_variables: count must be positive");
    const int first = num_variables();
    for (int i = 0; i < count; ++i) add_variable(prefix.empty() ? std::string{} : prefix + std::to_string(i));
    return first;
}

void ConicProgram::check_expr(const AffineExpr& e) const {
    for (const auto& t : e.terms) {
        if (t.var < 0 || t.var >= num_variables())
            throw std::out_of_range("conic program: expression references undeclared variable " +
                                    std::to_string(t.var));
        if (!std::isfinite(t.coef)) throw std::invalid_argument("conic program: non-finite coefficient");
    }
    if (!std::isfinite(e.constant)) throw std::invalid_argument("conic program: non-finite constant");
}

void ConicProgram::minimize(AffineExpr objective) {
    check_expr(objective);
    objective_ = std::move(objective);
}

int ConicProgram::add_linear(AffineExpr expr, std::string label) {
    check_expr(expr);
    linear_.push_back(std::move(expr));
    const int idx = static_cast<int>(linear_.size()) - 1;
    tags_.push_back({ConstraintKind::linear, idx, std::move(label)});
    return idx;
}

int ConicProgram::add_equality(AffineExpr expr, std::string label) {
    check_expr(expr);
    equalities_.push_back(std::move(expr));
    const int idx = static_cast<int>(equalities_.size()) - 1;
    tags_.push_back({ConstraintKind::equality, idx, std::move(label)});
    return idx;
}

int ConicProgram::add_soc(AffineExpr bound, std::vector<AffineExpr> body, std::string label) {
    check_expr(bound);
    for (const auto& e : body) check_expr(e);
    Soc soc;
    soc.bound = std::move(bound);
    soc.body = std::move(body);
    socs_.push_back(std::move(soc));
    const int idx = static_cast<int>(socs_.size()) - 1;
    tags_.push_back({ConstraintKind::second_order_cone, idx, std::move(label)});
    return idx;
}

int ConicProgram::add_rotated_soc(AffineExpr u, AffineExpr v, std::vector<AffineExpr> body, std::string label) {
    check_expr(u);
    check_expr(v);
    for (const auto& e : body) check_expr(e);
    // 2uv >= |w|^2  <=>  || (sqrt(2) w, u - v) || <= u + v
    Soc soc;
    soc.rotated = true;
    soc.u = u;
    soc.v = v;
    soc.bound = u;
    for (const auto& t : v.terms) soc.bound.add(t.var, t.coef);
    soc.bound.constant += v.constant;
    for (auto& e : body) {
        AffineExpr s;
        for (const auto& t : e.terms) s.add(t.var, std::sqrt(2.0) * t.coef);
        s.constant = std::sqrt(2.0) * e.constant;
        soc.body.push_back(std::move(s));
    }
    AffineExpr diff = u;
    for (const auto& t : v.terms) diff.add(t.var, -t.coef);
    diff.constant -= v.constant;
    soc.body.push_back(std::move(diff));
    socs_.push_back(std::move(soc));
    const int idx = static_cast<int>(socs_.size()) - 1;
    tags_.push_back({ConstraintKind::rotated_second_order_cone, idx, std::move(label)});
    return idx;
}

int ConicProgram::add_lmi(Eigen::MatrixXcd constant,
                          std::vector<HermitianCoefficient> terms,
                          std::vector<SelectorCoefficient> selectors,
                          std::string label) {
    const auto n = constant.rows();
    if (constant.cols() != n || n == 0) throw std::invalid_argument("add_lmi: constant must be square and non-empty");
    if ((constant - constant.adjoint()).norm() > 1e-9 * (1.0 + constant.norm()))
        throw std::invalid_argument("add_lmi: constant is not Hermitian");
    for (const auto& t : terms) {
        if (t.var < 0 || t.var >= num_variables()) throw std::out_of_range("add_lmi: undeclared variable");
        if (t.factor.rows() != n || t.factor.cols() != t.core.rows() || t.core.rows() != t.core.cols())
            throw std::invalid_argument("add_lmi: coefficient shape mismatch");
        if ((t.core - t.core.adjoint()).norm() > 1e-9 * (1.0 + t.core.norm()))
            throw std::invalid_argument("add_lmi: coefficient core is not Hermitian");
    }
    for (const auto& s : selectors) {
        if (s.var < 0 || s.var >= num_variables()) throw std::out_of_range("add_lmi: undeclared variable");
        if (static_cast<Eigen::Index>(s.index.size()) != s.core.rows() || s.core.rows() != s.core.cols())
            throw std::invalid_argument("add_lmi: selector shape mismatch");
        for (int i : s.index)
            if (i < 0 || i >= n) throw std::out_of_range("add_lmi: selector index out of range");
    }
    lmis_.push_back({std::move(constant), std::move(terms), std::move(selectors)});
    const int idx = static_cast<int>(lmis_.size()) - 1;
    tags_.push_back({ConstraintKind::psd, idx, std::move(label)});
    return idx;
}

PsdVariable ConicProgram::add_psd_variable(int order, const std::string& prefix) {
    if (order <= 0) throw std::invalid_argument("add_psd_variable: order must be positive");
    PsdVariable v;
    v.order = order;
    v.re.assign(order, std::vector<int>(order, -1));
    v.im.assign(order, std::vector<int>(order, -1));
    std::vector<SelectorCoefficient> sel;
    using C = std::complex<double>;
    for (int i = 0; i < order; ++i) {
        const int d = add_variable(prefix + "[" + std::to_string(i) + "," + std::to_string(i) + "]");
        v.diag.push_back(d);
        Eigen::MatrixXcd core(1, 1);
        core(0, 0) = 1.0;
        sel.push_back({d, {i}, core});
    }
    for (int i = 0; i < order; ++i) {
        for (int j = i + 1; j < order; ++j) {
            const std::string tag = "[" + std::to_string(i) + "," + std::to_string(j) + "]";
            v.re[i][j] = add_variable(prefix + ".re" + tag);
            v.im[i][j] = add_variable(prefix + ".im" + tag);
            Eigen::MatrixXcd cre = Eigen::MatrixXcd::Zero(2, 2);
            cre(0, 1) = 1.0;
            cre(1, 0) = 1.0;
            Eigen::MatrixXcd cim = Eigen::MatrixXcd::Zero(2, 2);
            cim(0, 1) = C(0.0, 1.0);
            cim(1, 0) = C(0.0, -1.0);
            sel.push_back({v.re[i][j], {i, j}, cre});
            sel.push_back({v.im[i][j], {i, j}, cim});
        }
    }
    v.lmi = add_lmi(Eigen::MatrixXcd::Zero(order, order), {}, std::move(sel), prefix);
    return v;
}

AffineExpr PsdVariable::trace() const {
    AffineExpr e;
    for (int d : diag) e.add(d, 1.0);
    return e;
}

AffineExpr PsdVariable::inner(const Eigen::MatrixXcd& c) const {
    // Re tr(C V) = sum_i C_ii V_ii + 2 sum_{i<j} Re(C_ji V_ij)
    AffineExpr e;
    for (int i = 0; i < order; ++i) {
        e.add(diag[i], c(i, i).real());
        for (int j = i + 1; j < order; ++j) {
            const auto cji = c(j, i);
            e.add(re[i][j], 2.0 * cji.real());
            e.add(im[i][j], -2.0 * cji.imag());
        }
    }
    return e;
}

Eigen::MatrixXcd PsdVariable::value(const Eigen::VectorXd& x) const {
    Eigen::MatrixXcd v(order, order);
    for (int i = 0; i < order; ++i) {
        v(i, i) = x(diag[i]);
        for (int j = i + 1; j < order; ++j) {
            v(i, j) = std::complex<double>(x(re[i][j]), x(im[i][j]));
            v(j, i) = std::conj(v(i, j));
        }
    }
    return v;
}

std::size_t ConicProgram::count(ConstraintKind kind) const {
    std::size_t n = 0;
    for (const auto& t : tags_) n += (t.kind == kind);
    return n;
}

double ConicProgram::evaluate(const AffineExpr& e, const Eigen::VectorXd& x) {
    double v = e.constant;
    for (const auto& t : e.terms) v += t.coef * x(t.var);
    return v;
}

Eigen::MatrixXd realify_hermitian(const Eigen::MatrixXcd& h) {
    const auto n = h.rows();
    if (h.cols() != n) throw std::invalid_argument("realify_hermitian: matrix must be square");
    Eigen::MatrixXd r(2 * n, 2 * n);
    r.topLeftCorner(n, n) = h.real();
    r.topRightCorner(n, n) = -h.imag();
    r.bottomLeftCorner(n, n) = h.imag();
    r.bottomRightCorner(n, n) = h.real();
    return r;
}

}  // namespace crsma::conic
