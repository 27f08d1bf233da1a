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

#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace crsma::conic {

// Small conic modelling layer in front of a dense primal-dual interior-point
// solver. Supported constraints: affine inequalities, equalities, second-order
// cones (plain and rotated) and linear matrix inequalities over complex
// Hermitian matrices.
//
// Every constraint is compiled into the standard form
//     minimize c'x   s.t.  G x + s = h,  A x = b,  s in K,
// where K is a product of the nonnegative orthant, Lorentz cones and Hermitian
// PSD cones. The solver is a homogeneous self-dual embedding with
// Nesterov-Todd scaling and Mehrotra correction.

struct Term {
    int var;
    double coef;
};

/// Affine expression sum(coef * x[var]) + constant.
struct AffineExpr {
    std::vector<Term> terms;
    double constant = 0.0;

    AffineExpr() = default;
    explicit AffineExpr(double c) : constant(c) {}

    AffineExpr& add(int var, double coef) {
        if (coef != 0.0) terms.push_back({var, coef});
        return *this;
    }
    AffineExpr& add(double c) {
        constant += c;
        return *this;
    }
    static AffineExpr variable(int var, double coef = 1.0) {
        AffineExpr e;
        e.add(var, coef);
        return e;
    }
};

/// Hermitian coefficient F = factor * core * factor^H of variable `var`
/// inside a linear matrix inequality. `core` must be Hermitian.
struct HermitianCoefficient {
    int var;
    Eigen::MatrixXcd factor;
    Eigen::MatrixXcd core;
};

/// Same, but the factor columns are unit vectors e_{index[i]}; used for
/// diagonal-entry selectors without storing dense columns.
struct SelectorCoefficient {
    int var;
    std::vector<int> index;
    Eigen::MatrixXcd core;
};

enum class ConstraintKind { linear, equality, second_order_cone, rotated_second_order_cone, psd };

struct ConstraintTag {
    ConstraintKind kind;
    int index;  // position within constraints of the same kind
    std::string label;
};

enum class SolveStatus { optimal, infeasible, unbounded, numerical_failure };

const char* to_string(SolveStatus status);

struct SolveOutcome {
    SolveStatus status = SolveStatus::numerical_failure;
    Eigen::VectorXd x;  // empty unless optimal
    double objective = 0.0;
    int iterations = 0;
    double wall_seconds = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
    // Dual multipliers, populated when optimal.
    std::vector<double> linear_duals;
    std::vector<double> equality_duals;
    std::vector<Eigen::VectorXd> cone_duals;  // second-order and rotated cones, in insertion order
    std::vector<Eigen::MatrixXcd> psd_duals;

    bool ok() const { return status == SolveStatus::optimal; }
};

/// Handle of a Hermitian matrix variable V (order n) created by
/// ConicProgram::add_psd_variable. Entry (i,j), i<j, is re(i,j) + 1i*im(i,j).
struct PsdVariable {
    int order = 0;
    int lmi = -1;
    std::vector<int> diag;                // n real variables
    std::vector<std::vector<int>> re, im; // upper-triangular real and imaginary parts

    AffineExpr trace() const;
    /// Re tr(C V) for Hermitian C.
    AffineExpr inner(const Eigen::MatrixXcd& c) const;
    Eigen::MatrixXcd value(const Eigen::VectorXd& x) const;
};

class ConicProgram {
public:
    int add_variable(std::string name = {});
    int add_variables(int count, const std::string& prefix = {});
    int num_variables() const { return static_cast<int>(names_.size()); }
    const std::string& variable_name(int var) const { return names_.at(var); }

    void minimize(AffineExpr objective);

    /// expr >= 0
    int add_linear(AffineExpr expr, std::string label = {});
    /// expr == 0
    int add_equality(AffineExpr expr, std::string label = {});
    /// || body || <= bound
    int add_soc(AffineExpr bound, std::vector<AffineExpr> body, std::string label = {});
    /// 2 u v >= || body ||^2, u >= 0, v >= 0
    int add_rotated_soc(AffineExpr u, AffineExpr v, std::vector<AffineExpr> body, std::string label = {});
    /// constant + sum_j x_j F_j  is Hermitian PSD
    int add_lmi(Eigen::MatrixXcd constant,
                std::vector<HermitianCoefficient> terms,
                std::vector<SelectorCoefficient> selectors = {},
                std::string label = {});
    /// Declares a fresh Hermitian PSD matrix variable of the given order.
    PsdVariable add_psd_variable(int order, const std::string& prefix = "V");

    const std::vector<ConstraintTag>& constraints() const { return tags_; }
    std::size_t count(ConstraintKind kind) const;

    /// Value of an affine expression at x.
    static double evaluate(const AffineExpr& e, const Eigen::VectorXd& x);

private:
    friend class StandardForm;

    struct Soc {
        AffineExpr bound;
        std::vector<AffineExpr> body;
        bool rotated = false;
        AffineExpr u, v;
    };
    struct Lmi {
        Eigen::MatrixXcd constant;
        std::vector<HermitianCoefficient> terms;
        std::vector<SelectorCoefficient> selectors;
    };

    void check_expr(const AffineExpr& e) const;

    std::vector<std::string> names_;
    AffineExpr objective_;
    std::vector<AffineExpr> linear_;
    std::vector<AffineExpr> equalities_;
    std::vector<Soc> socs_;
    std::vector<Lmi> lmis_;
    std::vector<ConstraintTag> tags_;
};

struct SolverSettings {
    double accuracy = 1e-8;
    int max_iterations = 120;
    double step_fraction = 0.99;
    // When the iteration breaks down before reaching `accuracy`, the best
    // iterate within relaxed_factor * accuracy is still reported optimal.
    double relaxed_factor = 100.0;
};

SolveOutcome solve(const ConicProgram& program, const SolverSettings& settings = {});
SolveOutcome solve(const ConicProgram& program, double accuracy);

/// Real symmetric embedding [[Re H, -Im H], [Im H, Re H]] of a Hermitian H.
Eigen::MatrixXd realify_hermitian(const Eigen::MatrixXcd& h);

}  // namespace crsma::conic
