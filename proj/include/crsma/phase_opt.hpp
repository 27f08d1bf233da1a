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

#include "crsma/conic.hpp"
#include "crsma/rate_model.hpp"

#include <array>
#include <string>
#include <vector>

namespace crsma {

/// theta_m = arg(h_12) - arg(h_1r[m] * hhat_r2[m]); zero products get 0.
PhaseVector closed_form_theta2(cdouble h_12, const CVec& h_1r, const CVec& hhat_r2);

/// One lifted SINR requirement <B, V> >= 0 with
/// B = s s^H - mu * (sum_i c_i c_i^H + E_last), all vectors noise-normalized.
struct LiftedConstraint {
    std::string name;
    CVec signal;
    std::vector<CVec> interference;
    double mu = 0.0;
    double scale = 1.0;  // signal + mu * (interference + noise) at the incumbent

    CMat matrix() const;  // B / scale
};

/// Stream index j: 0 = common, 1 = private of user 1, 2 = private of user 2.
struct LiftedProblem {
    int m = 0;
    std::array<std::array<CVec, 3>, 2> a;     // a[k][j] = diag(h_rk^H) H_br^H p_j / sigma
    std::array<std::array<cdouble, 3>, 2> b;  // b[k][j] = h_bk^H p_j / sigma
    std::array<double, 2> mu_p{0.0, 0.0};
    double mu_c1 = 0.0, mu_c2 = 0.0;
    double r_c2_slot2 = 0.0;
    std::vector<LiftedConstraint> rows;  // requirements with mu > 0

    /// [[a a^H, a conj(b)], [b a^H, 0]]
    CMat q(int k, int j) const;
    /// [a; b], so that |b|^2 + tr(Q V) = c^H V c for V with unit corner.
    CVec lifted(int k, int j) const;
    /// |b|^2 + Re tr(Q V)
    double power(int k, int j, const CMat& v) const;
};

/// Noise-normalized lifting at the incumbent power solution; theta2 fixes the
/// slot-2 rate that enters the far user's common requirement as a constant.
LiftedProblem build_lifted_problem(const ChannelSet& ch, const PowerSolution& sol, const PhaseVector& theta2,
                                   const SystemConfig& cfg, Protocol protocol = {});

/// vbar = [conj(e^{j theta}); 1]
CVec lift(const PhaseVector& theta1);

/// v1 v1^H for the unit top eigenvector of V.
CMat spectral_subgradient(const CMat& v);
/// ||V||_* - ||V||_2 for Hermitian PSD V.
double dc_residual(const CMat& v);

struct LiftedMatrix {
    CMat V;
    double dc_residual = 0.0;
};

enum class DcStatus { rank_one, max_iterations, infeasible, numerical_failure };
const char* to_string(DcStatus s);

struct DcTraceEntry {
    int r = 0;
    double objective = 0.0;  // ||V||_* - <subgradient, V>
    double residual = 0.0;
    double margin = 0.0;     // smallest relative lifted margin
    double weight = 0.0;
    conic::SolveStatus status = conic::SolveStatus::optimal;
};

struct DcOptions {
    /// Weight of the summed relative margins in the first DC round; it is
    /// multiplied by weight_decay every round so the rank penalty takes over.
    double margin_weight = 10.0;
    double weight_decay = 0.5;
    double solver_accuracy = 1e-8;
};

struct DcResult {
    DcStatus status = DcStatus::numerical_failure;
    LiftedMatrix V;
    std::vector<DcTraceEntry> trace;
};

/// Runs the penalized DC rounds from V0 until the DC residual drops to zeta_dc or max_iter_dc rounds.
DcResult dc_rank_one_solve(const LiftedProblem& lp, const CMat& v0, const SystemConfig& cfg,
                           const DcOptions& opt = {});

struct Extraction {
    bool ok = false;
    PhaseVector theta;
    double projection_error = 0.0;  // max | |v_m| - 1 | before projection
};

/// Top-eigenpair factorization V ~ vbar vbar^H, v = vbar[0:M] / vbar[M],
/// unit-modulus projection, theta = arg(conj(v)).
Extraction extract_phases(const LiftedMatrix& v);

struct PhaseStepResult {
    bool accepted = false;
    PhaseVector theta1;
    DcResult dc;
    double projection_error = 0.0;
    /// Extracted phases whether or not they were accepted, and the worst
    /// rate-model rate margin of the incumbent power solution under them.
    PhaseVector candidate;
    double candidate_rate_margin = 0.0;
    std::string reason;
};

/// Phase block at a fixed power solution: lifts, runs the DC iterations from
/// the incumbent phases and accepts the extracted phases only if the incumbent
/// power solution stays feasible for them.
PhaseStepResult phase_step(const ChannelSet& ch, const PowerSolution& sol, const PhaseVector& theta1,
                           const PhaseVector& theta2, const SystemConfig& cfg, Protocol protocol = {},
                           const DcOptions& opt = {});

}  // namespace crsma
