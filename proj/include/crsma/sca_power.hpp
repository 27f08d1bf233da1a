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
#include <optional>
#include <string>
#include <vector>

namespace crsma {

/// Affine minorant 2 Re{conj(v_n) v}/u_n - |v_n|^2 u / u_n^2 of |v|^2/u,
/// tight at (u_n, v_n).
struct LowerBoundForm {
    cdouble coef_v;  // bound contains 2 Re{conj(coef_v) v}
    double coef_u;

    double operator()(double u, cdouble v) const { return 2.0 * std::real(std::conj(coef_v) * v) + coef_u * u; }
};

LowerBoundForm lower_bound_approx(double u_n, cdouble v_n);

/// Linearization point: precoders plus the exact SINR / interference values
/// they produce (noise-normalized).
struct ScaIterate {
    PowerSolution sol;
    std::array<double, 2> gamma_p{0.0, 0.0}, gamma_c{0.0, 0.0};
    std::array<double, 2> beta_p{1.0, 1.0}, beta_c{1.0, 1.0};
    double eta = 0.0;
};

/// Everything the power block needs for one (channels, phases, delta) triple.
struct ScaContext {
    ChannelSet ch;
    PhaseVector theta1, theta2;
    double delta = 1.0;
    Protocol protocol;
    SystemConfig cfg;

    // Derived, noise-normalized.
    std::array<CVec, 2> h;  // effective slot-1 channels / sigma
    double relay_gain = 0.0;  // |slot-2 channel|^2 / sigma^2

    ScaContext(const ChannelSet& ch, const PhaseVector& theta1, const PhaseVector& theta2, double delta,
               const SystemConfig& cfg, Protocol protocol = {});
    int n_antennas() const { return ch.n_antennas(); }
    bool relay_active() const { return protocol.relaying && delta < 1.0; }
};

/// Exact slacks for given precoders.
ScaIterate make_iterate(const ScaContext& ctx, const PowerSolution& sol);

struct SocpLayout {
    int n_antennas = 0;
    std::array<int, 3> p_re{-1, -1, -1}, p_im{-1, -1, -1};  // streams c, 1, 2
    int t = -1, p_d = -1;
    std::array<int, 2> c{-1, -1};
    std::array<int, 2> u_p{-1, -1}, b_p{-1, -1}, u_c{-1, -1}, b_c{-1, -1};
    std::array<int, 2> w_p{-1, -1}, w_c{-1, -1};
    int w_d = -1, xi = -1;
    /// Variables and constraints of the formulation as catalogued for the
    /// complexity count (complex precoder entries count once; auxiliary log
    /// epigraph variables and cones are not counted).
    int logical_variables = 0;
    int logical_constraints = 0;
};

/// Convexified power program at the given iterate. With `restoration` set, every rate row gets a
/// shared slack xi and the objective becomes min xi.
conic::ConicProgram build_socp(const ScaContext& ctx, const ScaIterate& it, SocpLayout* layout = nullptr,
                               bool restoration = false);

enum class ScaStatus { converged, max_iterations, infeasible, numerical_failure };
const char* to_string(ScaStatus s);

struct ScaTraceEntry {
    int n = 0;
    double eta = 0.0;
    conic::SolveStatus status = conic::SolveStatus::optimal;
    double max_violation = 0.0;  // worst rate-model margin (negative part)
    bool restoration = false;
};

struct ScaResult {
    ScaStatus status = ScaStatus::infeasible;
    PowerSolution sol;
    double energy = 0.0;
    std::vector<ScaTraceEntry> trace;
    int failed_iteration = -1;
    bool ok() const { return status == ScaStatus::converged || status == ScaStatus::max_iterations; }
};

struct ScaOptions {
    double solver_accuracy = 1e-8;
    int max_restoration_iterations = 50;
};

/// Heuristic start (matched filters, equal power split at the full budget,
/// full relay power) followed, when needed, by SCA restoration on the
/// rate-row slack. Returns nullopt when restoration cannot reach feasibility.
std::optional<ScaIterate> initial_feasible_point(const ScaContext& ctx, const ScaOptions& opt = {},
                                                 std::vector<ScaTraceEntry>* trace = nullptr,
                                                 conic::SolveStatus* failure = nullptr);

/// Same, starting from a caller-supplied point instead of the heuristic.
std::optional<ScaIterate> initial_feasible_point_from(const ScaContext& ctx, const PowerSolution& start,
                                                      const ScaOptions& opt = {},
                                                      std::vector<ScaTraceEntry>* trace = nullptr,
                                                      conic::SolveStatus* failure = nullptr);

/// SCA loop for the power block. `warm_start`, when given and feasible, replaces the heuristic start.
ScaResult sca_solve(const ScaContext& ctx, const PowerSolution* warm_start = nullptr, const ScaOptions& opt = {});

}  // namespace crsma
