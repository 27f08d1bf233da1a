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

#include "crsma/phase_opt.hpp"
#include "crsma/sca_power.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace crsma {

/// One alternation round: the power block followed by the phase block.
struct AoIteration {
    int i = 0;
    double eta = 0.0;  // energy after the power step of this round
    double dc_residual = 0.0;
    ScaStatus sca_status = ScaStatus::converged;
    DcStatus dc_status = DcStatus::rank_one;
    bool phase_accepted = false;
};

enum class AoStatus { converged, max_iterations, infeasible, numerical_failure };
const char* to_string(AoStatus s);

struct AoOptions {
    Protocol protocol;
    ScaOptions sca;
    DcOptions dc;
};

/// Alternation at one fixed delta.
struct AoRun {
    AoStatus status = AoStatus::infeasible;
    double delta = 1.0;
    double energy = std::numeric_limits<double>::infinity();
    PowerSolution solution;
    PhaseVector theta1, theta2;
    std::vector<AoIteration> trace;
    bool feasible() const { return status == AoStatus::converged || status == AoStatus::max_iterations; }
};

/// Alternates the power and phase blocks from `theta1` until the energy
/// changes by at most tol_ao between rounds or max_iter_ao rounds ran.
/// Without RIS elements this is a single power solve.
AoRun ao_solve(const ChannelSet& ch, double delta, const SystemConfig& cfg, const PhaseVector& theta1,
               const PhaseVector& theta2, const AoOptions& opt = {});

struct DeltaEntry {
    double delta = 0.0;
    double energy = std::numeric_limits<double>::infinity();  // +inf when infeasible
    AoStatus status = AoStatus::infeasible;
    int iterations = 0;
};

struct AOResult {
    bool feasible = false;
    bool numerical_failure = false;  // some grid point hit a solver breakdown
    double best_delta = 0.0;
    double energy = std::numeric_limits<double>::infinity();
    PowerSolution solution;
    PhaseVector theta1, theta2;
    std::vector<DeltaEntry> table;
    std::vector<AoIteration> trace;  // of the best grid point
    bool converged = false;
};

/// Uniform random starting phases drawn from `seed`.
PhaseVector initial_phases(int m, std::uint64_t seed);

/// ao_solve at every grid point; the minimum-energy point wins (the first one on ties).
AOResult delta_search(const ChannelSet& ch, const SystemConfig& cfg, const PhaseVector& theta1,
                      const std::vector<double>& grid, const AoOptions& opt = {});

/// Same over cfg.delta_grid.
AOResult delta_search(const ChannelSet& ch, const SystemConfig& cfg, const PhaseVector& theta1,
                      const AoOptions& opt = {});

}  // namespace crsma
