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

#include "crsma/ao_driver.hpp"

#include <cmath>
#include <stdexcept>

namespace crsma {

const char* to_string(AoStatus s) {
    switch (s) {
        case AoStatus::converged: return "converged";
        case AoStatus::max_iterations: return "max_iterations";
        case AoStatus::infeasible: return "infeasible";
        case AoStatus::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

AoRun ao_solve(const ChannelSet& ch, double delta, const SystemConfig& cfg, const PhaseVector& theta1,
               const PhaseVector& theta2, const AoOptions& opt) {
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("ao_solve: delta must lie in (0, 1]");
    if (theta1.size() != ch.n_ris() || theta2.size() != ch.n_ris())
        throw std::invalid_argument("ao_solve: phase vectors do not match the RIS size");
    AoRun run;
    run.delta = delta;
    run.theta1 = theta1;
    run.theta2 = theta2;

    auto power_step = [&](const PhaseVector& th, const PowerSolution* warm) {
        return sca_solve(ScaContext(ch, th, theta2, delta, cfg, opt.protocol), warm, opt.sca);
    };

    ScaResult sca = power_step(theta1, nullptr);
    if (!sca.ok()) {
        run.status = sca.status == ScaStatus::numerical_failure ? AoStatus::numerical_failure : AoStatus::infeasible;
        run.trace.push_back({0, 0.0, 0.0, sca.status, DcStatus::rank_one, false});
        return run;
    }
    run.solution = sca.sol;
    run.energy = sca.energy;
    run.trace.push_back({0, sca.energy, 0.0, sca.status, DcStatus::rank_one, false});
    if (ch.n_ris() == 0) {
        run.status = AoStatus::converged;
        return run;
    }

    run.status = AoStatus::max_iterations;
    for (int i = 1; i <= cfg.max_iter_ao; ++i) {
        const auto ps = phase_step(ch, run.solution, run.theta1, theta2, cfg, opt.protocol, opt.dc);
        AoIteration rec{i, run.energy, ps.dc.V.dc_residual, ScaStatus::converged, ps.dc.status, ps.accepted};
        if (!ps.accepted) {
            // The incumbent phases stay; the power block would return the same point.
            run.trace.push_back(rec);
            run.status = AoStatus::converged;
            break;
        }
        const ScaResult next = power_step(ps.theta1, &run.solution);
        rec.sca_status = next.status;
        if (!next.ok() || next.energy > run.energy) {
            // Keep the incumbent bundle; the alternation cannot improve on it.
            run.trace.push_back(rec);
            run.status = AoStatus::converged;
            break;
        }
        const double prev = run.energy;
        run.solution = next.sol;
        run.theta1 = ps.theta1;
        run.energy = next.energy;
        rec.eta = next.energy;
        run.trace.push_back(rec);
        if (std::abs(prev - next.energy) <= cfg.tol_ao) {
            run.status = AoStatus::converged;
            break;
        }
    }
    return run;
}

PhaseVector initial_phases(int m, std::uint64_t seed) {
    Rng rng(seed);
    return PhaseVector::uniform_random(m, rng);
}

AOResult delta_search(const ChannelSet& ch, const SystemConfig& cfg, const PhaseVector& theta1,
                      const std::vector<double>& grid, const AoOptions& opt) {
    AOResult res;
    const PhaseVector theta2 = closed_form_theta2(ch.h_12, ch.h_1r, ch.hhat_r2);
    res.theta2 = theta2;
    for (double delta : grid) {
        AoRun run = ao_solve(ch, delta, cfg, theta1, theta2, opt);
        DeltaEntry e{delta, std::numeric_limits<double>::infinity(), run.status,
                     static_cast<int>(run.trace.size()) - 1};
        if (run.status == AoStatus::numerical_failure) res.numerical_failure = true;
        if (run.feasible()) {
            e.energy = run.energy;
            if (!res.feasible || run.energy < res.energy) {
                res.feasible = true;
                res.best_delta = delta;
                res.energy = run.energy;
                res.solution = run.solution;
                res.theta1 = run.theta1;
                res.trace = run.trace;
                res.converged = run.status == AoStatus::converged;
            }
        }
        res.table.push_back(e);
    }
    if (!res.feasible) res.theta1 = theta1;
    return res;
}

AOResult delta_search(const ChannelSet& ch, const SystemConfig& cfg, const PhaseVector& theta1,
                      const AoOptions& opt) {
    return delta_search(ch, cfg, theta1, cfg.delta_grid, opt);
}

}  // namespace crsma
