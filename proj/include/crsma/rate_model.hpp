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

#include "crsma/channel.hpp"
#include "crsma/config.hpp"

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace crsma {

/// RIS phase configuration; theta in radians.
struct PhaseVector {
    Eigen::VectorXd theta;

    int size() const { return static_cast<int>(theta.size()); }
    /// e^{j theta_m}
    CVec phases() const;

    static PhaseVector zeros(int m);
    static PhaseVector uniform_random(int m, Rng& rng);
    /// Phases of the given complex entries (zero entries map to 0).
    static PhaseVector from_complex(const CVec& v);
};

struct PowerSolution {
    CVec p_c, p_1, p_2;
    std::array<double, 2> c_split{0.0, 0.0};
    double p_d = 0.0;
    double delta = 1.0;

    double bs_power() const { return p_c.squaredNorm() + p_1.squaredNorm() + p_2.squaredNorm(); }
    static PowerSolution zeros(int n_antennas, double delta);
};

/// Which transmission protocol the rates describe. NOMA is carried by the
/// same structure: the common stream holds the far user's whole message
/// (C_1 = 0, no far private stream, p_2 = 0), so the near user decodes the
/// far message first and then its own interference-free.
struct Protocol {
    bool rate_splitting = true;
    bool relaying = true;
};

struct RateReport {
    double r_c1_slot1 = 0.0;
    double r_c2_slot1 = 0.0;
    double r_c2_slot2 = 0.0;
    double r_c2_ndf = 0.0;
    double r_c = 0.0;
    double r_p1 = 0.0;
    double r_p2 = 0.0;
    std::array<double, 2> user_total{0.0, 0.0};
    double energy = 0.0;
};

/// Column form of h_direct^H + h_ris^H diag(e^{j theta}) H_br^H.
CVec effective_channel(const CVec& h_direct, const CVec& h_ris, const PhaseVector& theta, const CMat& H_br);

/// Effective slot-1 channel of user 1 (near) or 2 (far).
CVec user_channel(int user, const ChannelSet& ch, const PhaseVector& theta1);

/// h_12 + sum_m [hhat_r2]_m e^{j theta_m} [h_1r]_m. hhat_r2 holds the
/// coefficients exactly as they enter the far user's slot-2 row.
cdouble slot2_channel(const ChannelSet& ch, const PhaseVector& theta2);

double sinr_common_slot1(int user, const ChannelSet& ch, const PhaseVector& theta1, const PowerSolution& sol,
                         double noise);
double sinr_private_slot1(int user, const ChannelSet& ch, const PhaseVector& theta1, const PowerSolution& sol,
                          double noise);
double rate_common_slot2(const ChannelSet& ch, const PhaseVector& theta2, double p_d, double delta, double noise);
double common_rate(const ChannelSet& ch, const PhaseVector& theta1, const PhaseVector& theta2,
                   const PowerSolution& sol, double noise);

RateReport evaluate_rates(const ChannelSet& ch, const PhaseVector& theta1, const PhaseVector& theta2,
                          const PowerSolution& sol, double noise);

double total_energy(const PowerSolution& sol);

struct Margin {
    enum class Kind { rate, power, phase };
    std::string name;
    Kind kind;
    double value;  // >= 0 means satisfied
};

struct FeasibilityReport {
    std::vector<Margin> margins;
    RateReport rates;

    double worst(Margin::Kind kind) const;
    bool ok(double rate_tol = 1e-6, double power_tol = 1e-9) const;
    /// Human-readable list of violated constraints.
    std::string describe_violations(double rate_tol = 1e-6, double power_tol = 1e-9) const;
};

FeasibilityReport check_feasibility(const PowerSolution& sol, const ChannelSet& ch, const PhaseVector& theta1,
                                    const PhaseVector& theta2, const SystemConfig& cfg, Protocol protocol = {});

}  // namespace crsma
