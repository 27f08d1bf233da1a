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

#include "crsma/rate_model.hpp"

#include "crsma/kernels.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace crsma {

CVec PhaseVector::phases() const {
    CVec out(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) out(i) = std::polar(1.0, theta(i));
    return out;
}

PhaseVector PhaseVector::zeros(int m) { return {Eigen::VectorXd::Zero(m)}; }

PhaseVector PhaseVector::uniform_random(int m, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    PhaseVector p{Eigen::VectorXd(m)};
    for (int i = 0; i < m; ++i) p.theta(i) = u(rng);
    return p;
}

PhaseVector PhaseVector::from_complex(const CVec& v) {
    PhaseVector p{Eigen::VectorXd(v.size())};
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double a = v(i) == cdouble(0.0) ? 0.0 : std::arg(v(i));
        if (a < 0.0) a += 2.0 * std::numbers::pi;
        p.theta(i) = a;
    }
    return p;
}

PowerSolution PowerSolution::zeros(int n_antennas, double delta) {
    PowerSolution s;
    s.p_c = CVec::Zero(n_antennas);
    s.p_1 = CVec::Zero(n_antennas);
    s.p_2 = CVec::Zero(n_antennas);
    s.delta = delta;
    return s;
}

CVec effective_channel(const CVec& h_direct, const CVec& h_ris, const PhaseVector& theta, const CMat& H_br) {
    const auto m = h_ris.size();
    if (theta.size() != m || H_br.cols() != m || H_br.rows() != h_direct.size())
        throw std::invalid_argument("effective_channel: shape mismatch");
    if (m == 0) return h_direct;
    const CVec phi = theta.phases();
    CVec weighted(m);
    // conj(phi) .* h_ris, so that the row form is h_ris^H diag(phi) H_br^H
    kernels::mulc(static_cast<std::size_t>(m), phi.data(), h_ris.data(), weighted.data());
    return h_direct + H_br * weighted;
}

CVec user_channel(int user, const ChannelSet& ch, const PhaseVector& theta1) {
    if (user == 1) return effective_channel(ch.h_b1, ch.h_r1, theta1, ch.H_br);
    if (user == 2) return effective_channel(ch.h_b2, ch.h_r2, theta1, ch.H_br);
    throw std::invalid_argument("user must be 1 or 2");
}

cdouble slot2_channel(const ChannelSet& ch, const PhaseVector& theta2) {
    const auto m = ch.h_1r.size();
    if (theta2.size() != m || ch.hhat_r2.size() != m) throw std::invalid_argument("slot2_channel: shape mismatch");
    if (m == 0) return ch.h_12;
    CVec prod = ch.hhat_r2.cwiseProduct(ch.h_1r);
    const CVec phi = theta2.phases();
    return ch.h_12 + kernels::dotu(static_cast<std::size_t>(m), prod.data(), phi.data());
}

namespace {

double gain(const CVec& h, const CVec& p) {
    if (p.size() != h.size()) throw std::invalid_argument("precoder length does not match the channel");
    return std::norm(kernels::dotc(static_cast<std::size_t>(h.size()), h.data(), p.data()));
}

double log2p1(double x) { return std::log2(1.0 + std::max(x, 0.0)); }

}  // namespace

double sinr_common_slot1(int user, const ChannelSet& ch, const PhaseVector& theta1, const PowerSolution& sol,
                         double noise) {
    const CVec h = user_channel(user, ch, theta1);
    return gain(h, sol.p_c) / (gain(h, sol.p_1) + gain(h, sol.p_2) + noise);
}

double sinr_private_slot1(int user, const ChannelSet& ch, const PhaseVector& theta1, const PowerSolution& sol,
                          double noise) {
    const CVec h = user_channel(user, ch, theta1);
    const CVec& own = user == 1 ? sol.p_1 : sol.p_2;
    const CVec& other = user == 1 ? sol.p_2 : sol.p_1;
    return gain(h, own) / (gain(h, other) + noise);
}

double rate_common_slot2(const ChannelSet& ch, const PhaseVector& theta2, double p_d, double delta, double noise) {
    return (1.0 - delta) * log2p1(std::norm(slot2_channel(ch, theta2)) * p_d / noise);
}

double common_rate(const ChannelSet& ch, const PhaseVector& theta1, const PhaseVector& theta2,
                   const PowerSolution& sol, double noise) {
    const double r1 = sol.delta * log2p1(sinr_common_slot1(1, ch, theta1, sol, noise));
    const double r2 = sol.delta * log2p1(sinr_common_slot1(2, ch, theta1, sol, noise)) +
                      rate_common_slot2(ch, theta2, sol.p_d, sol.delta, noise);
    return std::min(r1, r2);
}

RateReport evaluate_rates(const ChannelSet& ch, const PhaseVector& theta1, const PhaseVector& theta2,
                          const PowerSolution& sol, double noise) {
    RateReport r;
    const double d = sol.delta;
    r.r_c1_slot1 = d * log2p1(sinr_common_slot1(1, ch, theta1, sol, noise));
    r.r_c2_slot1 = d * log2p1(sinr_common_slot1(2, ch, theta1, sol, noise));
    r.r_c2_slot2 = rate_common_slot2(ch, theta2, sol.p_d, d, noise);
    r.r_c2_ndf = r.r_c2_slot1 + r.r_c2_slot2;
    r.r_c = std::min(r.r_c1_slot1, r.r_c2_ndf);
    r.r_p1 = d * log2p1(sinr_private_slot1(1, ch, theta1, sol, noise));
    r.r_p2 = d * log2p1(sinr_private_slot1(2, ch, theta1, sol, noise));
    r.user_total = {sol.c_split[0] + r.r_p1, sol.c_split[1] + r.r_p2};
    r.energy = total_energy(sol);
    return r;
}

double total_energy(const PowerSolution& sol) { return sol.delta * sol.bs_power() + (1.0 - sol.delta) * sol.p_d; }

double FeasibilityReport::worst(Margin::Kind kind) const {
    double w = std::numeric_limits<double>::infinity();
    for (const auto& m : margins)
        if (m.kind == kind) w = std::min(w, m.value);
    return w;
}

bool FeasibilityReport::ok(double rate_tol, double power_tol) const {
    for (const auto& m : margins) {
        const double tol = m.kind == Margin::Kind::power ? power_tol : rate_tol;
        if (!(m.value >= -tol)) return false;
    }
    return true;
}

std::string FeasibilityReport::describe_violations(double rate_tol, double power_tol) const {
    std::string out;
    for (const auto& m : margins) {
        const double tol = m.kind == Margin::Kind::power ? power_tol : rate_tol;
        if (!(m.value >= -tol)) out += fmt::format("{}={:.3e} ", m.name, m.value);
    }
    return out;
}

FeasibilityReport check_feasibility(const PowerSolution& sol, const ChannelSet& ch, const PhaseVector& theta1,
                                    const PhaseVector& theta2, const SystemConfig& cfg, Protocol protocol) {
    FeasibilityReport rep;
    rep.rates = evaluate_rates(ch, theta1, theta2, sol, cfg.noise_power());
    const auto& r = rep.rates;
    using K = Margin::Kind;
    auto add = [&](std::string name, K kind, double v) { rep.margins.push_back({std::move(name), kind, v}); };

    add("bs_budget", K::power, cfg.p_bs() - sol.bs_power());
    add("relay_nonneg", K::power, sol.p_d);
    add("relay_budget", K::power, cfg.p_d2d() - sol.p_d);
    add("split_nonneg_1", K::rate, sol.c_split[0]);
    add("split_nonneg_2", K::rate, sol.c_split[1]);
    add("qos_1", K::rate, r.user_total[0] - cfg.rate_thresholds[0]);
    add("qos_2", K::rate, r.user_total[1] - cfg.rate_thresholds[1]);
    add("common_rate", K::rate, r.r_c - (sol.c_split[0] + sol.c_split[1]));
    if (!(sol.delta > 0.0 && sol.delta <= 1.0)) add("delta_range", K::rate, -1.0);

    auto unit_modulus = [&](const char* name, const PhaseVector& th) {
        double worst = 0.0;
        const CVec phi = th.phases();
        for (Eigen::Index i = 0; i < phi.size(); ++i) worst = std::max(worst, std::abs(std::abs(phi(i)) - 1.0));
        if (!th.theta.allFinite()) worst = 1.0;
        add(name, K::phase, -worst);
    };
    unit_modulus("unit_modulus_1", theta1);
    unit_modulus("unit_modulus_2", theta2);

    if (!protocol.rate_splitting) {
        add("noma_far_private_off", K::power, -sol.p_2.squaredNorm());
        add("noma_near_split_off", K::rate, -std::abs(sol.c_split[0]));
    }
    if (!protocol.relaying) add("relay_off", K::power, -std::abs(sol.p_d));
    return rep;
}

}  // namespace crsma
