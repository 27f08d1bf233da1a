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

// Power block. All quantities inside the cone program are normalized by
// the noise level, and the SINR slacks are rescaled per iterate:
//   uhat = (1 + gamma) / (1 + gamma_n),   bhat = beta / beta_n,
// so every variable is O(1) near the expansion point. The log terms use the
// concave minorant ln(x) >= ln(x_n) + 1 - x_n / x, written with an epigraph
// variable w >= 1/uhat (a hyperbolic cone), which keeps the program an SOCP and is
// tight with matching slope at the expansion point.

#include "crsma/sca_power.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

namespace crsma {

using conic::AffineExpr;
using conic::ConicProgram;

LowerBoundForm lower_bound_approx(double u_n, cdouble v_n) {
    if (!(u_n > 0.0)) throw std::domain_error("lower_bound_approx: expansion point needs u_n > 0");
    return {v_n / u_n, -std::norm(v_n) / (u_n * u_n)};
}

const char* to_string(ScaStatus s) {
    switch (s) {
        case ScaStatus::converged: return "converged";
        case ScaStatus::max_iterations: return "max_iterations";
        case ScaStatus::infeasible: return "infeasible";
        case ScaStatus::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

ScaContext::ScaContext(const ChannelSet& ch_, const PhaseVector& t1, const PhaseVector& t2, double delta_,
                       const SystemConfig& cfg_, Protocol protocol_)
    : ch(ch_), theta1(t1), theta2(t2), delta(delta_), protocol(protocol_), cfg(cfg_) {
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
    const double sigma = std::sqrt(cfg.noise_power());
    h[0] = user_channel(1, ch, theta1) / sigma;
    h[1] = user_channel(2, ch, theta1) / sigma;
    relay_gain = std::norm(slot2_channel(ch, theta2)) / cfg.noise_power();
}

namespace {

constexpr double kLn2 = std::numbers::ln2;

cdouble hp(const CVec& h, const CVec& p) { return h.dot(p); }  // h^H p

const CVec& stream(const PowerSolution& s, int j) { return j == 0 ? s.p_c : (j == 1 ? s.p_1 : s.p_2); }

}  // namespace

ScaIterate make_iterate(const ScaContext& ctx, const PowerSolution& sol) {
    ScaIterate it;
    it.sol = sol;
    for (int k = 0; k < 2; ++k) {
        const double g1 = std::norm(hp(ctx.h[k], sol.p_1));
        const double g2 = std::norm(hp(ctx.h[k], sol.p_2));
        const double gc = std::norm(hp(ctx.h[k], sol.p_c));
        it.beta_p[k] = (k == 0 ? g2 : g1) + 1.0;
        it.beta_c[k] = g1 + g2 + 1.0;
        it.gamma_p[k] = (k == 0 ? g1 : g2) / it.beta_p[k];
        it.gamma_c[k] = gc / it.beta_c[k];
    }
    it.eta = total_energy(sol);
    return it;
}

namespace {

// Re / Im of conj(q) * h^H p as affine expressions of the precoder entries.
void add_re_conj_q_hp(AffineExpr& e, const SocpLayout& L, int j, const CVec& h, cdouble q, double scale) {
    for (int i = 0; i < L.n_antennas; ++i) {
        const cdouble z = q * h(i);
        e.add(L.p_re[j] + i, scale * z.real());
        e.add(L.p_im[j] + i, scale * z.imag());
    }
}

void add_im_conj_q_hp(AffineExpr& e, const SocpLayout& L, int j, const CVec& h, cdouble q, double scale) {
    for (int i = 0; i < L.n_antennas; ++i) {
        const cdouble z = q * h(i);
        e.add(L.p_im[j] + i, scale * z.real());
        e.add(L.p_re[j] + i, -scale * z.imag());
    }
}

}  // namespace

conic::ConicProgram build_socp(const ScaContext& ctx, const ScaIterate& it, SocpLayout* layout_out,
                               bool restoration) {
    const int nt = ctx.n_antennas();
    if (it.sol.p_c.size() != nt || it.sol.p_1.size() != nt || it.sol.p_2.size() != nt)
        throw std::invalid_argument("build_socp: precoder length does not match the channels");
    for (int k = 0; k < 2; ++k)
        if (!(it.beta_p[k] > 0.0) || !(it.beta_c[k] > 0.0))
            throw std::invalid_argument("build_socp: interference slacks must be positive");

    const bool rs = ctx.protocol.rate_splitting;
    const bool relay = ctx.relay_active();
    const double delta = ctx.delta;
    const double rate_scale = delta / kLn2;

    ConicProgram p;
    SocpLayout L;
    L.n_antennas = nt;
    std::set<std::string> logical;
    auto tag = [&](const std::string& label) {
        if (label.rfind("aux", 0) != 0) logical.insert(label);
        return label;
    };

    const int n_streams = rs ? 3 : 2;  // NOMA has no far private stream
    for (int j = 0; j < n_streams; ++j) {
        const char* names[] = {"pc", "p1", "p2"};
        L.p_re[j] = p.add_variables(nt, std::string(names[j]) + ".re");
        L.p_im[j] = p.add_variables(nt, std::string(names[j]) + ".im");
    }
    L.t = p.add_variable("eta_bs");
    if (relay) L.p_d = p.add_variable("p_d");
    if (rs) L.c[0] = p.add_variable("c1");
    L.c[1] = p.add_variable("c2");
    for (int k = 0; k < 2; ++k) {
        if (rs || k == 0) {
            L.u_p[k] = p.add_variable("uhat_p" + std::to_string(k + 1));
            L.b_p[k] = p.add_variable("bhat_p" + std::to_string(k + 1));
            L.w_p[k] = p.add_variable("w_p" + std::to_string(k + 1));
        }
        L.u_c[k] = p.add_variable("uhat_c" + std::to_string(k + 1));
        L.b_c[k] = p.add_variable("bhat_c" + std::to_string(k + 1));
        L.w_c[k] = p.add_variable("w_c" + std::to_string(k + 1));
    }
    if (relay) L.w_d = p.add_variable("w_d");
    if (restoration) L.xi = p.add_variable("xi");

    // Catalogued variable count: 3 complex precoders, 4 SINR slacks,
    // 4 interference slacks, 2 splits, relay power and the energy epigraph.
    L.logical_variables = n_streams * nt + (rs ? 8 : 6) + (rs ? 2 : 1) + 1 + 1;

    auto precoder_at_iterate = [&](int j) { return stream(it.sol, j); };

    // SINR minorants (44)/(45) and interference definitions (34)/(38).
    auto sinr_block = [&](int k, int signal, const std::vector<int>& interferers, int u_var, int b_var,
                          double beta_n, const std::string& sinr_label, const std::string& interf_label) {
        const CVec& h = ctx.h[k];
        const cdouble v_n = hp(h, precoder_at_iterate(signal));
        const double gamma_n = std::norm(v_n) / beta_n;
        const double inv = 1.0 / (1.0 + gamma_n);
        const auto lb = lower_bound_approx(beta_n, v_n);
        // [2 Re(conj(v_n) h^H p)/beta_n - |v_n|^2/beta_n * bhat + 1] / (1 + gamma_n) - uhat >= 0
        AffineExpr row(inv);
        add_re_conj_q_hp(row, L, signal, h, lb.coef_v, 2.0 * inv);
        row.add(b_var, lb.coef_u * beta_n * inv);
        row.add(u_var, -1.0);
        p.add_linear(row, tag(sinr_label));
        // bhat - 1/beta_n >= sum_j |h^H p_j|^2 / beta_n
        AffineExpr lhs = AffineExpr::variable(b_var).add(-1.0 / beta_n);
        std::vector<AffineExpr> body;
        const double s = 1.0 / std::sqrt(beta_n);
        for (int j : interferers) {
            AffineExpr re, im;
            add_re_conj_q_hp(re, L, j, h, 1.0, s);
            add_im_conj_q_hp(im, L, j, h, 1.0, s);
            body.push_back(re);
            body.push_back(im);
        }
        if (body.empty()) p.add_linear(lhs, tag(interf_label));
        else p.add_rotated_soc(lhs, AffineExpr(0.5), body, tag(interf_label));
    };

    for (int k = 0; k < 2; ++k) {
        if (L.u_p[k] >= 0) {
            std::vector<int> other;
            if (k == 0 && rs) other.push_back(2);
            if (k == 1) other.push_back(1);
            sinr_block(k, k + 1, other, L.u_p[k], L.b_p[k], it.beta_p[k], "sinr_private_" + std::to_string(k + 1),
                       "interference_private_" + std::to_string(k + 1));
        }
        std::vector<int> all{1};
        if (rs) all.push_back(2);
        sinr_block(k, 0, all, L.u_c[k], L.b_c[k], it.beta_c[k], "sinr_common_" + std::to_string(k + 1),
                   "interference_common_" + std::to_string(k + 1));
    }

    // w >= 1 / uhat
    auto log_epigraph = [&](int u, int w, const std::string& label) {
        p.add_rotated_soc(AffineExpr::variable(u), AffineExpr::variable(w), {AffineExpr(std::sqrt(2.0))}, tag(label));
    };
    // delta/ln2 * (ln(1 + gamma_n) + 1 - w): lower bound of delta log2(1 + gamma)
    auto log_term = [&](AffineExpr& e, double gamma_n, int w, double scale) {
        e.add(scale * (std::log1p(gamma_n) + 1.0));
        e.add(w, -scale);
    };

    // QoS (31).
    for (int k = 0; k < 2; ++k) {
        AffineExpr row(-ctx.cfg.rate_thresholds[k]);
        if (L.c[k] >= 0) row.add(L.c[k], 1.0);
        if (L.u_p[k] >= 0) {
            log_term(row, it.gamma_p[k], L.w_p[k], rate_scale);
            log_epigraph(L.u_p[k], L.w_p[k], "aux_log_private_" + std::to_string(k + 1));
        }
        if (restoration) row.add(L.xi, 1.0);
        p.add_linear(row, tag("qos_" + std::to_string(k + 1)));
    }
    log_epigraph(L.u_c[0], L.w_c[0], "aux_log_common_1");
    log_epigraph(L.u_c[1], L.w_c[1], "aux_log_common_2");

    auto minus_split = [&](AffineExpr& e) {
        for (int k = 0; k < 2; ++k)
            if (L.c[k] >= 0) e.add(L.c[k], -1.0);
    };
    // (35)
    {
        AffineExpr row;
        log_term(row, it.gamma_c[0], L.w_c[0], rate_scale);
        minus_split(row);
        if (restoration) row.add(L.xi, 1.0);
        p.add_linear(row, tag("common_split_near"));
    }
    // (36)
    {
        AffineExpr row;
        log_term(row, it.gamma_c[1], L.w_c[1], rate_scale);
        if (relay) {
            const double x_n = 1.0 + ctx.relay_gain * it.sol.p_d;
            log_term(row, x_n - 1.0, L.w_d, (1.0 - delta) / kLn2);
            // w_d * (1 + g P_d) / x_n >= 1
            AffineExpr x(1.0 / x_n);
            x.add(L.p_d, ctx.relay_gain / x_n);
            p.add_rotated_soc(x, AffineExpr::variable(L.w_d), {AffineExpr(std::sqrt(2.0))}, tag("aux_log_relay"));
        }
        minus_split(row);
        if (restoration) row.add(L.xi, 1.0);
        p.add_linear(row, tag("common_split_far"));
    }

    // Budgets (18), (19) and split sign (20).
    {
        std::vector<AffineExpr> body;
        for (int j = 0; j < n_streams; ++j)
            for (int i = 0; i < nt; ++i) {
                body.push_back(AffineExpr::variable(L.p_re[j] + i));
                body.push_back(AffineExpr::variable(L.p_im[j] + i));
            }
        p.add_rotated_soc(AffineExpr::variable(L.t), AffineExpr(0.5), body, tag("aux_bs_power"));
        p.add_linear(AffineExpr::variable(L.t, -1.0).add(ctx.cfg.p_bs()), tag("bs_budget"));
    }
    if (relay) {
        p.add_linear(AffineExpr::variable(L.p_d), tag("relay_budget"));
        p.add_linear(AffineExpr::variable(L.p_d, -1.0).add(ctx.cfg.p_d2d()), tag("relay_budget"));
    } else {
        logical.insert("relay_budget");  // P_d is pinned to zero
    }
    for (int k = 0; k < 2; ++k) {
        if (L.c[k] >= 0) p.add_linear(AffineExpr::variable(L.c[k]), tag("split_nonneg_" + std::to_string(k + 1)));
        else logical.insert("split_nonneg_" + std::to_string(k + 1));
    }

    AffineExpr energy;
    energy.add(L.t, delta);
    if (relay) energy.add(L.p_d, 1.0 - delta);
    if (restoration) {
        // Bounded below so the margin maximization stays finite.
        p.add_linear(AffineExpr::variable(L.xi).add(0.25), "aux_xi_floor");
        AffineExpr obj = AffineExpr::variable(L.xi);
        for (const auto& t : energy.terms) obj.add(t.var, 1e-6 * t.coef);
        p.minimize(obj);
    } else {
        p.minimize(energy);
    }
    L.logical_constraints = static_cast<int>(logical.size());
    if (layout_out) *layout_out = L;
    return p;
}

namespace {

PowerSolution extract(const ScaContext& ctx, const SocpLayout& L, const Eigen::VectorXd& x) {
    const int nt = ctx.n_antennas();
    PowerSolution s = PowerSolution::zeros(nt, ctx.delta);
    auto read = [&](int j) {
        CVec v(nt);
        for (int i = 0; i < nt; ++i) v(i) = cdouble(x(L.p_re[j] + i), x(L.p_im[j] + i));
        return v;
    };
    s.p_c = read(0);
    s.p_1 = read(1);
    if (L.p_re[2] >= 0) s.p_2 = read(2);
    if (L.p_d >= 0) s.p_d = std::clamp(x(L.p_d), 0.0, ctx.cfg.p_d2d());
    for (int k = 0; k < 2; ++k)
        if (L.c[k] >= 0) s.c_split[k] = std::max(0.0, x(L.c[k]));
    const double pw = s.bs_power();
    if (pw > ctx.cfg.p_bs()) {
        const double f = std::sqrt(ctx.cfg.p_bs() / pw);
        s.p_c *= f;
        s.p_1 *= f;
        s.p_2 *= f;
    }
    return s;
}

// Re-derive the split from the true rates so that the returned point carries
// the largest uniform margin the precoders allow.
void rebalance_split(const ScaContext& ctx, PowerSolution& s) {
    const auto r = evaluate_rates(ctx.ch, ctx.theta1, ctx.theta2, s, ctx.cfg.noise_power());
    if (!ctx.protocol.rate_splitting) {
        s.c_split = {0.0, std::max(0.0, r.r_c)};
        return;
    }
    const double need1 = std::max(0.0, ctx.cfg.rate_thresholds[0] - r.r_p1);
    const double need2 = std::max(0.0, ctx.cfg.rate_thresholds[1] - r.r_p2);
    const double spare = r.r_c - need1 - need2;
    if (spare < 0.0) return;
    s.c_split = {need1 + 0.5 * spare, need2 + 0.5 * spare};
}

double worst_violation(const FeasibilityReport& rep) {
    double w = 0.0;
    for (const auto& m : rep.margins) w = std::min(w, m.value);
    return -w;
}

// Restoration hands over only points that are feasible up to rounding.
constexpr double kStartRateTol = 1e-9;
constexpr double kStartPowerTol = 1e-12;
// Restoration slack (bits/s/Hz) above which a stalled run means infeasible.
constexpr double kXiSettled = 1e-3;

FeasibilityReport audit(const ScaContext& ctx, const PowerSolution& s) {
    return check_feasibility(s, ctx.ch, ctx.theta1, ctx.theta2, ctx.cfg, ctx.protocol);
}

PowerSolution heuristic_start(const ScaContext& ctx) {
    const int nt = ctx.n_antennas();
    PowerSolution s = PowerSolution::zeros(nt, ctx.delta);
    auto unit = [&](const CVec& v) {
        const double n = v.norm();
        if (n > 0.0) return CVec(v / n);
        CVec e = CVec::Zero(nt);
        e(0) = 1.0;
        return e;
    };
    const CVec d1 = unit(ctx.h[0]);
    const CVec d2 = unit(ctx.h[1]);
    const bool rs = ctx.protocol.rate_splitting;
    const double share = ctx.cfg.p_bs() / (rs ? 3.0 : 2.0);
    s.p_c = std::sqrt(share) * unit(d1 + d2);
    s.p_1 = std::sqrt(share) * d1;
    if (rs) s.p_2 = std::sqrt(share) * d2;
    if (ctx.relay_active()) s.p_d = ctx.cfg.p_d2d();
    rebalance_split(ctx, s);
    return s;
}

PowerSolution sanitize_start(const ScaContext& ctx, PowerSolution s) {
    s.delta = ctx.delta;
    if (!ctx.protocol.rate_splitting) s.p_2.setZero();
    if (!ctx.relay_active()) s.p_d = 0.0;
    s.p_d = std::clamp(s.p_d, 0.0, ctx.cfg.p_d2d());
    const double pw = s.bs_power();
    if (pw > ctx.cfg.p_bs()) {
        const double f = std::sqrt(ctx.cfg.p_bs() / pw);
        s.p_c *= f;
        s.p_1 *= f;
        s.p_2 *= f;
    }
    rebalance_split(ctx, s);
    return s;
}

}  // namespace

std::optional<ScaIterate> initial_feasible_point(const ScaContext& ctx, const ScaOptions& opt,
                                                 std::vector<ScaTraceEntry>* trace, conic::SolveStatus* failure) {
    return initial_feasible_point_from(ctx, heuristic_start(ctx), opt, trace, failure);
}

std::optional<ScaIterate> initial_feasible_point_from(const ScaContext& ctx, const PowerSolution& start,
                                                      const ScaOptions& opt, std::vector<ScaTraceEntry>* trace,
                                                      conic::SolveStatus* failure) {
    PowerSolution s = sanitize_start(ctx, start);
    if (audit(ctx, s).ok(kStartRateTol, kStartPowerTol)) return make_iterate(ctx, s);

    double prev_xi = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= opt.max_restoration_iterations; ++n) {
        const ScaIterate it = make_iterate(ctx, s);
        SocpLayout L;
        const auto prog = build_socp(ctx, it, &L, true);
        const auto out = conic::solve(prog, opt.solver_accuracy);
        if (!out.ok()) {
            if (trace) trace->push_back({n, it.eta, out.status, 0.0, true});
            // A breakdown after the slack has settled at a positive value is
            // reported as the infeasibility it was converging to.
            const bool settled = n > 1 && prev_xi > kXiSettled;
            if (failure) *failure = settled ? conic::SolveStatus::infeasible : out.status;
            return std::nullopt;
        }
        const double xi = out.x(L.xi);
        s = extract(ctx, L, out.x);
        rebalance_split(ctx, s);
        const auto rep = audit(ctx, s);
        if (trace) trace->push_back({n, total_energy(s), out.status, worst_violation(rep), true});
        if (rep.ok(kStartRateTol, kStartPowerTol)) return make_iterate(ctx, s);
        if (xi > kXiSettled && prev_xi - xi <= 1e-5) break;
        prev_xi = xi;
    }
    if (failure) *failure = conic::SolveStatus::infeasible;
    return std::nullopt;
}

ScaResult sca_solve(const ScaContext& ctx, const PowerSolution* warm_start, const ScaOptions& opt) {
    ScaResult res;
    conic::SolveStatus failure = conic::SolveStatus::infeasible;
    std::optional<ScaIterate> start;
    if (warm_start) start = initial_feasible_point_from(ctx, *warm_start, opt, &res.trace, &failure);
    if (!start && failure != conic::SolveStatus::numerical_failure)
        start = initial_feasible_point(ctx, opt, &res.trace, &failure);
    if (!start) {
        res.status = failure == conic::SolveStatus::numerical_failure ? ScaStatus::numerical_failure
                                                                       : ScaStatus::infeasible;
        res.failed_iteration = static_cast<int>(res.trace.size());
        return res;
    }

    ScaIterate it = *start;
    res.sol = it.sol;
    res.energy = total_energy(it.sol);
    res.trace.push_back({0, res.energy, conic::SolveStatus::optimal, worst_violation(audit(ctx, it.sol)), false});
    res.status = ScaStatus::max_iterations;

    const double tol = ctx.cfg.tol_sca;
    for (int n = 1; n <= ctx.cfg.max_iter_sca; ++n) {
        SocpLayout L;
        const auto prog = build_socp(ctx, it, &L, false);
        const auto out = conic::solve(prog, opt.solver_accuracy);
        if (!out.ok()) {
            res.trace.push_back({n, res.energy, out.status, 0.0, false});
            // The incumbent stays valid; a failed refinement only ends the loop.
            if (out.status == conic::SolveStatus::numerical_failure) {
                res.failed_iteration = n;
                if (n == 1) res.status = ScaStatus::numerical_failure;
            }
            break;
        }
        PowerSolution s = extract(ctx, L, out.x);
        rebalance_split(ctx, s);
        const auto rep = audit(ctx, s);
        const double eta = total_energy(s);
        res.trace.push_back({n, eta, out.status, worst_violation(rep), false});
        if (!rep.ok()) break;  // keep the last audited point
        const double prev = res.energy;
        it = make_iterate(ctx, s);
        res.sol = s;
        res.energy = eta;
        if (std::abs(prev - eta) <= tol) {
            res.status = ScaStatus::converged;
            break;
        }
    }
    return res;
}

}  // namespace crsma
