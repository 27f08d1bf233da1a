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

// Phase block. The slot-1 phases are lifted to V = vbar vbar^H with
// vbar = [conj(phi); 1], so every received power |h_k^H p_j|^2 becomes the
// linear form c^H V c with c = [a; b]. Each DC round is solved in its dual
// LMI form
//
//   max sum_i y_i  s.t.  C - sum_i y_i E_ii - sum_l u_l B_l >= 0,  u_l >= w,
//
// with C = I - v1 v1^H. The LMI multiplier is V: the y columns give it a unit
// diagonal and the u columns give <B_l, V> >= 0, each margin rewarded with
// weight w in the primal objective.

#include "crsma/phase_opt.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace crsma {

PhaseVector closed_form_theta2(cdouble h_12, const CVec& h_1r, const CVec& hhat_r2) {
    if (h_1r.size() != hhat_r2.size()) throw std::invalid_argument("closed_form_theta2: shape mismatch");
    const auto m = h_1r.size();
    PhaseVector th{Eigen::VectorXd::Zero(m)};
    const double ref = h_12 == cdouble(0.0) ? 0.0 : std::arg(h_12);
    for (Eigen::Index i = 0; i < m; ++i) {
        const cdouble prod = h_1r(i) * hhat_r2(i);
        if (prod == cdouble(0.0)) continue;
        double t = std::remainder(ref - std::arg(prod), 2.0 * std::numbers::pi);
        if (t < 0.0) t += 2.0 * std::numbers::pi;
        th.theta(i) = t;
    }
    return th;
}

CMat LiftedConstraint::matrix() const {
    const auto n = signal.size();
    CMat b = signal * signal.adjoint();
    for (const auto& c : interference) b -= mu * (c * c.adjoint());
    b(n - 1, n - 1) -= mu;
    return b / scale;
}

CMat LiftedProblem::q(int k, int j) const {
    const CVec& av = a.at(k).at(j);
    const cdouble bv = b.at(k).at(j);
    CMat out = CMat::Zero(m + 1, m + 1);
    out.topLeftCorner(m, m) = av * av.adjoint();
    out.topRightCorner(m, 1) = av * std::conj(bv);
    out.bottomLeftCorner(1, m) = bv * av.adjoint();
    return out;
}

CVec LiftedProblem::lifted(int k, int j) const {
    CVec c(m + 1);
    c.head(m) = a.at(k).at(j);
    c(m) = b.at(k).at(j);
    return c;
}

double LiftedProblem::power(int k, int j, const CMat& v) const {
    return std::norm(b.at(k).at(j)) + (q(k, j) * v).trace().real();
}

LiftedProblem build_lifted_problem(const ChannelSet& ch, const PowerSolution& sol, const PhaseVector& theta2,
                                   const SystemConfig& cfg, Protocol protocol) {
    const double delta = sol.delta;
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("build_lifted_problem: delta must lie in (0, 1]");
    const double noise = cfg.noise_power();
    const double sigma = std::sqrt(noise);
    LiftedProblem lp;
    lp.m = ch.n_ris();
    const CVec* hr[2] = {&ch.h_r1, &ch.h_r2};
    const CVec* hb[2] = {&ch.h_b1, &ch.h_b2};
    const CVec* p[3] = {&sol.p_c, &sol.p_1, &sol.p_2};
    for (int j = 0; j < 3; ++j) {
        const CVec g = ch.H_br.adjoint() * (*p[j]);
        for (int k = 0; k < 2; ++k) {
            lp.a[k][j] = hr[k]->conjugate().cwiseProduct(g) / sigma;
            lp.b[k][j] = hb[k]->dot(*p[j]) / sigma;
        }
    }
    const double c_sum = sol.c_split[0] + sol.c_split[1];
    lp.r_c2_slot2 = protocol.relaying ? rate_common_slot2(ch, theta2, sol.p_d, delta, noise) : 0.0;
    for (int k = 0; k < 2; ++k)
        lp.mu_p[k] = std::exp2((cfg.rate_thresholds[k] - sol.c_split[k]) / delta) - 1.0;
    lp.mu_c1 = std::exp2(c_sum / delta) - 1.0;
    lp.mu_c2 = std::exp2((c_sum - lp.r_c2_slot2) / delta) - 1.0;

    auto add = [&](std::string name, int k, int j, std::vector<int> others, double mu) {
        if (!(mu > 0.0)) return;
        LiftedConstraint row{std::move(name), lp.lifted(k, j), {}, mu, 1.0};
        for (int o : others)
            if (p[o]->squaredNorm() > 0.0) row.interference.push_back(lp.lifted(k, o));
        lp.rows.push_back(std::move(row));
    };
    add("private_1", 0, 1, {2}, lp.mu_p[0]);
    if (protocol.rate_splitting) add("private_2", 1, 2, {1}, lp.mu_p[1]);
    add("common_1", 0, 0, {1, 2}, lp.mu_c1);
    add("common_2", 1, 0, {1, 2}, lp.mu_c2);
    return lp;
}

CVec lift(const PhaseVector& theta1) {
    const auto m = theta1.size();
    CVec v(m + 1);
    v.head(m) = theta1.phases().conjugate();
    v(m) = 1.0;
    return v;
}

CMat spectral_subgradient(const CMat& v) {
    Eigen::SelfAdjointEigenSolver<CMat> es(v);
    const CVec top = es.eigenvectors().col(v.rows() - 1);
    return top * top.adjoint();
}

double dc_residual(const CMat& v) {
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<CMat>(v, Eigen::EigenvaluesOnly).eigenvalues();
    return std::max(0.0, ev.cwiseAbs().sum() - ev.cwiseAbs().maxCoeff());
}

const char* to_string(DcStatus s) {
    switch (s) {
        case DcStatus::rank_one: return "rank_one";
        case DcStatus::max_iterations: return "max_iterations";
        case DcStatus::infeasible: return "infeasible";
        case DcStatus::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

namespace {

double smallest_margin(const LiftedProblem& lp, const CMat& v) {
    double s = std::numeric_limits<double>::infinity();
    for (const auto& row : lp.rows) s = std::min(s, (row.matrix() * v).trace().real());
    return s;
}

}  // namespace

DcResult dc_rank_one_solve(const LiftedProblem& lp, const CMat& v0, const SystemConfig& cfg, const DcOptions& opt) {
    const int n = lp.m + 1;
    if (v0.rows() != n || v0.cols() != n) throw std::invalid_argument("dc_rank_one_solve: V0 has the wrong order");
    DcResult res;
    res.V = {v0, dc_residual(v0)};
    const int l = static_cast<int>(lp.rows.size());

    // Coefficients that do not change across rounds.
    std::vector<conic::HermitianCoefficient> base;
    std::vector<conic::SelectorCoefficient> selectors;
    for (int i = 0; i < n; ++i) selectors.push_back({i, {i}, CMat::Constant(1, 1, -1.0)});
    for (int r = 0; r < l; ++r) {
        const auto& row = lp.rows[r];
        const int cols = 2 + static_cast<int>(row.interference.size());
        CMat factor = CMat::Zero(n, cols);
        CMat core = CMat::Zero(cols, cols);
        factor.col(0) = row.signal;
        core(0, 0) = -1.0 / row.scale;
        for (int i = 0; i < static_cast<int>(row.interference.size()); ++i) {
            factor.col(1 + i) = row.interference[i];
            core(1 + i, 1 + i) = row.mu / row.scale;
        }
        factor(n - 1, cols - 1) = 1.0;
        core(cols - 1, cols - 1) = row.mu / row.scale;
        base.push_back({n + r, factor, core});
    }

    double weight = l > 0 ? opt.margin_weight : 0.0;
    CMat current = v0;
    for (int r = 1; r <= cfg.max_iter_dc; ++r) {
        const CMat sub = spectral_subgradient(current);
        conic::ConicProgram prog;
        prog.add_variables(n, "y");
        if (l > 0) prog.add_variables(l, "u");
        conic::AffineExpr obj;
        for (int i = 0; i < n; ++i) obj.add(i, -1.0);
        prog.minimize(obj);
        for (int i = 0; i < l; ++i) prog.add_linear(conic::AffineExpr::variable(n + i).add(-weight), "margin");
        prog.add_lmi(CMat::Identity(n, n) - sub, base, selectors, "lifted");

        const auto out = conic::solve(prog, opt.solver_accuracy);
        DcTraceEntry e;
        e.r = r;
        e.weight = weight;
        e.status = out.status;
        if (!out.ok()) {
            res.trace.push_back(e);
            res.status = out.status == conic::SolveStatus::numerical_failure ? DcStatus::numerical_failure
                                                                              : DcStatus::infeasible;
            return res;
        }
        CMat v = out.psd_duals.at(0);
        v = (0.5 * (v + v.adjoint())).eval();
        e.residual = dc_residual(v);
        e.objective = v.trace().real() - (sub * v).trace().real();
        e.margin = l > 0 ? smallest_margin(lp, v) : 0.0;
        res.trace.push_back(e);
        res.V = {v, e.residual};
        current = v;
        if (e.residual <= cfg.zeta_dc) {
            res.status = DcStatus::rank_one;
            return res;
        }
        weight *= opt.weight_decay;
    }
    res.status = DcStatus::max_iterations;
    return res;
}

Extraction extract_phases(const LiftedMatrix& lm) {
    Extraction ex;
    const auto n = lm.V.rows();
    if (n < 1) return ex;
    Eigen::SelfAdjointEigenSolver<CMat> es(lm.V);
    const double top = es.eigenvalues()(n - 1);
    if (!(top > 0.0)) return ex;
    const CVec vbar = std::sqrt(top) * es.eigenvectors().col(n - 1);
    const cdouble corner = vbar(n - 1);
    if (std::abs(corner) < 1e-9) return ex;
    const CVec v = vbar.head(n - 1) / corner;
    CVec phi(n - 1);
    for (Eigen::Index i = 0; i < n - 1; ++i) {
        const double mag = std::abs(v(i));
        ex.projection_error = std::max(ex.projection_error, std::abs(mag - 1.0));
        phi(i) = mag > 0.0 ? std::conj(v(i) / mag) : cdouble(1.0);
    }
    ex.theta = PhaseVector::from_complex(phi);
    ex.ok = true;
    return ex;
}

PhaseStepResult phase_step(const ChannelSet& ch, const PowerSolution& sol, const PhaseVector& theta1,
                           const PhaseVector& theta2, const SystemConfig& cfg, Protocol protocol,
                           const DcOptions& opt) {
    PhaseStepResult out;
    out.theta1 = theta1;
    if (ch.n_ris() == 0) {
        out.reason = "no RIS";
        return out;
    }
    LiftedProblem lp = build_lifted_problem(ch, sol, theta2, cfg, protocol);
    if (lp.rows.empty()) {
        out.reason = "no active rate requirement";
        return out;
    }
    const CVec v0 = lift(theta1);
    for (auto& row : lp.rows) {
        double scale = std::norm(row.signal.dot(v0)) + row.mu;
        for (const auto& c : row.interference) scale += row.mu * std::norm(c.dot(v0));
        row.scale = std::max(scale, 1e-300);
    }
    out.dc = dc_rank_one_solve(lp, v0 * v0.adjoint(), cfg, opt);
    if (out.dc.status == DcStatus::infeasible || out.dc.status == DcStatus::numerical_failure) {
        out.reason = std::string("DC step ") + to_string(out.dc.status);
        return out;
    }
    const Extraction ex = extract_phases(out.dc.V);
    out.projection_error = ex.projection_error;
    if (!ex.ok) {
        out.reason = "phase extraction failed";
        return out;
    }
    const auto rep = check_feasibility(sol, ch, ex.theta, theta2, cfg, protocol);
    out.candidate = ex.theta;
    out.candidate_rate_margin = rep.worst(Margin::Kind::rate);
    if (!rep.ok()) {
        out.reason = "extracted phases violate " + rep.describe_violations();
        return out;
    }
    out.accepted = true;
    out.theta1 = ex.theta;
    return out;
}

}  // namespace crsma
