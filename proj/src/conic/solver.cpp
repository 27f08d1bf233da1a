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

// Homogeneous self-dual primal-dual interior-point method for
//     minimize c'x  s.t.  G x + s = h,  A x = b,  s in K.
// The search direction follows the usual conelp recipe: NT scaling,
// reduced KKT system G'(W'W)^{-1}G, Mehrotra predictor-corrector.

#include "crsma/conic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <limits>
#include <optional>

namespace crsma::conic {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Cplx = std::complex<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Dims {
    int lin = 0;
    std::vector<int> soc;
    std::vector<int> psd;
    int dense = 0;   // lin + sum(soc)
    int degree = 0;  // lin + #soc + sum(psd)
};

// Element of the cone space: dense part (orthant then Lorentz blocks) plus
// one Hermitian matrix per PSD block.
struct ConeVec {
    Vec d;
    std::vector<CMat> m;
};

ConeVec zeros(const Dims& dims) {
    ConeVec v;
    v.d = Vec::Zero(dims.dense);
    for (int n : dims.psd) v.m.push_back(CMat::Zero(n, n));
    return v;
}

ConeVec identity(const Dims& dims) {
    ConeVec v = zeros(dims);
    v.d.head(dims.lin).setOnes();
    int off = dims.lin;
    for (int q : dims.soc) {
        v.d(off) = 1.0;
        off += q;
    }
    for (auto& m : v.m) m.setIdentity();
    return v;
}

double real_inner(const CMat& a, const CMat& b) { return (a.conjugate().cwiseProduct(b)).real().sum(); }

double dot(const ConeVec& a, const ConeVec& b) {
    double r = a.d.dot(b.d);
    for (std::size_t k = 0; k < a.m.size(); ++k) r += real_inner(a.m[k], b.m[k]);
    return r;
}

double norm(const ConeVec& a) { return std::sqrt(std::max(0.0, dot(a, a))); }

void axpy(double alpha, const ConeVec& x, ConeVec& y) {
    y.d += alpha * x.d;
    for (std::size_t k = 0; k < y.m.size(); ++k) y.m[k] += alpha * x.m[k];
}

ConeVec scaled(double alpha, ConeVec x) {
    x.d *= alpha;
    for (auto& m : x.m) m *= alpha;
    return x;
}

void hermitize(ConeVec& v) {
    for (auto& m : v.m) m = (0.5 * (m + m.adjoint())).eval();
}

// Smallest "eigenvalue" over all blocks; positive iff interior.
double min_eig(const Dims& dims, const ConeVec& v) {
    double r = kInf;
    if (dims.lin > 0) r = std::min(r, v.d.head(dims.lin).minCoeff());
    int off = dims.lin;
    for (int q : dims.soc) {
        r = std::min(r, v.d(off) - v.d.segment(off + 1, q - 1).norm());
        off += q;
    }
    for (const auto& m : v.m) {
        Eigen::SelfAdjointEigenSolver<CMat> es(m, Eigen::EigenvaluesOnly);
        r = std::min(r, es.eigenvalues()(0));
    }
    return r;
}

// Jordan product u o v.
ConeVec jordan(const Dims& dims, const ConeVec& u, const ConeVec& v) {
    ConeVec r = zeros(dims);
    r.d.head(dims.lin) = u.d.head(dims.lin).cwiseProduct(v.d.head(dims.lin));
    int off = dims.lin;
    for (int q : dims.soc) {
        const auto us = u.d.segment(off, q);
        const auto vs = v.d.segment(off, q);
        r.d(off) = us.dot(vs);
        r.d.segment(off + 1, q - 1) = us(0) * vs.tail(q - 1) + vs(0) * us.tail(q - 1);
        off += q;
    }
    for (std::size_t k = 0; k < r.m.size(); ++k) r.m[k] = 0.5 * (u.m[k] * v.m[k] + v.m[k] * u.m[k]);
    return r;
}

// Scaled point lambda; PSD blocks are diagonal and kept as eigenvalue vectors.
struct Lambda {
    Vec d;
    std::vector<Vec> diag;
};

ConeVec lambda_as_vec(const Dims& dims, const Lambda& lam) {
    ConeVec v = zeros(dims);
    v.d = lam.d;
    for (std::size_t k = 0; k < lam.diag.size(); ++k) v.m[k] = lam.diag[k].cast<Cplx>().asDiagonal();
    return v;
}

// lambda \ v, i.e. the x solving lambda o x = v.
ConeVec lambda_div(const Dims& dims, const Lambda& lam, const ConeVec& v) {
    ConeVec r = zeros(dims);
    r.d.head(dims.lin) = v.d.head(dims.lin).cwiseQuotient(lam.d.head(dims.lin));
    int off = dims.lin;
    for (int q : dims.soc) {
        const auto l = lam.d.segment(off, q);
        const auto vs = v.d.segment(off, q);
        const double det = l(0) * l(0) - l.tail(q - 1).squaredNorm();
        const double x0 = (l(0) * vs(0) - l.tail(q - 1).dot(vs.tail(q - 1))) / det;
        r.d(off) = x0;
        r.d.segment(off + 1, q - 1) = (vs.tail(q - 1) - x0 * l.tail(q - 1)) / l(0);
        off += q;
    }
    for (std::size_t k = 0; k < r.m.size(); ++k) {
        const Vec& l = lam.diag[k];
        const auto n = l.size();
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i) r.m[k](i, j) = v.m[k](i, j) * (2.0 / (l(i) + l(j)));
    }
    return r;
}

// Largest alpha with lambda + alpha * dv in the cone (infinite if unbounded).
double max_step(const Dims& dims, const Lambda& lam, const ConeVec& dv) {
    double alpha = kInf;
    for (int i = 0; i < dims.lin; ++i)
        if (dv.d(i) < 0.0) alpha = std::min(alpha, -lam.d(i) / dv.d(i));
    int off = dims.lin;
    for (int q : dims.soc) {
        const auto l = lam.d.segment(off, q);
        const auto d = dv.d.segment(off, q);
        const double a = d(0) * d(0) - d.tail(q - 1).squaredNorm();
        const double b = l(0) * d(0) - l.tail(q - 1).dot(d.tail(q - 1));
        const double c = l(0) * l(0) - l.tail(q - 1).squaredNorm();
        const double disc = b * b - a * c;
        if (a < 0.0 || (b < 0.0 && disc >= 0.0)) {
            const double denom = -b + std::sqrt(std::max(disc, 0.0));
            if (denom > 0.0) alpha = std::min(alpha, c / denom);
            else alpha = std::min(alpha, 0.0);
        }
        off += q;
    }
    for (std::size_t k = 0; k < dv.m.size(); ++k) {
        const Vec isq = lam.diag[k].cwiseSqrt().cwiseInverse();
        CMat t = isq.cast<Cplx>().asDiagonal() * dv.m[k] * isq.cast<Cplx>().asDiagonal();
        t = (0.5 * (t + t.adjoint())).eval();
        Eigen::SelfAdjointEigenSolver<CMat> es(t, Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues()(0);
        if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
    }
    return alpha;
}

// Nesterov-Todd scaling W with W z = W^{-T} s = lambda.
struct Scaling {
    bool identity = false;
    Vec lin_w;
    struct Soc {
        double beta;
        Vec v;
    };
    std::vector<Soc> soc;
    struct Psd {
        CMat r, rinv, x, xinv;  // x = (r r^H)^{-1}, xinv = r r^H
    };
    std::vector<Psd> psd;
    Lambda lambda;
};

double jnorm(const Eigen::Ref<const Vec>& v) {
    return std::sqrt(std::max(v(0) * v(0) - v.tail(v.size() - 1).squaredNorm(), 1e-300));
}

Scaling identity_scaling(const Dims& dims) {
    Scaling w;
    w.identity = true;
    w.lin_w = Vec::Ones(dims.lin);
    for (int q : dims.soc) {
        Vec v = Vec::Zero(q);
        v(0) = 1.0;
        w.soc.push_back({1.0, v});  // beta (2vv' - J) = I
    }
    for (int n : dims.psd) {
        CMat id = CMat::Identity(n, n);
        w.psd.push_back({id, id, id, id});
    }
    return w;
}

std::optional<Scaling> compute_scaling(const Dims& dims, const ConeVec& s, const ConeVec& z) {
    Scaling w;
    w.lambda.d = Vec::Zero(dims.dense);
    const auto sl = s.d.head(dims.lin);
    const auto zl = z.d.head(dims.lin);
    if (dims.lin > 0 && (sl.minCoeff() <= 0.0 || zl.minCoeff() <= 0.0)) return std::nullopt;
    w.lin_w = sl.cwiseQuotient(zl).cwiseSqrt();
    w.lambda.d.head(dims.lin) = sl.cwiseProduct(zl).cwiseSqrt();
    int off = dims.lin;
    for (int q : dims.soc) {
        const Vec ss = s.d.segment(off, q);
        const Vec zz = z.d.segment(off, q);
        const double aa = jnorm(ss);
        const double bb = jnorm(zz);
        const Vec sb = ss / aa;
        const Vec zb = zz / bb;
        const double gamma = std::sqrt(std::max((1.0 + sb.dot(zb)) / 2.0, 1e-300));
        Vec wb = sb;
        wb(0) += zb(0);
        wb.tail(q - 1) -= zb.tail(q - 1);
        wb /= 2.0 * gamma;
        Vec v = wb;
        v(0) += 1.0;
        v /= std::sqrt(2.0 * (wb(0) + 1.0));
        const double beta = std::sqrt(aa / bb);
        // lambda = W z
        const double vz = v.dot(zz);
        Vec lz = 2.0 * vz * v;
        lz(0) -= zz(0);
        lz.tail(q - 1) += zz.tail(q - 1);
        w.lambda.d.segment(off, q) = beta * lz;
        w.soc.push_back({beta, v});
        off += q;
    }
    for (std::size_t k = 0; k < s.m.size(); ++k) {
        Eigen::LLT<CMat> ls(s.m[k]);
        Eigen::LLT<CMat> lz(z.m[k]);
        if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return std::nullopt;
        const CMat lsm = ls.matrixL();
        const CMat lzm = lz.matrixL();
        Eigen::BDCSVD<CMat> svd(lzm.adjoint() * lsm, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Vec sv = svd.singularValues();
        if (sv.minCoeff() <= 0.0) return std::nullopt;
        const Vec isq = sv.cwiseSqrt().cwiseInverse();
        Scaling::Psd p;
        p.r = lsm * svd.matrixV() * isq.cast<Cplx>().asDiagonal();
        p.rinv = isq.cast<Cplx>().asDiagonal() * svd.matrixU().adjoint() * lzm.adjoint();
        p.x = p.rinv.adjoint() * p.rinv;
        p.xinv = p.r * p.r.adjoint();
        w.psd.push_back(std::move(p));
        w.lambda.diag.push_back(sv);
    }
    return w;
}

// y = W v (transposed = false) or W' v; W is symmetric on orthant/Lorentz blocks.
ConeVec apply_w(const Dims& dims, const Scaling& w, const ConeVec& v, bool transposed) {
    ConeVec r = zeros(dims);
    r.d.head(dims.lin) = w.lin_w.cwiseProduct(v.d.head(dims.lin));
    int off = dims.lin;
    for (std::size_t k = 0; k < dims.soc.size(); ++k) {
        const int q = dims.soc[k];
        const auto& sc = w.soc[k];
        const Vec x = v.d.segment(off, q);
        Vec y = 2.0 * sc.v.dot(x) * sc.v;
        y(0) -= x(0);
        y.tail(q - 1) += x.tail(q - 1);
        r.d.segment(off, q) = sc.beta * y;
        off += q;
    }
    for (std::size_t k = 0; k < dims.psd.size(); ++k) {
        if (v.m[k].size() == 0) continue;  // dense-only application
        const auto& p = w.psd[k];
        r.m[k] = transposed ? CMat(p.r * v.m[k] * p.r.adjoint()) : CMat(p.r.adjoint() * v.m[k] * p.r);
    }
    return r;
}

// y = W^{-1} v (transposed = false) or W^{-T} v.
ConeVec apply_winv(const Dims& dims, const Scaling& w, const ConeVec& v, bool transposed) {
    ConeVec r = zeros(dims);
    r.d.head(dims.lin) = v.d.head(dims.lin).cwiseQuotient(w.lin_w);
    int off = dims.lin;
    for (std::size_t k = 0; k < dims.soc.size(); ++k) {
        const int q = dims.soc[k];
        const auto& sc = w.soc[k];
        Vec x = v.d.segment(off, q);
        // (1/beta) (2 J v v' J - J) x
        Vec jv = sc.v;
        jv.tail(q - 1) *= -1.0;
        Vec y = 2.0 * jv.dot(x) * jv;
        y(0) -= x(0);
        y.tail(q - 1) += x.tail(q - 1);
        r.d.segment(off, q) = y / sc.beta;
        off += q;
    }
    for (std::size_t k = 0; k < dims.psd.size(); ++k) {
        const auto& p = w.psd[k];
        r.m[k] = transposed ? CMat(p.rinv * v.m[k] * p.rinv.adjoint()) : CMat(p.rinv.adjoint() * v.m[k] * p.rinv);
    }
    return r;
}

}  // namespace

// Compiled standard form. Dense rows hold the orthant and Lorentz blocks; PSD
// blocks keep their coefficients in factored form.
class StandardForm {
public:
    struct Column {
        int var;
        bool selector;
        std::vector<int> index;
        CMat factor;
        CMat core;  // G column is factor * core * factor^H (already negated)
    };
    struct PsdBlock {
        int order;
        CMat h;
        std::vector<Column> cols;
    };

    explicit StandardForm(const ConicProgram& p);

    int n = 0;
    Vec c;
    double c0 = 0.0;
    Mat a;
    Vec b;
    Mat gd;
    Vec hd;
    std::vector<PsdBlock> psd;
    Dims dims;
    std::vector<int> soc_offsets;

    Vec g_transpose(const ConeVec& z) const {
        Vec r = gd.transpose() * z.d;
        for (std::size_t k = 0; k < psd.size(); ++k)
            for (const auto& col : psd[k].cols) r(col.var) += column_inner(col, z.m[k]);
        return r;
    }

    ConeVec g_times(const Vec& x) const {
        ConeVec r;
        r.d = gd * x;
        for (const auto& blk : psd) {
            CMat m = CMat::Zero(blk.order, blk.order);
            for (const auto& col : blk.cols) add_column(col, x(col.var), m);
            r.m.push_back(std::move(m));
        }
        return r;
    }

    ConeVec h_vec() const {
        ConeVec r;
        r.d = hd;
        for (const auto& blk : psd) r.m.push_back(blk.h);
        return r;
    }

    static double column_inner(const Column& col, const CMat& z) {
        // Re tr(U M U^H Z) = Re sum_ab M_ab (U^H Z U)_ba
        if (col.selector) {
            double r = 0.0;
            const auto r_ = static_cast<Eigen::Index>(col.index.size());
            for (Eigen::Index a = 0; a < r_; ++a)
                for (Eigen::Index bb = 0; bb < r_; ++bb)
                    r += (col.core(a, bb) * z(col.index[bb], col.index[a])).real();
            return r;
        }
        const CMat k = col.factor.adjoint() * z * col.factor;
        return (col.core.cwiseProduct(k.transpose())).real().sum();
    }

    static void add_column(const Column& col, double coef, CMat& m) {
        if (coef == 0.0) return;
        if (col.selector) {
            const auto r_ = static_cast<Eigen::Index>(col.index.size());
            for (Eigen::Index a = 0; a < r_; ++a)
                for (Eigen::Index bb = 0; bb < r_; ++bb) m(col.index[a], col.index[bb]) += coef * col.core(a, bb);
            return;
        }
        m += coef * (col.factor * col.core * col.factor.adjoint());
    }
};

StandardForm::StandardForm(const ConicProgram& p) {
    n = p.num_variables();
    c = Vec::Zero(n);
    for (const auto& t : p.objective_.terms) c(t.var) += t.coef;
    c0 = p.objective_.constant;

    const int neq = static_cast<int>(p.equalities_.size());
    a = Mat::Zero(neq, n);
    b = Vec::Zero(neq);
    for (int i = 0; i < neq; ++i) {
        for (const auto& t : p.equalities_[i].terms) a(i, t.var) += t.coef;
        b(i) = -p.equalities_[i].constant;
    }

    dims.lin = static_cast<int>(p.linear_.size());
    int rows = dims.lin;
    for (const auto& s : p.socs_) {
        const int q = 1 + static_cast<int>(s.body.size());
        dims.soc.push_back(q);
        soc_offsets.push_back(rows);
        rows += q;
    }
    dims.dense = rows;
    gd = Mat::Zero(rows, n);
    hd = Vec::Zero(rows);
    // s = h - G x equals the affine expression, so G = -coef and h = constant.
    auto put = [&](int row, const AffineExpr& e) {
        for (const auto& t : e.terms) gd(row, t.var) -= t.coef;
        hd(row) = e.constant;
    };
    for (int i = 0; i < dims.lin; ++i) put(i, p.linear_[i]);
    for (std::size_t k = 0; k < p.socs_.size(); ++k) {
        int row = soc_offsets[k];
        put(row++, p.socs_[k].bound);
        for (const auto& e : p.socs_[k].body) put(row++, e);
    }
    for (const auto& l : p.lmis_) {
        PsdBlock blk;
        blk.order = static_cast<int>(l.constant.rows());
        blk.h = l.constant;
        for (const auto& t : l.terms) blk.cols.push_back({t.var, false, {}, t.factor, -t.core});
        for (const auto& s : l.selectors) blk.cols.push_back({s.var, true, s.index, CMat{}, -s.core});
        dims.psd.push_back(blk.order);
        psd.push_back(std::move(blk));
    }
    dims.degree = dims.lin + static_cast<int>(dims.soc.size());
    for (int o : dims.psd) dims.degree += o;
}

namespace {

// Reduced KKT system
//   [ 0   A'  G'    ] [dx]   [r1]
//   [ A   0   0     ] [dy] = [r2]
//   [ G   0  -W'W   ] [dz]   [r3]
class Kkt {
public:
    Kkt(const StandardForm& sf, const Dims& dims) : sf_(sf), dims_(dims) {}

    bool factor(const Scaling& w) {
        w_ = &w;
        const int n = sf_.n;
        Mat h = Mat::Zero(n, n);
        // Dense rows: scale by W^{-T} blockwise.
        if (sf_.gd.rows() > 0) {
            Mat gs(sf_.gd.rows(), n);
            for (int i = 0; i < dims_.lin; ++i) gs.row(i) = sf_.gd.row(i) / w.lin_w(i);
            int off = dims_.lin;
            for (std::size_t k = 0; k < dims_.soc.size(); ++k) {
                const int q = dims_.soc[k];
                const auto& sc = w.soc[k];
                Vec jv = sc.v;
                jv.tail(q - 1) *= -1.0;
                const Mat blk = sf_.gd.middleRows(off, q);
                Mat y = 2.0 * jv * (jv.transpose() * blk);
                y.row(0) -= blk.row(0);
                y.bottomRows(q - 1) += blk.bottomRows(q - 1);
                gs.middleRows(off, q) = y / sc.beta;
                off += q;
            }
            h.noalias() += gs.transpose() * gs;
        }
        // PSD blocks: H_ij += Re tr(G_i X G_j X).
        for (std::size_t k = 0; k < sf_.psd.size(); ++k) {
            const auto& blk = sf_.psd[k];
            const CMat& x = w.psd[k].x;
            const auto ncols = blk.cols.size();
            std::vector<CMat> xu(ncols);
            for (std::size_t j = 0; j < ncols; ++j) {
                const auto& col = blk.cols[j];
                if (col.selector) {
                    xu[j].resize(x.rows(), static_cast<Eigen::Index>(col.index.size()));
                    for (std::size_t t = 0; t < col.index.size(); ++t) xu[j].col(t) = x.col(col.index[t]);
                } else {
                    xu[j] = x * col.factor;
                }
            }
            for (std::size_t i = 0; i < ncols; ++i) {
                const auto& ci = blk.cols[i];
                for (std::size_t j = i; j < ncols; ++j) {
                    const auto& cj = blk.cols[j];
                    CMat kij;
                    if (ci.selector) {
                        kij.resize(static_cast<Eigen::Index>(ci.index.size()), xu[j].cols());
                        for (std::size_t t = 0; t < ci.index.size(); ++t) kij.row(t) = xu[j].row(ci.index[t]);
                    } else {
                        kij = ci.factor.adjoint() * xu[j];
                    }
                    // Re tr(M_i K_ij M_j K_ij^H)
                    const CMat t1 = ci.core * kij * cj.core;
                    const double val = (t1.cwiseProduct(kij.conjugate())).real().sum();
                    h(ci.var, cj.var) += val;
                    if (ci.var != cj.var || i != j) {
                        if (i != j) h(cj.var, ci.var) += val;
                    }
                }
            }
        }
        // Each unordered pair (i<j) contributes to both (vi,vj) and (vj,vi); a
        // pair with vi == vj therefore lands twice on the diagonal, as it should.
        h = (0.5 * (h + h.transpose())).eval();
        return factor_reduced(h);
    }

    struct Solution {
        Vec x, y;
        ConeVec z;
    };

    Solution solve(const Vec& r1, const Vec& r2, const ConeVec& r3) const {
        Solution s = solve_once(r1, r2, r3);
        // Iterative refinement on the unreduced system, stopped once the
        // residual reaches rounding level or stops shrinking.
        const double rhs = std::max({1.0, r1.lpNorm<Eigen::Infinity>(), r2.size() ? r2.lpNorm<Eigen::Infinity>() : 0.0,
                                     norm(r3)});
        double last = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 4; ++it) {
            Vec e1 = r1 - sf_.a.transpose() * s.y - sf_.g_transpose(s.z);
            Vec e2 = r2 - sf_.a * s.x;
            ConeVec e3 = r3;
            axpy(-1.0, sf_.g_times(s.x), e3);
            axpy(1.0, wtw(s.z), e3);
            const double err = std::max({e1.size() ? e1.lpNorm<Eigen::Infinity>() : 0.0,
                                         e2.size() ? e2.lpNorm<Eigen::Infinity>() : 0.0, norm(e3)});
            if (!(err > 1e-14 * rhs) || !(err < 0.5 * last)) break;
            last = err;
            Solution c = solve_once(e1, e2, e3);
            s.x += c.x;
            s.y += c.y;
            axpy(1.0, c.z, s.z);
        }
        return s;
    }

private:
    ConeVec wtw(const ConeVec& v) const {
        ConeVec r = zeros(dims_);
        if (dims_.dense > 0) {
            ConeVec d = v;
            d.m.clear();
            for (std::size_t k = 0; k < dims_.psd.size(); ++k) d.m.push_back(CMat::Zero(0, 0));
            Dims dd = dims_;
            std::fill(dd.psd.begin(), dd.psd.end(), 0);
            r.d = apply_w(dd, *w_, apply_w(dd, *w_, d, false), true).d;
        }
        for (std::size_t k = 0; k < dims_.psd.size(); ++k) r.m[k] = w_->psd[k].xinv * v.m[k] * w_->psd[k].xinv;
        return r;
    }
    ConeVec wtw_inv(const ConeVec& v) const {
        ConeVec r = zeros(dims_);
        r.d.head(dims_.lin) = v.d.head(dims_.lin).cwiseQuotient(w_->lin_w.cwiseAbs2());
        if (!dims_.soc.empty()) {
            ConeVec t = apply_winv(dims_, *w_, v, true);
            t = apply_winv(dims_, *w_, t, false);
            r.d.tail(dims_.dense - dims_.lin) = t.d.tail(dims_.dense - dims_.lin);
        }
        for (std::size_t k = 0; k < dims_.psd.size(); ++k) r.m[k] = w_->psd[k].x * v.m[k] * w_->psd[k].x;
        return r;
    }

    bool factor_reduced(const Mat& h) {
        const int n = sf_.n;
        const Eigen::Index p = sf_.a.rows();
        Mat ht = h;
        if (p > 0) ht.noalias() += sf_.a.transpose() * sf_.a;
        const double scale = std::max(1.0, ht.diagonal().cwiseAbs().maxCoeff());
        double reg = 0.0;
        for (int attempt = 0; attempt < 8; ++attempt) {
            Mat m = ht;
            if (reg > 0.0) m.diagonal().array() += reg;
            llt_.compute(m);
            if (llt_.info() == Eigen::Success) break;
            reg = (reg == 0.0) ? 1e-14 * scale : reg * 100.0;
            if (attempt == 7) return false;
        }
        (void)n;
        if (p > 0) {
            const Mat hinv_at = llt_.solve(sf_.a.transpose());
            Mat schur = sf_.a * hinv_at;
            schur = (0.5 * (schur + schur.transpose())).eval();
            // Redundant equalities make the Schur complement singular; a tiny
            // shift plus iterative refinement keeps the direction accurate.
            const double sscale = std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
            double sreg = 1e-13 * sscale;
            for (int attempt = 0;; ++attempt) {
                Mat m = schur;
                m.diagonal().array() += sreg;
                schur_.compute(m);
                if (schur_.info() == Eigen::Success) break;
                if (attempt == 6) return false;
                sreg *= 100.0;
            }
        }
        return true;
    }

    Solution solve_once(const Vec& r1, const Vec& r2, const ConeVec& r3) const {
        Solution s;
        const ConeVec t = wtw_inv(r3);
        Vec f = r1 + sf_.g_transpose(t);
        if (sf_.a.rows() > 0) {
            const Vec g = r2;
            const Vec rhs = f + sf_.a.transpose() * g;
            const Vec hinv_rhs = llt_.solve(rhs);
            s.y = schur_.solve(sf_.a * hinv_rhs - g);
            s.x = llt_.solve(rhs - sf_.a.transpose() * s.y);
        } else {
            s.y = Vec::Zero(0);
            s.x = llt_.solve(f);
        }
        ConeVec gx = sf_.g_times(s.x);
        axpy(-1.0, r3, gx);
        s.z = wtw_inv(gx);
        return s;
    }

    const StandardForm& sf_;
    const Dims& dims_;
    const Scaling* w_ = nullptr;
    Eigen::LLT<Mat> llt_;
    Eigen::LLT<Mat> schur_;
};

void shift_into_cone(const Dims& dims, ConeVec& v) {
    const double nrm = norm(v);
    const double t = -min_eig(dims, v);
    if (t >= -1e-8 * std::max(nrm, 1.0)) axpy(1.0 + t, identity(dims), v);
}

}  // namespace

SolveOutcome solve(const ConicProgram& program, double accuracy) {
    SolverSettings s;
    s.accuracy = accuracy;
    return solve(program, s);
}

SolveOutcome solve(const ConicProgram& program, const SolverSettings& settings) {
    const auto t_start = std::chrono::steady_clock::now();
    SolveOutcome out;
    auto finish = [&](SolveStatus st) {
        out.status = st;
        out.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        if (st != SolveStatus::optimal) {
            out.x.resize(0);
            out.linear_duals.clear();
            out.equality_duals.clear();
            out.cone_duals.clear();
            out.psd_duals.clear();
        }
        return out;
    };

    const StandardForm sf(program);
    const Dims& dims = sf.dims;
    const int n = sf.n;
    const double feastol = settings.accuracy;
    const double reltol = settings.accuracy;
    const double abstol = settings.accuracy;

    if (n == 0) {
        // Nothing to optimize: feasibility of the constant data decides.
        ConeVec h = sf.h_vec();
        const bool feasible = (dims.dense + static_cast<int>(dims.psd.size()) == 0 || min_eig(dims, h) >= -feastol) &&
                              (sf.b.size() == 0 || sf.b.cwiseAbs().maxCoeff() <= feastol);
        out.objective = sf.c0;
        out.x = Vec::Zero(0);
        return finish(feasible ? SolveStatus::optimal : SolveStatus::infeasible);
    }

    Kkt kkt(sf, dims);
    Scaling w = identity_scaling(dims);
    if (!kkt.factor(w)) return finish(SolveStatus::numerical_failure);

    const ConeVec hvec = sf.h_vec();
    const ConeVec zero_cone = zeros(dims);
    const Vec zero_x = Vec::Zero(n);
    const Vec zero_y = Vec::Zero(sf.b.size());

    // Primal start: least-norm slack; dual start: least-norm z.
    auto p0 = kkt.solve(zero_x, sf.b, hvec);
    Vec x = p0.x;
    ConeVec s = scaled(-1.0, p0.z);
    auto d0 = kkt.solve(-sf.c, zero_y, zero_cone);
    Vec y = d0.y;
    ConeVec z = d0.z;
    shift_into_cone(dims, s);
    shift_into_cone(dims, z);
    double tau = 1.0;
    double kappa = 1.0;

    auto accept = [&](const Vec& xa, const Vec& ya, const ConeVec& za, double ta) {
        out.x = xa / ta;
        out.objective = sf.c.dot(out.x) + sf.c0;
        const ConeVec zn = scaled(1.0 / ta, za);
        for (int i = 0; i < dims.lin; ++i) out.linear_duals.push_back(zn.d(i));
        for (std::size_t k = 0; k < dims.soc.size(); ++k)
            out.cone_duals.push_back(zn.d.segment(sf.soc_offsets[k], dims.soc[k]));
        out.psd_duals = zn.m;
        for (Eigen::Index i = 0; i < ya.size(); ++i) out.equality_duals.push_back(ya(i) / ta);
        return finish(SolveStatus::optimal);
    };
    struct Best {
        double score = kInf, pres = 0.0, dres = 0.0, gap = 0.0;
        Vec x, y;
        ConeVec z;
        double tau = 1.0;
    } best;
    const double loose = settings.relaxed_factor * settings.accuracy;

    const double resx0 = std::max(1.0, sf.c.norm());
    const double resy0 = std::max(1.0, sf.b.norm());
    const double resz0 = std::max(1.0, norm(hvec));
    const ConeVec e = identity(dims);

    for (int iter = 0; iter <= settings.max_iterations; ++iter) {
        out.iterations = iter;
        // Residuals.
        const ConeVec gtz_src = z;
        const Vec gtz = sf.g_transpose(z);
        const Vec aty = sf.a.transpose() * y;
        const Vec ax = sf.a * x;
        ConeVec gx = sf.g_times(x);

        const Vec rx = aty + gtz + tau * sf.c;
        const Vec ry = -ax + tau * sf.b;
        ConeVec rz = s;
        axpy(1.0, gx, rz);
        axpy(-tau, hvec, rz);
        const double cx = sf.c.dot(x);
        const double by = sf.b.dot(y);
        const double hz = dot(hvec, z);
        const double rtau = kappa + cx + by + hz;

        const double gap = dot(s, z);
        const double mu = (gap + tau * kappa) / (dims.degree + 1);
        const double pcost = cx / tau;
        const double dcost = -(by + hz) / tau;
        const double pres = std::max(ry.norm() / tau / resy0, norm(rz) / tau / resz0);
        const double dres = rx.norm() / tau / resx0;
        const double gap_n = gap / (tau * tau);
        double relgap = kInf;
        if (pcost < 0.0) relgap = gap_n / -pcost;
        else if (dcost > 0.0) relgap = gap_n / dcost;
        out.primal_residual = pres;
        out.dual_residual = dres;
        out.gap = gap_n;

        if (!std::isfinite(pres) || !std::isfinite(dres) || !std::isfinite(gap_n)) break;
        if (pres <= feastol && dres <= feastol && (gap_n <= abstol || relgap <= reltol)) {
            out.primal_residual = pres;
            out.dual_residual = dres;
            out.gap = gap_n;
            return accept(x, y, z, tau);
        }
        // Late-stage ill-conditioning can stall the residuals short of the
        // target; remember the best point that meets the relaxed tolerance.
        const double score = std::max({pres, dres, std::min(gap_n, relgap)});
        if (pres <= loose && dres <= loose && (gap_n <= loose || relgap <= loose) && score < best.score)
            best = {score, pres, dres, gap_n, x, y, z, tau};
        if (hz + by < 0.0) {
            ConeVec gz = z;
            const double pinfres = (aty + gtz).norm() / resx0 / -(hz + by);
            if (pinfres <= feastol) return finish(SolveStatus::infeasible);
        }
        if (cx < 0.0) {
            ConeVec gxs = gx;
            axpy(1.0, s, gxs);
            const double dinfres = std::max(ax.norm() / resy0, norm(gxs) / resz0) / -cx;
            if (dinfres <= feastol) return finish(SolveStatus::unbounded);
        }
        if (iter == settings.max_iterations) break;

        auto ws = compute_scaling(dims, s, z);
        if (!ws) break;
        w = std::move(*ws);
        if (!kkt.factor(w)) break;
        const ConeVec lam = lambda_as_vec(dims, w.lambda);
        const ConeVec lam_sq = jordan(dims, lam, lam);

        const auto sol1 = kkt.solve(-sf.c, sf.b, hvec);
        const double denom = sf.c.dot(sol1.x) + sf.b.dot(sol1.y) + dot(hvec, sol1.z) - kappa / tau;

        double sigma = 0.0;
        ConeVec ds_a, dz_a;
        double dtau_a = 0.0, dkappa_a = 0.0;
        Vec dx, dy;
        ConeVec dz, ds_scaled, dz_scaled;
        double dtau = 0.0, dkappa = 0.0, step = 0.0;

        for (int pass = 0; pass < 2; ++pass) {
            const bool affine = (pass == 0);
            const double rho = affine ? 1.0 : 1.0 - sigma;
            ConeVec dsc = lam_sq;
            double dkc = tau * kappa;
            if (!affine) {
                axpy(-sigma * mu, e, dsc);
                axpy(1.0, jordan(dims, ds_a, dz_a), dsc);
                dkc += -sigma * mu + dtau_a * dkappa_a;
            }
            const ConeVec ldiv = lambda_div(dims, w.lambda, dsc);
            ConeVec r3 = scaled(-rho, rz);
            axpy(1.0, apply_w(dims, w, ldiv, true), r3);
            const auto sol2 = kkt.solve(-rho * rx, rho * ry, r3);
            dtau = (-rho * rtau + dkc / tau -
                    (sf.c.dot(sol2.x) + sf.b.dot(sol2.y) + dot(hvec, sol2.z))) / denom;
            dx = sol2.x + dtau * sol1.x;
            dy = sol2.y + dtau * sol1.y;
            dz = sol2.z;
            axpy(dtau, sol1.z, dz);
            dkappa = (-dkc - kappa * dtau) / tau;
            dz_scaled = apply_w(dims, w, dz, false);
            ds_scaled = scaled(-1.0, ldiv);
            axpy(-1.0, dz_scaled, ds_scaled);

            double amax = std::min(max_step(dims, w.lambda, ds_scaled), max_step(dims, w.lambda, dz_scaled));
            if (dtau < 0.0) amax = std::min(amax, -tau / dtau);
            if (dkappa < 0.0) amax = std::min(amax, -kappa / dkappa);
            if (affine) {
                const double a_aff = std::min(1.0, amax);
                sigma = std::pow(1.0 - a_aff, 3);
                ds_a = ds_scaled;
                dz_a = dz_scaled;
                dtau_a = dtau;
                dkappa_a = dkappa;
            } else {
                step = std::min(1.0, settings.step_fraction * amax);
            }
        }
        if (!(step > 0.0) || !std::isfinite(step)) break;

        const ConeVec ds = apply_w(dims, w, ds_scaled, true);
        x += step * dx;
        y += step * dy;
        axpy(step, ds, s);
        axpy(step, dz, z);
        hermitize(s);
        hermitize(z);
        tau += step * dtau;
        kappa += step * dkappa;
        (void)gtz_src;
    }
    if (best.score < kInf) {
        out.primal_residual = best.pres;
        out.dual_residual = best.dres;
        out.gap = best.gap;
        return accept(best.x, best.y, best.z, best.tau);
    }
    return finish(SolveStatus::numerical_failure);
}

}  // namespace crsma::conic
