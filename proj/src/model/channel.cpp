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

#include "crsma/channel.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

namespace crsma {

double path_loss(double distance_m, double exponent, double rho0_db) {
    if (!(distance_m > 0.0)) throw std::domain_error("path_loss: distance must be positive");
    if (distance_m < 1.0) throw std::domain_error("path_loss: distance below the 1 m reference");
    return db_to_linear(rho0_db) * std::pow(distance_m, -exponent);
}

double distance(const Vec3& a, const Vec3& b) {
    return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

CMat sample_rayleigh(int rows, int cols, double pl, Rng& rng) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("sample_rayleigh: negative shape");
    if (!(pl >= 0.0)) throw std::domain_error("sample_rayleigh: path loss must be >= 0");
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    CMat out(rows, cols);
    const double amp = std::sqrt(pl);
    // Column-major fill keeps the draw order independent of Eigen internals.
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) {
            const double re = g(rng);
            const double im = g(rng);
            out(r, c) = amp * cdouble(re, im);
        }
    return out;
}

CMat sample_rician(int rows, int cols, double rician_factor, double pl, const CMat& los_component, Rng& rng) {
    if (!(rician_factor >= 0.0)) throw std::domain_error("sample_rician: rician factor must be >= 0");
    if (los_component.rows() != rows || los_component.cols() != cols)
        throw std::invalid_argument("sample_rician: LoS component shape mismatch");
    const CMat scatter = sample_rayleigh(rows, cols, 1.0, rng);
    if (std::isinf(rician_factor)) return std::sqrt(pl) * los_component;
    const double w_los = std::sqrt(rician_factor / (1.0 + rician_factor));
    const double w_nlos = std::sqrt(1.0 / (1.0 + rician_factor));
    return std::sqrt(pl) * (w_los * los_component + w_nlos * scatter);
}

CVec ula_response(int n, const Vec3& from, const Vec3& to) {
    CVec a(n);
    const double d = distance(from, to);
    const double cos_psi = d > 0.0 ? (to[0] - from[0]) / d : 1.0;
    for (int i = 0; i < n; ++i) a(i) = std::polar(1.0, std::numbers::pi * i * cos_psi);
    return a;
}

ChannelSet generate_channels(const SystemConfig& cfg, Rng& rng) {
    const int nt = cfg.n_antennas;
    const int m = cfg.n_ris_elements;
    const double rho0 = cfg.rho0_db;
    const double k = cfg.rician_factor;

    const double pl_bn = path_loss(distance(cfg.pos_bs, cfg.pos_near), cfg.exponent("bn"), rho0);
    const double pl_bf = path_loss(distance(cfg.pos_bs, cfg.pos_far), cfg.exponent("bf"), rho0);
    const double pl_br = path_loss(distance(cfg.pos_bs, cfg.pos_ris), cfg.exponent("br"), rho0);
    const double pl_rf = path_loss(distance(cfg.pos_ris, cfg.pos_far), cfg.exponent("rf"), rho0);
    const double pl_nr = path_loss(distance(cfg.pos_near, cfg.pos_ris), cfg.exponent("nr"), rho0);
    const double pl_nf = path_loss(distance(cfg.pos_near, cfg.pos_far), cfg.exponent("nf"), rho0);

    ChannelSet ch;
    // Fixed draw order: direct links, then RIS links, then the D2D link.
    ch.h_b1 = sample_rayleigh(nt, 1, pl_bn, rng).col(0);
    ch.h_b2 = sample_rayleigh(nt, 1, pl_bf, rng).col(0);
    const CMat los_br = ula_response(nt, cfg.pos_bs, cfg.pos_ris) * ula_response(m, cfg.pos_ris, cfg.pos_bs).adjoint();
    ch.H_br = sample_rician(nt, m, k, pl_br, los_br, rng);
    // The RIS-to-near link shares the near-RIS distance; its exponent is the
    // near-RIS one from the table.
    ch.h_r1 = sample_rayleigh(m, 1, pl_nr, rng).col(0);
    const CMat los_rf = ula_response(m, cfg.pos_ris, cfg.pos_far);
    ch.h_r2 = sample_rician(m, 1, k, pl_rf, los_rf, rng).col(0);
    ch.hhat_r2 = sample_rician(m, 1, k, pl_rf, los_rf, rng).col(0);
    ch.h_1r = sample_rayleigh(m, 1, pl_nr, rng).col(0);
    ch.h_12 = sample_rayleigh(1, 1, pl_nf, rng)(0, 0);
    return ch;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    // splitmix64 over a combination of both inputs
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ULL;
    }
}

void fnv_complex(std::uint64_t& h, const cdouble* data, Eigen::Index n) {
    fnv_bytes(h, &n, sizeof(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = data[i].real();
        const double im = data[i].imag();
        fnv_bytes(h, &re, sizeof(re));
        fnv_bytes(h, &im, sizeof(im));
    }
}

}  // namespace

std::uint64_t channel_digest(const ChannelSet& ch) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    fnv_complex(h, ch.h_b1.data(), ch.h_b1.size());
    fnv_complex(h, ch.h_b2.data(), ch.h_b2.size());
    fnv_complex(h, ch.H_br.data(), ch.H_br.size());
    fnv_complex(h, ch.h_r1.data(), ch.h_r1.size());
    fnv_complex(h, ch.h_r2.data(), ch.h_r2.size());
    fnv_complex(h, ch.hhat_r2.data(), ch.hhat_r2.size());
    fnv_complex(h, ch.h_1r.data(), ch.h_1r.size());
    fnv_complex(h, &ch.h_12, 1);
    return h;
}

ChannelSet without_ris(const ChannelSet& ch) {
    ChannelSet out = ch;
    const int nt = ch.n_antennas();
    out.H_br = CMat(nt, 0);
    out.h_r1 = CVec(0);
    out.h_r2 = CVec(0);
    out.hhat_r2 = CVec(0);
    out.h_1r = CVec(0);
    return out;
}

}  // namespace crsma
