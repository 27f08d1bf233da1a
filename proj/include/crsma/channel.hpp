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

#include "crsma/config.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>

namespace crsma {

using cdouble = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Rng = std::mt19937_64;

/// One realization of every link. Entries already carry sqrt(path loss).
struct ChannelSet {
    CVec h_b1;     // BS -> near, N_t
    CVec h_b2;     // BS -> far, N_t
    CMat H_br;     // BS -> RIS, N_t x M
    CVec h_r1;     // RIS -> near (slot 1), M
    CVec h_r2;     // RIS -> far (slot 1), M
    CVec hhat_r2;  // RIS -> far (slot 2), M
    CVec h_1r;     // near -> RIS (slot 2), M
    cdouble h_12;  // near -> far

    int n_antennas() const { return static_cast<int>(h_b1.size()); }
    int n_ris() const { return static_cast<int>(H_br.cols()); }
};

/// rho0 * d^-exponent (linear), d >= 1 m.
double path_loss(double distance_m, double exponent, double rho0_db);

double distance(const Vec3& a, const Vec3& b);

/// sqrt(pl) * (sqrt(K/(1+K)) * los + sqrt(1/(1+K)) * G), G ~ CN(0, 1) i.i.d.
CMat sample_rician(int rows, int cols, double rician_factor, double pl, const CMat& los_component, Rng& rng);

/// i.i.d. CN(0, pl) entries.
CMat sample_rayleigh(int rows, int cols, double pl, Rng& rng);

/// Half-wavelength uniform linear array response along the x axis for a
/// wave leaving `from` towards `to`.
CVec ula_response(int n, const Vec3& from, const Vec3& to);

ChannelSet generate_channels(const SystemConfig& cfg, Rng& rng);

/// Seeds derived from (base seed, stream index) for independent draws.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// FNV-1a digest over every stored coefficient; used to audit paired runs.
std::uint64_t channel_digest(const ChannelSet& ch);

/// Same channels with all RIS-side members emptied (M = 0).
ChannelSet without_ris(const ChannelSet& ch);

}  // namespace crsma
