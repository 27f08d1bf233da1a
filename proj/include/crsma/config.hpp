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

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace crsma {

using Vec3 = std::array<double, 3>;

/// Raised for malformed or out-of-range configuration values.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Physical and algorithmic parameters. Fields ending in _db/_dbm are kept as
/// given in the file; the linear accessors are what the numerics use.
struct SystemConfig {
    int n_antennas = 4;
    int n_ris_elements = 40;

    Vec3 pos_bs{0.0, 10.0, 0.0};
    Vec3 pos_ris{80.0, 10.0, 0.0};
    Vec3 pos_near{40.0, 0.0, 0.0};
    Vec3 pos_far{80.0, 0.0, 0.0};

    // Link labels: br (BS-RIS), rf (RIS-far), bf (BS-far), nr (near-RIS),
    // nf (near-far), bn (BS-near).
    std::map<std::string, double> pl_exponents{
        {"br", 2.2}, {"rf", 2.2}, {"bf", 4.0}, {"nr", 3.0}, {"nf", 3.0}, {"bn", 3.5}};

    double rho0_db = -30.0;
    double rician_factor = 3.0;
    double noise_power_db = -120.0;
    double p_bs_dbm = 53.0;
    double p_d2d_dbm = 30.0;
    std::array<double, 2> rate_thresholds{1.0, 3.0};

    std::vector<double> delta_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};

    double tol_sca = 1e-4;
    double tol_ao = 1e-3;
    double zeta_dc = 1e-5;
    int max_iter_sca = 50;
    int max_iter_ao = 20;
    int max_iter_dc = 30;

    std::uint64_t rng_seed = 1;

    double noise_power() const;  // watts
    double p_bs() const;         // watts
    double p_d2d() const;        // watts
    double exponent(const std::string& link) const;

    /// Throws ConfigError naming the first violated invariant.
    void validate() const;
};

double db_to_linear(double db);
double dbm_to_watts(double dbm);

/// Reads a YAML document whose keys mirror the SystemConfig field names.
/// Missing keys keep their defaults; unknown keys are rejected.
SystemConfig load_config(const std::string& path);
SystemConfig parse_config(const std::string& yaml_text);
std::string dump_config(const SystemConfig& cfg);

}  // namespace crsma
