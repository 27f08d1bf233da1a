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

#include "crsma/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace crsma {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double SystemConfig::noise_power() const { return db_to_linear(noise_power_db); }
double SystemConfig::p_bs() const { return dbm_to_watts(p_bs_dbm); }
double SystemConfig::p_d2d() const { return dbm_to_watts(p_d2d_dbm); }

double SystemConfig::exponent(const std::string& link) const {
    const auto it = pl_exponents.find(link);
    if (it == pl_exponents.end()) throw ConfigError("missing path-loss exponent for link '" + link + "'");
    return it->second;
}

void SystemConfig::validate() const {
    if (n_antennas < 1) throw ConfigError("n_antennas must be >= 1");
    if (n_ris_elements < 0) throw ConfigError("n_ris_elements must be >= 0");
    for (const char* link : {"br", "rf", "bf", "nr", "nf", "bn"}) {
        const double e = exponent(link);
        if (!std::isfinite(e) || e < 0.0) throw ConfigError(std::string("path-loss exponent '") + link + "' must be >= 0");
    }
    if (!(rician_factor >= 0.0)) throw ConfigError("rician_factor must be >= 0");
    if (!(noise_power() > 0.0) || !std::isfinite(noise_power())) throw ConfigError("noise power must be positive");
    if (!(p_bs() > 0.0) || !std::isfinite(p_bs())) throw ConfigError("p_bs_dbm must give a positive budget");
    if (!(p_d2d() > 0.0) || !std::isfinite(p_d2d())) throw ConfigError("p_d2d_dbm must give a positive budget");
    for (double r : rate_thresholds)
        if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("rate thresholds must be finite and >= 0");
    if (delta_grid.empty()) throw ConfigError("delta_grid must not be empty");
    for (std::size_t i = 0; i < delta_grid.size(); ++i) {
        const double d = delta_grid[i];
        if (!(d > 0.0 && d <= 1.0)) throw ConfigError("delta_grid entries must lie in (0, 1]");
        if (i > 0 && !(d > delta_grid[i - 1])) throw ConfigError("delta_grid must be strictly increasing");
    }
    if (!(tol_sca > 0.0) || !(tol_ao > 0.0) || !(zeta_dc > 0.0)) throw ConfigError("tolerances must be positive");
    if (max_iter_sca < 1 || max_iter_ao < 1 || max_iter_dc < 1) throw ConfigError("iteration limits must be >= 1");
}

namespace {

Vec3 read_vec3(const YAML::Node& n, const std::string& key) {
    if (!n.IsSequence() || n.size() != 3) throw ConfigError(key + " must be a 3-element list");
    return {n[0].as<double>(), n[1].as<double>(), n[2].as<double>()};
}

void apply(const YAML::Node& root, SystemConfig& c) {
    if (!root || root.IsNull()) return;
    if (!root.IsMap()) throw ConfigError("configuration must be a mapping");
    static const std::set<std::string> known{
        "n_antennas", "n_ris_elements", "pos_bs", "pos_ris", "pos_near", "pos_far", "pl_exponents",
        "rho0_db", "rician_factor", "noise_power_db", "p_bs_dbm", "p_d2d_dbm", "rate_thresholds",
        "delta_grid", "tol_sca", "tol_ao", "zeta_dc", "max_iter_sca", "max_iter_ao", "max_iter_dc", "rng_seed"};
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        if (!known.count(key)) throw ConfigError("unknown configuration key '" + key + "'");
    }
    try {
        if (root["n_antennas"]) c.n_antennas = root["n_antennas"].as<int>();
        if (root["n_ris_elements"]) c.n_ris_elements = root["n_ris_elements"].as<int>();
        if (root["pos_bs"]) c.pos_bs = read_vec3(root["pos_bs"], "pos_bs");
        if (root["pos_ris"]) c.pos_ris = read_vec3(root["pos_ris"], "pos_ris");
        if (root["pos_near"]) c.pos_near = read_vec3(root["pos_near"], "pos_near");
        if (root["pos_far"]) c.pos_far = read_vec3(root["pos_far"], "pos_far");
        if (const auto pl = root["pl_exponents"]) {
            if (!pl.IsMap()) throw ConfigError("pl_exponents must be a mapping");
            for (const auto& kv : pl) {
                const auto link = kv.first.as<std::string>();
                if (!c.pl_exponents.count(link)) throw ConfigError("unknown path-loss link '" + link + "'");
                c.pl_exponents[link] = kv.second.as<double>();
            }
        }
        if (root["rho0_db"]) c.rho0_db = root["rho0_db"].as<double>();
        if (root["rician_factor"]) c.rician_factor = root["rician_factor"].as<double>();
        if (root["noise_power_db"]) c.noise_power_db = root["noise_power_db"].as<double>();
        if (root["p_bs_dbm"]) c.p_bs_dbm = root["p_bs_dbm"].as<double>();
        if (root["p_d2d_dbm"]) c.p_d2d_dbm = root["p_d2d_dbm"].as<double>();
        if (const auto r = root["rate_thresholds"]) {
            if (!r.IsSequence() || r.size() != 2) throw ConfigError("rate_thresholds must list two values");
            c.rate_thresholds = {r[0].as<double>(), r[1].as<double>()};
        }
        if (root["delta_grid"]) c.delta_grid = root["delta_grid"].as<std::vector<double>>();
        if (root["tol_sca"]) c.tol_sca = root["tol_sca"].as<double>();
        if (root["tol_ao"]) c.tol_ao = root["tol_ao"].as<double>();
        if (root["zeta_dc"]) c.zeta_dc = root["zeta_dc"].as<double>();
        if (root["max_iter_sca"]) c.max_iter_sca = root["max_iter_sca"].as<int>();
        if (root["max_iter_ao"]) c.max_iter_ao = root["max_iter_ao"].as<int>();
        if (root["max_iter_dc"]) c.max_iter_dc = root["max_iter_dc"].as<int>();
        if (root["rng_seed"]) c.rng_seed = root["rng_seed"].as<std::uint64_t>();
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("bad configuration value: ") + e.what());
    }
}

}  // namespace

SystemConfig parse_config(const std::string& yaml_text) {
    SystemConfig c;
    try {
        apply(YAML::Load(yaml_text), c);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("cannot parse configuration: ") + e.what());
    }
    c.validate();
    return c;
}

SystemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const SystemConfig& c) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "n_antennas" << YAML::Value << c.n_antennas;
    out << YAML::Key << "n_ris_elements" << YAML::Value << c.n_ris_elements;
    auto vec = [&](const char* k, const Vec3& v) {
        out << YAML::Key << k << YAML::Value << YAML::Flow << YAML::BeginSeq << v[0] << v[1] << v[2] << YAML::EndSeq;
    };
    vec("pos_bs", c.pos_bs);
    vec("pos_ris", c.pos_ris);
    vec("pos_near", c.pos_near);
    vec("pos_far", c.pos_far);
    out << YAML::Key << "pl_exponents" << YAML::Value << YAML::BeginMap;
    for (const auto& [k, v] : c.pl_exponents) out << YAML::Key << k << YAML::Value << v;
    out << YAML::EndMap;
    out << YAML::Key << "rho0_db" << YAML::Value << c.rho0_db;
    out << YAML::Key << "rician_factor" << YAML::Value << c.rician_factor;
    out << YAML::Key << "noise_power_db" << YAML::Value << c.noise_power_db;
    out << YAML::Key << "p_bs_dbm" << YAML::Value << c.p_bs_dbm;
    out << YAML::Key << "p_d2d_dbm" << YAML::Value << c.p_d2d_dbm;
    out << YAML::Key << "rate_thresholds" << YAML::Value << YAML::Flow << YAML::BeginSeq << c.rate_thresholds[0]
        << c.rate_thresholds[1] << YAML::EndSeq;
    out << YAML::Key << "delta_grid" << YAML::Value << YAML::Flow << c.delta_grid;
    out << YAML::Key << "tol_sca" << YAML::Value << c.tol_sca;
    out << YAML::Key << "tol_ao" << YAML::Value << c.tol_ao;
    out << YAML::Key << "zeta_dc" << YAML::Value << c.zeta_dc;
    out << YAML::Key << "max_iter_sca" << YAML::Value << c.max_iter_sca;
    out << YAML::Key << "max_iter_ao" << YAML::Value << c.max_iter_ao;
    out << YAML::Key << "max_iter_dc" << YAML::Value << c.max_iter_dc;
    out << YAML::Key << "rng_seed" << YAML::Value << c.rng_seed;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace crsma
