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

#include "crsma/baselines.hpp"

#include <stdexcept>

namespace crsma {

const char* to_string(SchemeId id) {
    switch (id) {
        case SchemeId::CRSMA_RIS: return "CRSMA_RIS";
        case SchemeId::RSMA_RIS: return "RSMA_RIS";
        case SchemeId::NOMA_RIS: return "NOMA_RIS";
        case SchemeId::CNOMA_RIS: return "CNOMA_RIS";
        case SchemeId::CRSMA_NORIS: return "CRSMA_NORIS";
        case SchemeId::CNOMA_NORIS: return "CNOMA_NORIS";
    }
    return "unknown";
}

const std::vector<SchemeId>& all_schemes() {
    static const std::vector<SchemeId> ids{SchemeId::CRSMA_RIS,   SchemeId::RSMA_RIS,   SchemeId::NOMA_RIS,
                                           SchemeId::CNOMA_RIS,   SchemeId::CRSMA_NORIS, SchemeId::CNOMA_NORIS};
    return ids;
}

std::optional<SchemeId> parse_scheme(std::string_view name) {
    for (SchemeId id : all_schemes())
        if (name == to_string(id)) return id;
    return std::nullopt;
}

std::string describe(SchemeId id) {
    switch (id) {
        case SchemeId::CRSMA_RIS: return "cooperative rate splitting with RIS, half-duplex relaying, delta search";
        case SchemeId::RSMA_RIS: return "rate splitting with RIS, no relaying (delta = 1)";
        case SchemeId::NOMA_RIS: return "NOMA with RIS, no relaying (delta = 1)";
        case SchemeId::CNOMA_RIS: return "cooperative NOMA with RIS, half-duplex relaying, delta search";
        case SchemeId::CRSMA_NORIS: return "cooperative rate splitting without RIS, delta search";
        case SchemeId::CNOMA_NORIS: return "cooperative NOMA without RIS, delta search";
    }
    return {};
}

SchemeSetup scheme_setup(SchemeId id) {
    switch (id) {
        case SchemeId::CRSMA_RIS: return {{true, true}, true, false};
        case SchemeId::RSMA_RIS: return {{true, false}, true, true};
        case SchemeId::NOMA_RIS: return {{false, false}, true, true};
        case SchemeId::CNOMA_RIS: return {{false, true}, true, false};
        case SchemeId::CRSMA_NORIS: return {{true, true}, false, false};
        case SchemeId::CNOMA_NORIS: return {{false, true}, false, false};
    }
    throw std::invalid_argument("unknown scheme");
}

AOResult solve_scheme(SchemeId id, const ChannelSet& ch, const SystemConfig& cfg, const PhaseVector& theta1,
                      const AoOptions& base) {
    const SchemeSetup setup = scheme_setup(id);
    AoOptions opt = base;
    opt.protocol = setup.protocol;
    const std::vector<double> grid = setup.single_slot ? std::vector<double>{1.0} : cfg.delta_grid;
    if (!setup.uses_ris) return delta_search(without_ris(ch), cfg, PhaseVector::zeros(0), grid, opt);
    return delta_search(ch, cfg, theta1, grid, opt);
}

AOResult solve_crsma_ris(const ChannelSet& ch, const SystemConfig& cfg, const PhaseVector& theta1) {
    return solve_scheme(SchemeId::CRSMA_RIS, ch, cfg, theta1);
}
AOResult solve_rsma_ris(const ChannelSet& ch, const SystemConfig& cfg, const PhaseVector& theta1) {
    return solve_scheme(SchemeId::RSMA_RIS, ch, cfg, theta1);
}
AOResult solve_noma_ris(const ChannelSet& ch, const SystemConfig& cfg, const PhaseVector& theta1) {
    return solve_scheme(SchemeId::NOMA_RIS, ch, cfg, theta1);
}
AOResult solve_cnoma_ris(const ChannelSet& ch, const SystemConfig& cfg, const PhaseVector& theta1) {
    return solve_scheme(SchemeId::CNOMA_RIS, ch, cfg, theta1);
}
AOResult solve_crsma_noris(const ChannelSet& ch, const SystemConfig& cfg) {
    return solve_scheme(SchemeId::CRSMA_NORIS, ch, cfg, PhaseVector::zeros(0));
}
AOResult solve_cnoma_noris(const ChannelSet& ch, const SystemConfig& cfg) {
    return solve_scheme(SchemeId::CNOMA_NORIS, ch, cfg, PhaseVector::zeros(0));
}

}  // namespace crsma
