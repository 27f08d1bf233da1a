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

#include "crsma/ao_driver.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crsma {

enum class SchemeId { CRSMA_RIS, RSMA_RIS, NOMA_RIS, CNOMA_RIS, CRSMA_NORIS, CNOMA_NORIS };

const char* to_string(SchemeId id);
std::optional<SchemeId> parse_scheme(std::string_view name);
const std::vector<SchemeId>& all_schemes();
std::string describe(SchemeId id);

/// Protocol, RIS use and delta grid a scheme runs with.
struct SchemeSetup {
    Protocol protocol;
    bool uses_ris = true;
    bool single_slot = false;  // delta fixed to 1
};
SchemeSetup scheme_setup(SchemeId id);

/// Runs one scheme on one channel draw. RIS-free schemes ignore the RIS links
/// and `theta1`; single-slot schemes search over {1} only.
AOResult solve_scheme(SchemeId id, const ChannelSet& ch, const SystemConfig& cfg, const PhaseVector& theta1,
                      const AoOptions& base = {});

AOResult solve_crsma_ris(const ChannelSet& ch, const SystemConfig& cfg, const PhaseVector& theta1);
AOResult solve_rsma_ris(const ChannelSet& ch, const SystemConfig& cfg, const PhaseVector& theta1);
AOResult solve_noma_ris(const ChannelSet& ch, const SystemConfig& cfg, const PhaseVector& theta1);
AOResult solve_cnoma_ris(const ChannelSet& ch, const SystemConfig& cfg, const PhaseVector& theta1);
AOResult solve_crsma_noris(const ChannelSet& ch, const SystemConfig& cfg);
AOResult solve_cnoma_noris(const ChannelSet& ch, const SystemConfig& cfg);

}  // namespace crsma
