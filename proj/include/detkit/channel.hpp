// Copyright 2026 the detkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Channel-loss planning: fiber transmission vs distance and the number
 * of key-generation bases needed to push the detection attack's
 * critical efficiency below the channel transmission. Security needs
 * the attack strictly infeasible, so the base-count inversion uses the
 * strict inequality 1/(|G|+1) < eta_C.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "detkit/errors.hpp"

namespace detkit {

/// Fiber with attenuation alpha (dB/km) over length L (km).
struct ChannelModel {
    double alpha = 0.2; ///< dB/km
    double length = 0.0; ///< km

    void validate() const {
        if (!(alpha >= 0.0) || !(length >= 0.0))
            throw ArgumentError("ChannelModel: alpha and length must be nonnegative");
    }
};

/// Channel transmission eta_C = 10^(-alpha L / 10).
inline double channel_efficiency(const ChannelModel &model) {
    model.validate();
    return std::pow(10.0, -model.alpha * model.length / 10.0);
}

/// Smallest number of key bases |G| making the attack infeasible at
/// the channel transmission: the least |G| with 1/(|G|+1) < eta_C.
inline std::int64_t min_bases(const ChannelModel &model) {
    const double eta_c = channel_efficiency(model);
    if (eta_c <= 0.0)
        throw ArgumentError("min_bases: channel transmission underflowed to zero");
    std::int64_t g = static_cast<std::int64_t>(std::floor(1.0 / eta_c - 1.0));
    g = std::max<std::int64_t>(g, 1);
    while (static_cast<double>(g + 1) * eta_c <= 1.0) ++g;       // enforce strictness
    while (g > 1 && static_cast<double>(g) * eta_c > 1.0) --g;   // and minimality
    return g;
}

/// Supremum of distances at which `bases` key bases still defeat the
/// attack, L = (10/alpha) log10(bases + 1); the bound itself is open.
/// Returns +infinity for a lossless channel (alpha = 0).
inline double max_distance(double alpha, std::int64_t bases) {
    if (bases < 1) throw ArgumentError("max_distance: need at least one basis");
    if (!(alpha >= 0.0)) throw ArgumentError("max_distance: alpha must be nonnegative");
    if (alpha == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 / alpha * std::log10(static_cast<double>(bases) + 1.0);
}

} // namespace detkit
