// SPDX-License-Identifier: Apache-2.0
//
// mimo-grouping: directional node grouping for massive MIMO
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

#include <mimo_grouping/geometry.hpp>

#include <random>
#include <vector>

namespace test_support {

/// K nodes with uniform theta in [0, 2pi) and sigma uniform in [0, max_sigma].
inline std::vector<mimo_grouping::NodeProfile> random_nodes(std::size_t k, std::mt19937_64& rng,
                                                            double max_sigma = 0.15)
{
    std::uniform_real_distribution<double> theta(0.0, mimo_grouping::kTwoPi);
    std::uniform_real_distribution<double> sigma(0.0, max_sigma);
    std::vector<mimo_grouping::NodeProfile> nodes(k);
    for (std::size_t i = 0; i < k; ++i) {
        nodes[i] = {static_cast<mimo_grouping::NodeId>(i), theta(rng), sigma(rng)};
    }
    return nodes;
}

} // namespace test_support
