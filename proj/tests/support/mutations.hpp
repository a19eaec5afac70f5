// SPDX-License-Identifier: Apache-2.0

// Seeded corruptions over the tagged-formula fixture, each tripping one
// specific validator finding. Shared by the unit suite and the acceptance
// runner.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mathtag/text_codec.hpp"

namespace mutations {

struct Mutation {
    std::string name;
    std::string expected_code;
    std::function<mathtag::Bytes(const mathtag::Bytes&)> apply;
};

// Twelve corruptions, pairwise distinct expected codes.
const std::vector<Mutation>& all();

} // namespace mutations
