#pragma once

#include <cstdint>
#include <vector>

#include "sgl/bacs_codec.hpp"
#include "sgl/sf_codec.hpp"
#include "sgl/types.hpp"

namespace sgl {

struct AugmentConfig {
    int max_variants = 50;
    int max_relationships = 9;
    std::uint64_t seed = 0;
};

// One training correspondence: a relationship subset in a fixed order,
// expressed in all three sequence forms.
struct AugmentVariant {
    std::vector<int> relationship_indices;
    SfSequence sf;
    NodeSequence nodes;
    BacsSequence bacs;
};

// Number of distinct non-empty ordered relationship subsets of a K-graph.
long long count_ordered_subsets(int k);

// Expands a preprocessed sample into up to max_variants distinct
// (subset, order) variants. Variant 0 is always the full graph in original
// order. When every variant fits under the cap they are all emitted
// (enumerated by size, then subset, then permutation); otherwise the rest
// are drawn by rejection sampling: subset size uniform on [1, K], subset
// uniform at that size, order uniform. The random stream is derived from
// (seed, sample_id), so results do not depend on sample processing order.
std::vector<AugmentVariant> augment_sample(const GroundedSample& sample,
                                           const AugmentConfig& config,
                                           const CodecConfig& codec);

}  // namespace sgl
