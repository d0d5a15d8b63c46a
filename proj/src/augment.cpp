#include "sgl/augment.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "sgl/errors.hpp"
#include "sgl/util.hpp"

namespace sgl {

namespace {

AugmentVariant make_variant(const GroundedSample& sample, const QuantizedLayout& ql,
                            const CodecConfig& codec, std::vector<int> indices) {
    AugmentVariant variant;
    variant.relationship_indices = std::move(indices);
    for (int idx : variant.relationship_indices) {
        const Relationship& rel = sample.graph.relationships[static_cast<std::size_t>(idx)];
        variant.sf.triplets.push_back(SfTriplet{sample.graph.node(rel.subject_id).class_label,
                                                rel.predicate,
                                                sample.graph.node(rel.object_id).class_label});
        variant.nodes.pairs.push_back(NodePair{rel.subject_id, rel.object_id});
    }
    variant.bacs =
        encode_bacs(ql, variant.nodes, sample.graph, codec.mode, codec.include_imgar);
    return variant;
}

}  // namespace

long long count_ordered_subsets(int k) {
    long long total = 0;
    for (int size = 1; size <= k; ++size) {
        long long arrangements = 1;
        for (int i = 0; i < size; ++i) arrangements *= k - i;
        total += arrangements;
    }
    return total;
}

std::vector<AugmentVariant> augment_sample(const GroundedSample& sample,
                                           const AugmentConfig& config,
                                           const CodecConfig& codec) {
    const int k = static_cast<int>(sample.graph.relationships.size());
    if (config.max_variants < 1 || config.max_relationships < 1) {
        throw DomainError("augmentation caps must be at least 1");
    }
    if (k == 0) {
        throw EmptyGraphError("sample '" + sample.sample_id + "' has no relationships to augment");
    }
    if (k > config.max_relationships) {
        throw DomainError("sample '" + sample.sample_id + "' has " + std::to_string(k) +
                          " relationships; cap at " + std::to_string(config.max_relationships) +
                          " before augmenting");
    }
    const QuantizedLayout ql = quantize_layout(sample, codec.grid_max, codec.ar_quantizer);

    std::vector<int> identity(static_cast<std::size_t>(k));
    std::iota(identity.begin(), identity.end(), 0);

    std::vector<std::vector<int>> chosen;
    chosen.push_back(identity);
    std::set<std::vector<int>> seen{identity};

    const long long total = count_ordered_subsets(k);
    if (total <= config.max_variants) {
        // Everything fits: enumerate by size, subset, then permutation.
        for (int size = 1; size <= k; ++size) {
            for_each_combination(k, size, [&](const std::vector<int>& subset) {
                std::vector<int> order = subset;
                do {
                    if (seen.insert(order).second) chosen.push_back(order);
                } while (std::next_permutation(order.begin(), order.end()));
            });
        }
    } else {
        Rng rng(mix64(config.seed) ^ hash_string(sample.sample_id));
        std::vector<int> pool(static_cast<std::size_t>(k));
        while (static_cast<int>(chosen.size()) < config.max_variants) {
            const int size = static_cast<int>(rng.between(1, k));
            std::iota(pool.begin(), pool.end(), 0);
            // Partial Fisher-Yates: the first `size` entries are a uniform
            // ordered arrangement, which is exactly subset + permutation.
            for (int i = 0; i < size; ++i) {
                const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(k - i)));
                std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
            }
            std::vector<int> order(pool.begin(), pool.begin() + size);
            if (seen.insert(order).second) chosen.push_back(std::move(order));
        }
    }

    std::vector<AugmentVariant> variants;
    variants.reserve(chosen.size());
    for (auto& indices : chosen) {
        variants.push_back(make_variant(sample, ql, codec, std::move(indices)));
    }
    return variants;
}

}  // namespace sgl
