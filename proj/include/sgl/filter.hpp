#pragma once

#include <map>
#include <string>
#include <vector>

#include "sgl/types.hpp"

namespace sgl {

// Drops all attributes and every node not appearing in at least one
// relationship; the relationship list is untouched and the layout is
// restricted to surviving nodes. Idempotent. Throws EmptyGraphError when
// the graph has no relationships.
GroundedSample preprocess_graph(const GroundedSample& sample);

struct FilterConfig {
    long min_object_class_count = 2000;
    long min_relationship_class_count = 500;
    int min_box_side = 32;
    int min_objects = 3;
    int max_objects = 30;
    int max_relationships = 9;
};

// Occurrence counts: one per node for object classes, one per relationship
// for predicates.
struct ClassFrequencies {
    std::map<std::string, long> object_classes;
    std::map<std::string, long> predicates;
};

ClassFrequencies count_class_frequencies(const std::vector<GroundedSample>& samples);

// Applies the dataset filtering rules, in this order per sample:
//   1. cull boxes with min(w, h) < min_box_side, together with their nodes
//      and every relationship touching them;
//   2. cull relationships whose predicate, subject class or object class
//      falls below its frequency threshold (nodes stay);
//   3. drop the sample if its object count is outside
//      [min_objects, max_objects] or it has no relationships left;
//   4. keep only the first max_relationships relationships in document
//      order.
// Frequencies are the training-split counts and are applied unchanged to
// every split.
std::vector<GroundedSample> filter_corpus(const std::vector<GroundedSample>& samples,
                                          const FilterConfig& config,
                                          const ClassFrequencies& frequencies);

// Convenience form for the training split itself: frequencies are counted
// over the given samples, then applied.
std::vector<GroundedSample> filter_corpus(const std::vector<GroundedSample>& samples,
                                          const FilterConfig& config);

}  // namespace sgl
