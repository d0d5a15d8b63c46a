#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sgl/types.hpp"

namespace sgl {

struct SfTriplet {
    std::string subject_class;
    std::string predicate;
    std::string object_class;

    friend bool operator==(const SfTriplet&, const SfTriplet&) = default;
};

// One triplet per relationship; serialized form is 3K tokens.
struct SfSequence {
    std::vector<SfTriplet> triplets;

    std::size_t size() const { return triplets.size(); }
    friend bool operator==(const SfSequence&, const SfSequence&) = default;
};

struct NodePair {
    int subject_id = 0;
    int object_id = 0;

    friend bool operator==(const NodePair&, const NodePair&) = default;
};

// Sidecar of (subject id, object id) pairs, same length as its SfSequence.
struct NodeSequence {
    std::vector<NodePair> pairs;

    std::size_t size() const { return pairs.size(); }
    friend bool operator==(const NodeSequence&, const NodeSequence&) = default;
};

// Decomposes a preprocessed graph: triplet k is (class(subject), predicate,
// class(object)) of relationship k, pair k the endpoint ids. Throws
// EmptyGraphError when the graph has no relationships.
std::pair<SfSequence, NodeSequence> encode_sf(const SceneGraph& graph);

// Whitespace-separated tokens grouped into consecutive triplets.
// Token count not divisible by 3, or an empty line, is a ParseError.
SfSequence parse_sf(std::string_view line);
std::string serialize_sf(const SfSequence& seq);

// Node line format: pairs "s o" joined by ";", e.g. "3 7;5 9".
NodeSequence parse_nodes(std::string_view line);
std::string serialize_nodes(const NodeSequence& seq);

}  // namespace sgl
