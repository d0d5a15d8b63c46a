#include "sgl/sf_codec.hpp"

#include <charconv>

#include "sgl/errors.hpp"
#include "sgl/util.hpp"

namespace sgl {

namespace {

int parse_int(std::string_view text, const std::string& where) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError(where + ": '" + std::string(text) + "' is not an integer");
    }
    return value;
}

}  // namespace

std::pair<SfSequence, NodeSequence> encode_sf(const SceneGraph& graph) {
    if (graph.relationships.empty()) {
        throw EmptyGraphError("cannot encode a graph with no relationships");
    }
    SfSequence sf;
    NodeSequence nodes;
    sf.triplets.reserve(graph.relationships.size());
    nodes.pairs.reserve(graph.relationships.size());
    for (const auto& rel : graph.relationships) {
        sf.triplets.push_back(SfTriplet{graph.node(rel.subject_id).class_label, rel.predicate,
                                        graph.node(rel.object_id).class_label});
        nodes.pairs.push_back(NodePair{rel.subject_id, rel.object_id});
    }
    return {std::move(sf), std::move(nodes)};
}

SfSequence parse_sf(std::string_view line) {
    const std::vector<std::string> tokens = split_whitespace(line);
    if (tokens.empty()) {
        throw ParseError("empty line is not a valid triplet sequence");
    }
    if (tokens.size() % 3 != 0) {
        throw ParseError("token count " + std::to_string(tokens.size()) +
                         " is not divisible by 3");
    }
    SfSequence seq;
    seq.triplets.reserve(tokens.size() / 3);
    for (std::size_t i = 0; i < tokens.size(); i += 3) {
        for (std::size_t j = i; j < i + 3; ++j) {
            if (!is_token(tokens[j])) {
                throw ParseError("token '" + tokens[j] + "' is not a valid label token");
            }
        }
        seq.triplets.push_back(SfTriplet{tokens[i], tokens[i + 1], tokens[i + 2]});
    }
    return seq;
}

std::string serialize_sf(const SfSequence& seq) {
    std::vector<std::string> tokens;
    tokens.reserve(seq.triplets.size() * 3);
    for (const auto& t : seq.triplets) {
        tokens.push_back(t.subject_class);
        tokens.push_back(t.predicate);
        tokens.push_back(t.object_class);
    }
    return join(tokens, " ");
}

NodeSequence parse_nodes(std::string_view line) {
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
        throw ParseError("empty line is not a valid node sequence");
    }
    NodeSequence seq;
    for (const auto& pair_text : split_on(line, ';')) {
        const std::vector<std::string> parts = split_whitespace(pair_text);
        if (parts.size() != 2) {
            throw ParseError("node pair '" + pair_text + "' must be two integers");
        }
        seq.pairs.push_back(NodePair{parse_int(parts[0], "node pair"),
                                     parse_int(parts[1], "node pair")});
    }
    return seq;
}

std::string serialize_nodes(const NodeSequence& seq) {
    std::vector<std::string> pairs;
    pairs.reserve(seq.pairs.size());
    for (const auto& p : seq.pairs) {
        pairs.push_back(std::to_string(p.subject_id) + " " + std::to_string(p.object_id));
    }
    return join(pairs, ";");
}

}  // namespace sgl
