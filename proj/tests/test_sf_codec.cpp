#include <doctest.h>

#include <random>

#include "sgl/errors.hpp"
#include "sgl/filter.hpp"
#include "sgl/sf_codec.hpp"
#include "test_helpers.hpp"

using namespace sgl;

TEST_CASE("encode_sf decomposes relationships in order") {
    SceneGraph graph;
    graph.nodes = {ObjectNode{4, "person", {}}, ObjectNode{9, "horse", {}}};
    graph.relationships = {Relationship{4, "ride", 9}};

    const auto [sf, nodes] = encode_sf(graph);
    REQUIRE(sf.size() == 1);
    CHECK(sf.triplets[0] == SfTriplet{"person", "ride", "horse"});
    CHECK(nodes.pairs[0] == NodePair{4, 9});
}

TEST_CASE("two relationships serialize to six tokens") {
    SceneGraph graph;
    graph.nodes = {ObjectNode{1, "person", {}}, ObjectNode{2, "horse", {}},
                   ObjectNode{3, "field", {}}};
    graph.relationships = {Relationship{1, "ride", 2}, Relationship{1, "in", 3}};

    const auto [sf, nodes] = encode_sf(graph);
    CHECK(serialize_sf(sf) == "person ride horse person in field");
    // A shared subject repeats its node id in the pairs.
    CHECK(nodes.pairs[0].subject_id == nodes.pairs[1].subject_id);
    CHECK(serialize_nodes(nodes) == "1 2;1 3");
}

TEST_CASE("encode_sf rejects an empty graph") {
    SceneGraph graph;
    graph.nodes = {ObjectNode{1, "person", {}}};
    CHECK_THROWS_AS(encode_sf(graph), EmptyGraphError);
}

TEST_CASE("parse_sf groups tokens into triplets") {
    CHECK(parse_sf("person ride horse").triplets ==
          std::vector<SfTriplet>{SfTriplet{"person", "ride", "horse"}});
    CHECK(parse_sf("a b c d e f").size() == 2);
    CHECK_THROWS_AS(parse_sf("person ride"), ParseError);
    CHECK_THROWS_AS(parse_sf(""), ParseError);
    CHECK_THROWS_AS(parse_sf("   "), ParseError);
}

TEST_CASE("node line format") {
    NodeSequence nodes;
    nodes.pairs = {NodePair{3, 7}};
    CHECK(serialize_nodes(nodes) == "3 7");
    CHECK(parse_nodes("3 7") == nodes);
    CHECK(parse_nodes("3 7;5 9").size() == 2);
    CHECK_THROWS_AS(parse_nodes(""), ParseError);
    CHECK_THROWS_AS(parse_nodes("3"), ParseError);
    CHECK_THROWS_AS(parse_nodes("3 x"), ParseError);
}

TEST_CASE("sequences survive a serialize/parse round trip") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const auto sample = preprocess_graph(
            sgltest::random_shared_sample(rng, sgltest::uniform_int(rng, 1, 9)));
        const auto [sf, nodes] = encode_sf(sample.graph);
        CHECK(sf.size() == nodes.size());
        CHECK(sf.size() == sample.graph.relationships.size());
        CHECK(parse_sf(serialize_sf(sf)) == sf);
        CHECK(parse_nodes(serialize_nodes(nodes)) == nodes);
    }
}
