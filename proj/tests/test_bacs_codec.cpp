#include <doctest.h>

#include <random>

#include "sgl/bacs_codec.hpp"
#include "sgl/errors.hpp"
#include "sgl/filter.hpp"
#include "test_helpers.hpp"

using namespace sgl;

namespace {

// grid 40x30 is the bin-17 geometry (dequantized ratio 1.35).
QuantizedLayout wide_layout() {
    QuantizedLayout ql;
    ql.grid_w = 40;
    ql.grid_h = 30;
    ql.ar_index = 17;
    ql.boxes[1] = QuantizedBox{"person", GridBox{5, 10, 20, 8}};
    ql.boxes[2] = QuantizedBox{"horse", GridBox{2, 12, 6, 4}};
    return ql;
}

SceneGraph wide_graph() {
    SceneGraph graph;
    graph.nodes = {ObjectNode{1, "person", {}}, ObjectNode{2, "horse", {}}};
    graph.relationships = {Relationship{1, "ride", 2}};
    return graph;
}

NodeSequence pair_1_2() {
    NodeSequence nodes;
    nodes.pairs = {NodePair{1, 2}};
    return nodes;
}

}  // namespace

TEST_CASE("aspect-ratio quantization") {
    const ArQuantizer q;
    CHECK(q.quantize(0.5) == 0);
    CHECK(q.quantize(1.0) == 10);
    CHECK(q.quantize(3.0) == 30);  // clamped to the top bin
    CHECK(q.quantize(0.1) == 0);   // clamped to the bottom bin
    CHECK_THROWS_AS(q.quantize(0.0), DomainError);
    CHECK_THROWS_AS(q.quantize(-1.0), DomainError);

    SUBCASE("bin centers round trip") {
        for (int index = 0; index < q.bins; ++index) {
            CHECK(q.quantize(q.dequantize(index)) == index);
        }
    }
}

TEST_CASE("grid dimensions keep the long side at grid_max") {
    CHECK(grid_dims_for_ratio(1.0, 40).w == 40);
    CHECK(grid_dims_for_ratio(1.0, 40).h == 40);
    const GridDims wide = grid_dims_for_ratio(2.0, 40);
    CHECK(wide.w == 40);
    CHECK(wide.h == 20);
    const GridDims tall = grid_dims_for_ratio(0.5, 40);
    CHECK(tall.w == 20);
    CHECK(tall.h == 40);
}

TEST_CASE("quantize_layout maps an 800x600 image onto a 40x30 grid") {
    GroundedSample sample;
    sample.sample_id = "q";
    sample.layout.image_w = 800;
    sample.layout.image_h = 600;
    sample.graph.nodes = {ObjectNode{1, "frame", {}}, ObjectNode{2, "horse", {}}};
    sample.layout.boxes[1] = PixelBox{0, 0, 800, 600};
    sample.layout.boxes[2] = PixelBox{400, 300, 80, 60};

    const ArQuantizer q;
    const QuantizedLayout ql = quantize_layout(sample, 40, q);
    CHECK(ql.grid_w == 40);
    CHECK(ql.grid_h == 30);
    CHECK(ql.boxes.at(1).box == GridBox{0, 0, 40, 30});
    CHECK(ql.boxes.at(2).box == GridBox{20, 15, 4, 3});
    CHECK(ql.boxes.at(2).class_label == "horse");

    SUBCASE("corner cells clamp inside the grid") {
        sample.layout.boxes[2] = PixelBox{799, 599, 1, 1};
        const QuantizedLayout edge = quantize_layout(sample, 40, q);
        CHECK(edge.boxes.at(2).box.x == 39);
        CHECK(edge.boxes.at(2).box.y == 29);
        CHECK(edge.boxes.at(2).box.w == 1);
        CHECK(edge.boxes.at(2).box.h == 1);
    }
}

TEST_CASE("encode_bacs emits the documented relative segment") {
    const QuantizedLayout ql = wide_layout();
    const BacsSequence seq = encode_bacs(ql, pair_1_2(), wide_graph(), BacsMode::relative, false);
    CHECK(serialize_bacs(seq) == "c_person xp_5 yp_10 w_20 h_8 c_horse ixn_3 iyp_2 w_6 h_4");

    SUBCASE("absolute mode switches only the object position tokens") {
        const BacsSequence abs =
            encode_bacs(ql, pair_1_2(), wide_graph(), BacsMode::absolute, false);
        CHECK(serialize_bacs(abs) == "c_person xp_5 yp_10 w_20 h_8 c_horse xp_2 yp_12 w_6 h_4");
    }
    SUBCASE("imgar token goes in front") {
        const BacsSequence with_ar =
            encode_bacs(ql, pair_1_2(), wide_graph(), BacsMode::relative, true);
        CHECK(serialize_bacs(with_ar) ==
              "imgar_17 c_person xp_5 yp_10 w_20 h_8 c_horse ixn_3 iyp_2 w_6 h_4");
    }
    SUBCASE("zero offsets canonicalize to the positive kinds") {
        QuantizedLayout same = ql;
        same.boxes[2].box.x = same.boxes[1].box.x;
        same.boxes[2].box.y = same.boxes[1].box.y;
        const BacsSequence zero =
            encode_bacs(same, pair_1_2(), wide_graph(), BacsMode::relative, false);
        CHECK(zero.segments[0].tokens[6] == BacsToken{BacsKind::ixp, 0, {}});
        CHECK(zero.segments[0].tokens[7] == BacsToken{BacsKind::iyp, 0, {}});
    }
    SUBCASE("a pair naming a box-less node is a consistency error") {
        NodeSequence bad;
        bad.pairs = {NodePair{1, 5}};
        SceneGraph graph = wide_graph();
        graph.nodes.push_back(ObjectNode{5, "dog", {}});
        CHECK_THROWS_AS(encode_bacs(ql, bad, graph, BacsMode::relative, false), ConsistencyError);
    }
}

TEST_CASE("token text round trip and vocabulary ranges") {
    CHECK(serialize_token(BacsToken{BacsKind::c, 0, "traffic_light"}) == "c_traffic_light");
    CHECK(parse_bacs_token("c_traffic_light", 40, 31) ==
          BacsToken{BacsKind::c, 0, "traffic_light"});
    CHECK(parse_bacs_token("xp_39", 40, 31) == BacsToken{BacsKind::xp, 39, {}});
    CHECK(parse_bacs_token("imgar_30", 40, 31) == BacsToken{BacsKind::imgar, 30, {}});

    CHECK_THROWS_AS(parse_bacs_token("xp_40", 40, 31), ParseError);
    CHECK_THROWS_AS(parse_bacs_token("w_0", 40, 31), ParseError);
    CHECK_THROWS_AS(parse_bacs_token("w_41", 40, 31), ParseError);
    CHECK_THROWS_AS(parse_bacs_token("ixn_0", 40, 31), ParseError);
    CHECK_THROWS_AS(parse_bacs_token("imgar_31", 40, 31), ParseError);
    CHECK_THROWS_AS(parse_bacs_token("zz_3", 40, 31), ParseError);
    CHECK_THROWS_AS(parse_bacs_token("xp_", 40, 31), ParseError);
    CHECK_THROWS_AS(parse_bacs_token("xp_3x", 40, 31), ParseError);
    CHECK_THROWS_AS(parse_bacs_token("c_Person", 40, 31), ParseError);
    CHECK_THROWS_AS(parse_bacs_token("person", 40, 31), ParseError);

    SUBCASE("whole-line round trip") {
        const std::string line = "imgar_17 c_person xp_5 yp_10 w_20 h_8 c_horse ixn_3 iyp_2 w_6 h_4";
        const auto tokens = parse_bacs_tokens(line, 40, 31);
        const BacsSequence seq = bacs_from_tokens(tokens, 1, BacsMode::relative, true);
        CHECK(serialize_bacs(seq) == line);
    }
}

TEST_CASE("verify_alignment checks length, imgar and the kind pattern") {
    const QuantizedLayout ql = wide_layout();
    const auto seq = encode_bacs(ql, pair_1_2(), wide_graph(), BacsMode::relative, false);
    auto tokens = seq.to_tokens();

    SUBCASE("a valid segment yields its boundaries") {
        const auto bounds = verify_alignment(tokens, 1, BacsMode::relative, false);
        REQUIRE(bounds.size() == 1);
        CHECK(bounds[0] == std::pair<std::size_t, std::size_t>{0, 10});
    }
    SUBCASE("truncated stream fails the length check") {
        tokens.pop_back();
        CHECK_THROWS_AS(verify_alignment(tokens, 1, BacsMode::relative, false), AlignmentError);
        try {
            verify_alignment(tokens, 1, BacsMode::relative, false);
        } catch (const AlignmentError& e) {
            CHECK(e.position == 9);
        }
    }
    SUBCASE("an xp token at position 6 is rejected in relative mode") {
        tokens[6] = BacsToken{BacsKind::xp, 2, {}};
        try {
            verify_alignment(tokens, 1, BacsMode::relative, false);
            FAIL("expected AlignmentError");
        } catch (const AlignmentError& e) {
            CHECK(e.position == 6);
            CHECK(e.expected == "ixp|ixn");
        }
    }
    SUBCASE("missing imgar when expected") {
        CHECK_THROWS_AS(verify_alignment(tokens, 1, BacsMode::relative, true), AlignmentError);
    }
    SUBCASE("unexpected imgar is a kind mismatch at position 0") {
        std::vector<BacsToken> with_ar = tokens;
        with_ar.insert(with_ar.begin(), BacsToken{BacsKind::imgar, 3, {}});
        CHECK_THROWS_AS(verify_alignment(with_ar, 1, BacsMode::relative, false), AlignmentError);
        const auto bounds = verify_alignment(with_ar, 1, BacsMode::relative, true);
        CHECK(bounds[0] == std::pair<std::size_t, std::size_t>{1, 11});
    }
    SUBCASE("absolute-mode pattern") {
        const auto abs = encode_bacs(ql, pair_1_2(), wide_graph(), BacsMode::absolute, false);
        CHECK_NOTHROW(verify_alignment(abs.to_tokens(), 1, BacsMode::absolute, false));
        CHECK_THROWS_AS(verify_alignment(abs.to_tokens(), 1, BacsMode::relative, false),
                        AlignmentError);
    }
}

TEST_CASE("merge_boxes") {
    SUBCASE("same class: componentwise mean, half-up") {
        const QuantizedBox merged = merge_boxes({QuantizedBox{"a", GridBox{2, 2, 4, 4}},
                                                 QuantizedBox{"a", GridBox{4, 4, 6, 6}}});
        CHECK(merged == QuantizedBox{"a", GridBox{3, 3, 5, 5}});
    }
    SUBCASE("mean rounds halves upward") {
        const QuantizedBox merged = merge_boxes({QuantizedBox{"a", GridBox{0, 0, 1, 1}},
                                                 QuantizedBox{"a", GridBox{1, 1, 2, 2}}});
        CHECK(merged.box == GridBox{1, 1, 2, 2});
    }
    SUBCASE("distinct classes: median area wins") {
        const QuantizedBox merged = merge_boxes({QuantizedBox{"a", GridBox{0, 0, 2, 2}},
                                                 QuantizedBox{"b", GridBox{0, 0, 3, 3}},
                                                 QuantizedBox{"c", GridBox{0, 0, 5, 5}}});
        CHECK(merged.class_label == "b");
        CHECK(merged.box == GridBox{0, 0, 3, 3});
    }
    SUBCASE("even count: lower median") {
        const QuantizedBox merged = merge_boxes({QuantizedBox{"big", GridBox{0, 0, 3, 3}},
                                                 QuantizedBox{"small", GridBox{0, 0, 2, 2}}});
        CHECK(merged.class_label == "small");
    }
    SUBCASE("single candidate is returned unchanged") {
        const QuantizedBox one{"a", GridBox{1, 2, 3, 4}};
        CHECK(merge_boxes({one}) == one);
    }
    SUBCASE("empty input is a domain error") {
        CHECK_THROWS_AS(merge_boxes({}), DomainError);
    }
}

TEST_CASE("execute_bacs round trips and clamps") {
    const ArQuantizer q;
    SUBCASE("execute(encode(ql)) restores the layout exactly") {
        const QuantizedLayout ql = wide_layout();
        const auto seq = encode_bacs(ql, pair_1_2(), wide_graph(), BacsMode::relative, true);
        CHECK(execute_bacs(seq, pair_1_2(), 40, q) == ql);
        const auto abs = encode_bacs(ql, pair_1_2(), wide_graph(), BacsMode::absolute, true);
        CHECK(execute_bacs(abs, pair_1_2(), 40, q) == ql);
    }
    SUBCASE("an offset pushing the corner negative clamps to zero") {
        const auto tokens = parse_bacs_tokens("c_a xp_0 yp_0 w_4 h_4 c_b ixn_2 iyp_0 w_3 h_3", 40, 31);
        const BacsSequence seq = bacs_from_tokens(tokens, 1, BacsMode::relative, false);
        const QuantizedLayout out = execute_bacs(seq, pair_1_2(), 40, q);
        CHECK(out.boxes.at(2).box.x == 0);
        CHECK(out.boxes.at(2).box.y == 0);
    }
    SUBCASE("identical duplicate boxes merge to themselves") {
        NodeSequence nodes;
        nodes.pairs = {NodePair{1, 2}, NodePair{1, 3}};
        const auto tokens = parse_bacs_tokens(
            "c_a xp_4 yp_4 w_6 h_6 c_b ixp_1 iyp_1 w_2 h_2 "
            "c_a xp_4 yp_4 w_6 h_6 c_d ixp_3 iyp_0 w_2 h_2",
            40, 31);
        const BacsSequence seq = bacs_from_tokens(tokens, 2, BacsMode::relative, false);
        const QuantizedLayout out = execute_bacs(seq, nodes, 40, q);
        CHECK(out.boxes.at(1) == QuantizedBox{"a", GridBox{4, 4, 6, 6}});
        CHECK(out.boxes.size() == 3);
    }
    SUBCASE("segment/pair count mismatch is a consistency error") {
        const QuantizedLayout ql = wide_layout();
        const auto seq = encode_bacs(ql, pair_1_2(), wide_graph(), BacsMode::relative, false);
        NodeSequence two;
        two.pairs = {NodePair{1, 2}, NodePair{2, 1}};
        CHECK_THROWS_AS(execute_bacs(seq, two, 40, q), ConsistencyError);
    }
}

TEST_CASE("round trip holds for random quantized samples in both modes") {
    std::mt19937_64 rng(99);
    const ArQuantizer q;
    for (int trial = 0; trial < 200; ++trial) {
        const int k = sgltest::uniform_int(rng, 1, 9);
        const GroundedSample sample = sgltest::random_sample(rng, k);
        const QuantizedLayout ql = quantize_layout(sample, 40, q);
        const auto [sf, nodes] = encode_sf(sample.graph);

        for (const BacsMode mode : {BacsMode::relative, BacsMode::absolute}) {
            const BacsSequence seq = encode_bacs(ql, nodes, sample.graph, mode, true);
            // verify_alignment accepts every encoder output.
            CHECK_NOTHROW(verify_alignment(seq.to_tokens(), nodes.size(), mode, true));
            CHECK(execute_bacs(seq, nodes, 40, q) == ql);

            // Without imgar the grid defaults to square; boxes still match.
            const BacsSequence bare = encode_bacs(ql, nodes, sample.graph, mode, false);
            const QuantizedLayout restored = execute_bacs(bare, nodes, 40, q);
            CHECK(restored.boxes == ql.boxes);

            // Serialized text round trips token-for-token.
            const auto reparsed = parse_bacs_tokens(serialize_bacs(seq), 40, q.bins);
            CHECK(bacs_from_tokens(reparsed, nodes.size(), mode, true) == seq);
        }
    }
}

TEST_CASE("relative offsets reconstruct the object corner before clamping") {
    std::mt19937_64 rng(123);
    const ArQuantizer q;
    for (int trial = 0; trial < 100; ++trial) {
        const GroundedSample sample = sgltest::random_sample(rng, sgltest::uniform_int(rng, 1, 5));
        const QuantizedLayout ql = quantize_layout(sample, 40, q);
        const auto [sf, nodes] = encode_sf(sample.graph);
        const BacsSequence seq = encode_bacs(ql, nodes, sample.graph, BacsMode::relative, false);
        for (std::size_t i = 0; i < seq.segments.size(); ++i) {
            const auto& t = seq.segments[i].tokens;
            const int dx = t[6].kind == BacsKind::ixp ? t[6].value : -t[6].value;
            const int dy = t[7].kind == BacsKind::iyp ? t[7].value : -t[7].value;
            CHECK(t[1].value + dx == ql.boxes.at(nodes.pairs[i].object_id).box.x);
            CHECK(t[2].value + dy == ql.boxes.at(nodes.pairs[i].object_id).box.y);
        }
    }
}

TEST_CASE("grid dims from the imgar bin stay within half an interval of the bin ratio") {
    const ArQuantizer q;
    for (int index = 0; index < q.bins; ++index) {
        const GridDims dims = grid_dims_for_ratio(q.dequantize(index), 40);
        const double grid_ratio = static_cast<double>(dims.w) / dims.h;
        // One rounding step of the short side perturbs the ratio by at most
        // ratio / short_side.
        const double rounding = q.dequantize(index) / std::min(dims.w, dims.h);
        CHECK(std::abs(grid_ratio - q.dequantize(index)) <= q.interval / 2 + rounding);
    }
}
