#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "sgl/baseline.hpp"
#include "sgl/errors.hpp"
#include "test_helpers.hpp"

using namespace sgl;

namespace {

std::pair<SfSequence, BacsSequence> pair_from_lines(const std::string& sf_line,
                                                    const std::string& bacs_line,
                                                    bool imgar = false) {
    SfSequence sf = parse_sf(sf_line);
    const auto tokens = parse_bacs_tokens(bacs_line, 40, 31);
    BacsSequence bacs = bacs_from_tokens(tokens, sf.size(), BacsMode::relative, imgar);
    return {std::move(sf), std::move(bacs)};
}

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const std::string& name)
        : path(std::filesystem::temp_directory_path() / name) {}
    ~TempFile() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("training on one pair reproduces it exactly") {
    const auto pair = pair_from_lines("person ride horse",
                                      "c_person xp_5 yp_10 w_20 h_8 c_horse ixn_3 iyp_2 w_6 h_4");
    const BaselineTable table = train_baseline({pair}, 40);
    REQUIRE(table.global.has_value());
    CHECK(table.global->count == 1);
    const BacsSequence predicted = predict_baseline(pair.first, table, false);
    CHECK(serialize_bacs(predicted) == serialize_bacs(pair.second));

    SUBCASE("two identical pairs keep the means, count 2") {
        const BaselineTable twice = train_baseline({pair, pair}, 40);
        CHECK(twice.by_triplet.at("person ride horse").count == 2);
        CHECK(twice.by_triplet.at("person ride horse").mean_subject ==
              table.by_triplet.at("person ride horse").mean_subject);
    }
}

TEST_CASE("means average the observed geometry") {
    const auto a = pair_from_lines("person ride horse",
                                   "c_person xp_10 yp_4 w_8 h_8 c_horse ixp_2 iyp_0 w_4 h_4");
    const auto b = pair_from_lines("person ride horse",
                                   "c_person xp_20 yp_4 w_8 h_8 c_horse ixp_2 iyp_0 w_4 h_4");
    const BaselineTable table = train_baseline({a, b}, 40);
    CHECK(table.by_triplet.at("person ride horse").mean_subject[0] == doctest::Approx(15.0));
    const BacsSequence predicted = predict_baseline(a.first, table, false);
    CHECK(predicted.segments[0].tokens[1].value == 15);
}

TEST_CASE("prediction backs off from triplet to predicate to global") {
    const auto seen = pair_from_lines("person ride horse",
                                      "c_person xp_5 yp_5 w_10 h_10 c_horse ixp_4 iyp_0 w_6 h_6");
    const auto other = pair_from_lines("dog on grass",
                                       "c_dog xp_30 yp_30 w_4 h_4 c_grass ixn_10 iyn_2 w_9 h_9");
    const BaselineTable table = train_baseline({seen, other}, 40);

    SUBCASE("exact triplet hit") {
        const auto out = predict_baseline(parse_sf("person ride horse"), table, false);
        CHECK(serialize_bacs(out) == serialize_bacs(seen.second));
    }
    SUBCASE("unseen triplet with a seen predicate uses predicate stats") {
        const auto out = predict_baseline(parse_sf("dog ride cat"), table, false);
        CHECK(out.segments[0].tokens[1].value == 5);   // from "ride" stats
        CHECK(out.segments[0].tokens[0].class_label == "dog");
        CHECK(out.segments[0].tokens[5].class_label == "cat");
    }
    SUBCASE("unseen predicate falls back to global means") {
        const auto out = predict_baseline(parse_sf("dog chase cat"), table, false);
        // Global mean of xp {5, 30} is 17.5, rounded half-up to 18.
        CHECK(out.segments[0].tokens[1].value == 18);
    }
    SUBCASE("every prediction aligns") {
        for (const char* line : {"person ride horse", "a b c", "x y z a b c"}) {
            const auto out = predict_baseline(parse_sf(line), table, false);
            CHECK_NOTHROW(verify_alignment(out.to_tokens(), parse_sf(line).size(),
                                           BacsMode::relative, false));
        }
    }
}

TEST_CASE("empty table refuses to predict") {
    const BaselineTable table = train_baseline({}, 40);
    CHECK_FALSE(table.global.has_value());
    CHECK_THROWS_AS(predict_baseline(parse_sf("a b c"), table, false), UntrainedError);
}

TEST_CASE("imgar prediction uses the modal bin, smallest on ties") {
    const auto low = pair_from_lines("a b c", "imgar_3 c_a xp_1 yp_1 w_2 h_2 c_c ixp_0 iyp_0 w_2 h_2",
                                     true);
    const auto high = pair_from_lines("a b c", "imgar_9 c_a xp_1 yp_1 w_2 h_2 c_c ixp_0 iyp_0 w_2 h_2",
                                      true);
    const BaselineTable table = train_baseline({high, low, high, low}, 40);
    CHECK(table.modal_ar_index == 3);
    const auto out = predict_baseline(parse_sf("a b c"), table, true);
    REQUIRE(out.imgar.has_value());
    CHECK(out.imgar->value == 3);

    SUBCASE("imgar requested without observations is an untrained error") {
        const auto bare = pair_from_lines("a b c", "c_a xp_1 yp_1 w_2 h_2 c_c ixp_0 iyp_0 w_2 h_2");
        const BaselineTable no_ar = train_baseline({bare}, 40);
        CHECK_THROWS_AS(predict_baseline(parse_sf("a b c"), no_ar, true), UntrainedError);
    }
}

TEST_CASE("misaligned training pairs are rejected") {
    auto pair = pair_from_lines("person ride horse",
                                "c_person xp_5 yp_10 w_20 h_8 c_horse ixn_3 iyp_2 w_6 h_4");
    pair.first.triplets.push_back(pair.first.triplets[0]);
    CHECK_THROWS_AS(train_baseline({pair}, 40), AlignmentError);
}

TEST_CASE("table serialization round trips") {
    std::mt19937_64 rng(41);
    std::vector<std::pair<SfSequence, BacsSequence>> pairs;
    for (int i = 0; i < 30; ++i) {
        const auto sample = sgltest::random_sample(rng, sgltest::uniform_int(rng, 1, 5));
        const auto [sf, nodes] = encode_sf(sample.graph);
        const QuantizedLayout ql = quantize_layout(sample, 40, ArQuantizer{});
        pairs.emplace_back(sf, encode_bacs(ql, nodes, sample.graph, BacsMode::relative, true));
    }
    const BaselineTable table = train_baseline(pairs, 40);
    CHECK(table_from_json(table_to_json(table)) == table);

    TempFile file("sgl_table_test.json");
    save_table(table, file.path);
    CHECK(load_table(file.path) == table);

    SUBCASE("empty file is a format error") {
        TempFile empty("sgl_table_empty.json");
        std::ofstream(empty.path).close();
        CHECK_THROWS_AS(load_table(empty.path), FormatError);
    }
    SUBCASE("version mismatch names the versions") {
        std::string text = table_to_json(table);
        const auto pos = text.find("\"version\": 1");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 12, "\"version\": 9");
        CHECK_THROWS_WITH_AS(table_from_json(text),
                             doctest::Contains("version 9; expected 1"), FormatError);
    }
    SUBCASE("missing table file is an io error") {
        CHECK_THROWS_AS(load_table("/nonexistent/table.json"), IoError);
    }
}

TEST_CASE("absolute-mode training pairs produce the same offsets") {
    const auto rel = pair_from_lines("person ride horse",
                                     "c_person xp_5 yp_10 w_20 h_8 c_horse ixn_3 iyp_2 w_6 h_4");
    SfSequence sf = parse_sf("person ride horse");
    const auto abs_tokens =
        parse_bacs_tokens("c_person xp_5 yp_10 w_20 h_8 c_horse xp_2 yp_12 w_6 h_4", 40, 31);
    const BacsSequence abs = bacs_from_tokens(abs_tokens, 1, BacsMode::absolute, false);

    const BaselineTable from_rel = train_baseline({rel}, 40);
    const BaselineTable from_abs = train_baseline({{sf, abs}}, 40);
    CHECK(from_rel.by_triplet.at("person ride horse").mean_object_delta ==
          from_abs.by_triplet.at("person ride horse").mean_object_delta);
}
