#include <doctest.h>

#include <set>
#include <vector>

#include "sgl/errors.hpp"
#include "sgl/util.hpp"

using namespace sgl;

TEST_CASE("round_half_up rounds 0.5 toward +inf") {
    CHECK(round_half_up(0.5) == 1);
    CHECK(round_half_up(1.5) == 2);
    CHECK(round_half_up(2.5) == 3);
    CHECK(round_half_up(2.4999) == 2);
    CHECK(round_half_up(-0.5) == 0);
    CHECK(round_half_up(-1.5) == -1);
    CHECK(round_half_up(-1.51) == -2);
    CHECK(round_half_up(7.0) == 7);
}

TEST_CASE("token grammar") {
    CHECK(is_token("person"));
    CHECK(is_token("traffic_light"));
    CHECK(is_token("a1_b2"));
    CHECK_FALSE(is_token(""));
    CHECK_FALSE(is_token("Person"));
    CHECK_FALSE(is_token("t-shirt"));
    CHECK_FALSE(is_token("caf\xc3\xa9"));
}

TEST_CASE("normalize_label lowercases and joins words") {
    CHECK(normalize_label("Traffic Light") == "traffic_light");
    CHECK(normalize_label("  on top  of ") == "on_top_of");
    CHECK(normalize_label("horse") == "horse");
}

TEST_CASE("split and join") {
    CHECK(split_whitespace("  a  b\tc ") == std::vector<std::string>{"a", "b", "c"});
    CHECK(split_whitespace("") == std::vector<std::string>{});
    CHECK(split_on("1 2;3 4", ';') == std::vector<std::string>{"1 2", "3 4"});
    CHECK(join({"a", "b"}, " ") == "a b");
}

TEST_CASE("Rng is deterministic and bounded") {
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 100; ++i) {
        const auto v = a.below(7);
        CHECK(v == b.below(7));
        CHECK(v < 7);
    }
    CHECK_THROWS_AS(a.below(0), DomainError);
    Rng c(1);
    for (int i = 0; i < 100; ++i) {
        const auto v = c.between(3, 5);
        CHECK(v >= 3);
        CHECK(v <= 5);
    }
}

TEST_CASE("for_each_combination enumerates C(k, n) subsets") {
    std::set<std::vector<int>> seen;
    for_each_combination(5, 3, [&](const std::vector<int>& subset) {
        CHECK(subset.size() == 3);
        seen.insert(subset);
    });
    CHECK(seen.size() == 10);
}

TEST_CASE("parallel_for covers every index and rethrows") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] = 1; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, 3,
                                 [&](std::size_t i) {
                                     if (i == 7) throw DomainError("boom");
                                 }),
                    DomainError);
}
