#include <doctest.h>

#include <random>

#include "dde/error.hpp"
#include "dde/units.hpp"
#include "oracles.hpp"

using namespace dde;

namespace {

UnitSequence random_raw(std::mt19937_64& rng, int alphabet, std::size_t max_len) {
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<int> sym(0, alphabet - 1);
    std::uniform_int_distribution<int> run(1, 4);
    UnitSequence out;
    const std::size_t n = len(rng);
    while (out.size() < n) {
        const int u = sym(rng);
        for (int r = run(rng); r > 0 && out.size() < n; --r) out.push_back(u);
    }
    return out;
}

} // namespace

TEST_SUITE("units") {

TEST_CASE("dedup") {
    CHECK(dedup(std::vector<int>{45, 45, 198, 117, 117, 117}) == UnitSequence{45, 198, 117});
    CHECK(dedup(std::vector<int>{}).empty());
    const UnitSequence x{1, 1, 2, 1, 1};
    CHECK(dedup(x) == UnitSequence{1, 2, 1});
    CHECK(dedup(dedup(x)) == dedup(x));
}

TEST_CASE("bpe_train picks the most frequent pair") {
    const std::vector<UnitSequence> corpus{{7, 8, 7, 8, 9}};
    const auto vocab = bpe_train(corpus, 1, 10);
    REQUIRE(vocab.merges.size() == 1);
    CHECK(vocab.merges[0].left == 7);
    CHECK(vocab.merges[0].right == 8);
    CHECK(vocab.merges[0].id == 10);
    CHECK(bpe_encode(vocab, corpus[0]) == UnitSequence{10, 10, 9});
    CHECK(bpe_decode(vocab, bpe_encode(vocab, corpus[0])) == corpus[0]);
}

TEST_CASE("bpe_train breaks ties by the smallest pair") {
    const std::vector<UnitSequence> corpus{{1, 2, 3, 1, 2, 3}};
    const auto vocab = bpe_train(corpus, 1, 4);
    REQUIRE(vocab.merges.size() == 1);
    CHECK(vocab.merges[0].left == 1);
    CHECK(vocab.merges[0].right == 2);
    CHECK(vocab.merges[0].id == 4);
}

TEST_CASE("bpe_train stops when no pair repeats") {
    const std::vector<UnitSequence> corpus{{1, 2, 3, 4}};
    CHECK(bpe_train(corpus, 10, 5).merges.empty());
    const std::vector<UnitSequence> twice{{1, 2, 1, 2, 1, 2}};
    const auto v = bpe_train(twice, 10, 3);
    // (1,2)->3 gives [3,3,3], whose two adjacent (3,3) pairs still qualify; [4,3] has none
    REQUIRE(v.merges.size() == 2);
    CHECK(v.merges[1].left == 3);
    CHECK(v.merges[1].right == 3);
    CHECK(bpe_encode(v, twice[0]) == UnitSequence{4, 3});
}

TEST_CASE("zero merges is the identity") {
    const std::vector<UnitSequence> corpus{{3, 1, 4}};
    const auto vocab = bpe_train(corpus, 0, 5);
    CHECK(vocab.merges.empty());
    CHECK(bpe_encode(vocab, corpus[0]) == UnitSequence{3, 1, 4});
    BpeVocab empty;
    empty.base_alphabet_size = 5;
    CHECK(bpe_encode(empty, std::vector<int>{3, 1, 4}) == UnitSequence{3, 1, 4});
}

TEST_CASE("single merge encode and decode") {
    BpeVocab v;
    v.base_alphabet_size = 10;
    v.merges.push_back({7, 8, 10});
    CHECK(bpe_encode(v, std::vector<int>{7, 8, 9}) == UnitSequence{10, 9});
    CHECK(bpe_decode(v, std::vector<int>{10, 9}) == UnitSequence{7, 8, 9});
}

TEST_CASE("merges are applied left to right without overlap") {
    BpeVocab v;
    v.base_alphabet_size = 3;
    v.merges.push_back({1, 1, 3});
    CHECK(bpe_encode(v, std::vector<int>{1, 1, 1}) == UnitSequence{3, 1});
}

TEST_CASE("nested merges decode recursively") {
    const std::vector<UnitSequence> corpus{{0, 1, 2, 0, 1, 2, 0, 1, 2}};
    const auto v = bpe_train(corpus, 5, 3);
    const auto enc = bpe_encode(v, corpus[0]);
    CHECK(enc.size() < corpus[0].size());
    CHECK(bpe_decode(v, enc) == corpus[0]);
}

TEST_CASE("bpe errors") {
    const std::vector<UnitSequence> bad{{1, 2, 9}};
    CHECK_THROWS_AS(bpe_train(bad, 1, 5), ValidationError);
    CHECK_THROWS_AS(bpe_train(bad, -1, 10), ValidationError);
    BpeVocab v;
    v.base_alphabet_size = 10;
    v.merges.push_back({7, 8, 10});
    CHECK_THROWS_AS(bpe_decode(v, std::vector<int>{11}), ValidationError);
    CHECK_THROWS_AS(bpe_decode(v, std::vector<int>{-1}), ValidationError);
    CHECK_THROWS_AS(bpe_encode(v, std::vector<int>{10}), ValidationError);
}

TEST_CASE("vocab JSON round trip and validation") {
    const std::vector<UnitSequence> corpus{{0, 1, 2, 0, 1, 2, 0, 1, 3, 0, 1}};
    const auto v = bpe_train(corpus, 4, 4);
    const auto back = vocab_from_json(vocab_to_json(v));
    CHECK(back.base_alphabet_size == v.base_alphabet_size);
    REQUIRE(back.merges.size() == v.merges.size());
    for (std::size_t i = 0; i < v.merges.size(); ++i) CHECK(back.merges[i].id == v.merges[i].id);
    CHECK_THROWS_AS(vocab_from_json(nlohmann::ordered_json::parse(R"({"base_alphabet_size":4,"merges":[[0,1,5]]})")),
                    ValidationError);
    CHECK_THROWS_AS(vocab_from_json(nlohmann::ordered_json::parse(R"({"base_alphabet_size":4,"merges":[[0,4,4]]})")),
                    ValidationError);
}

TEST_CASE("unit error rate") {
    CHECK(unit_error_rate(std::vector<int>{1, 2, 3}, std::vector<int>{1, 2, 3}) == 0.0);
    CHECK(unit_error_rate(std::vector<int>{1, 2, 3, 4}, std::vector<int>{1, 3, 4}) == doctest::Approx(0.25));
    CHECK(unit_error_rate(std::vector<int>{1, 2}, std::vector<int>{3, 4, 5}) == doctest::Approx(1.5));
    CHECK_THROWS_AS(unit_error_rate(std::vector<int>{}, std::vector<int>{1}), ValidationError);
}

TEST_CASE("edit distance matches the recursive oracle") {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 300; ++i) {
        const auto a = random_raw(rng, 3, 7), b = random_raw(rng, 3, 7);
        CHECK(edit_distance(a, b) == oracle::edit_distance(a, b));
    }
}

TEST_CASE("units_duration_ms") {
    CHECK(units_duration_ms(std::vector<int>(50, 1)) == 1000);
    CHECK(units_duration_ms(std::vector<int>{}) == 0);
    CHECK(units_duration_ms(std::vector<int>(140, 3)) == 2800);
}

TEST_CASE("unit laws on random data") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<UnitSequence> corpus;
        for (int k = 0; k < 8; ++k) corpus.push_back(dedup(random_raw(rng, 6, 40)));
        const auto vocab = bpe_train(corpus, 12, 6);
        const auto again = bpe_train(corpus, 12, 6);
        REQUIRE(vocab.merges.size() == again.merges.size());
        for (std::size_t m = 0; m < vocab.merges.size(); ++m) {
            CHECK(vocab.merges[m].left == again.merges[m].left);
            CHECK(vocab.merges[m].right == again.merges[m].right);
        }
        for (int k = 0; k < 20; ++k) {
            const auto x = random_raw(rng, 6, 60);
            const auto d = dedup(x);
            CHECK(dedup(d) == d);
            CHECK(d.size() <= x.size());
            const auto enc = bpe_encode(vocab, d);
            CHECK(enc.size() <= d.size());
            CHECK(bpe_decode(vocab, enc) == d);
        }
    }
}

} // TEST_SUITE
