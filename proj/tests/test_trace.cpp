#include <doctest.h>

#include <random>

#include "dde/error.hpp"
#include "dde/trace.hpp"
#include "dde/trace_io.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace dde;
using testing::A;
using testing::B;
using testing::trace_of;

TEST_SUITE("trace_model") {

TEST_CASE("build_trace with no events gives two empty channels") {
    const auto t = build_trace({}, 5000);
    CHECK(t.duration_ms == 5000);
    CHECK(t.channel(Speaker::A).empty());
    CHECK(t.channel(Speaker::B).empty());
}

TEST_CASE("overlapping same-channel segments merge") {
    const auto t = trace_of({{A, 0, 1000}, {A, 900, 1500}}, 2000);
    REQUIRE(t.channel(Speaker::A).size() == 1);
    CHECK(t.channel(Speaker::A)[0].interval() == Interval{0, 1500});
}

TEST_CASE("cross-channel overlap is kept") {
    const auto t = trace_of({{A, 0, 100}, {B, 50, 150}}, 200);
    CHECK(t.channel(Speaker::A)[0].interval() == Interval{0, 100});
    CHECK(t.channel(Speaker::B)[0].interval() == Interval{50, 150});
}

TEST_CASE("segments come back sorted") {
    const auto t = trace_of({{A, 3000, 3500}, {A, 0, 100}, {A, 1000, 1200}}, 4000);
    REQUIRE(t.channel(Speaker::A).size() == 3);
    CHECK(t.channel(Speaker::A)[0].start_ms == 0);
    CHECK(t.channel(Speaker::A)[1].start_ms == 1000);
    CHECK(t.channel(Speaker::A)[2].start_ms == 3000);
}

TEST_CASE("build_trace rejects bad segments") {
    CHECK_THROWS_AS(trace_of({{A, 500, 500}}, 1000), ValidationError);
    CHECK_THROWS_AS(trace_of({{A, 600, 500}}, 1000), ValidationError);
    CHECK_THROWS_AS(trace_of({{B, 500, 1200}}, 1000), ValidationError);
    CHECK_THROWS_AS(trace_of({{A, -20, 100}}, 1000), ValidationError);
}

TEST_CASE("units must cover every frame") {
    SpeechSegment seg;
    seg.start_ms = 0;
    seg.end_ms = 100;
    seg.units = std::vector<int>{1, 2, 3};
    CHECK_THROWS_AS(build_trace({{Speaker::A, seg}}, 200), ValidationError);
    seg.units = std::vector<int>{1, 2, 3, 4, 5};
    CHECK_NOTHROW(build_trace({{Speaker::A, seg}}, 200));
    seg.start_ms = 10;
    seg.end_ms = 110;
    CHECK_THROWS_AS(build_trace({{Speaker::A, seg}}, 200), ValidationError);
}

TEST_CASE("frame_grid majority rule") {
    SUBCASE("[0,100) covers frames 0-4") {
        const auto g = frame_grid(trace_of({{A, 0, 100}}, 400));
        REQUIRE(g.size() == 20);
        for (std::size_t f = 0; f < g.size(); ++f) CHECK(g.active(Speaker::A, f) == (f < 5));
    }
    SUBCASE("[5,95) still covers frames 0-4") {
        const auto g = frame_grid(trace_of({{A, 5, 95}}, 400));
        for (std::size_t f = 0; f < g.size(); ++f) CHECK(g.active(Speaker::A, f) == (f < 5));
    }
    SUBCASE("9ms of speech is not enough, 10ms is") {
        CHECK_FALSE(frame_grid(trace_of({{A, 11, 20}}, 40)).active(Speaker::A, 0));
        CHECK(frame_grid(trace_of({{A, 10, 20}}, 40)).active(Speaker::A, 0));
    }
    SUBCASE("empty trace") {
        const auto g = frame_grid(build_trace({}, 1000));
        CHECK(g.size() == 50);
        for (std::size_t f = 0; f < g.size(); ++f) CHECK_FALSE(g.active(Speaker::B, f));
    }
    SUBCASE("partial trailing frame is dropped") {
        CHECK(frame_grid(build_trace({}, 1010)).size() == 50);
    }
}

TEST_CASE("window clipping") {
    const auto t = trace_of({{A, 5000, 15000}, {A, 25000, 29000}}, 30000);
    SUBCASE("wider than history is the prefix") {
        const auto w = window(t, 5000, 20000);
        CHECK(w.duration_ms == 5000);
        CHECK(w.channel(Speaker::A).empty());
    }
    SUBCASE("left edge truncates and rebases") {
        const auto w = window(t, 30000, 20000);
        CHECK(w.duration_ms == 20000);
        REQUIRE(w.channel(Speaker::A).size() == 2);
        CHECK(w.channel(Speaker::A)[0].interval() == Interval{0, 5000});
        CHECK(w.channel(Speaker::A)[1].interval() == Interval{15000, 19000});
    }
    SUBCASE("right edge truncates") {
        const auto w = window(t, 27000, 20000);
        CHECK(w.channel(Speaker::A).back().interval() == Interval{18000, 20000});
    }
    SUBCASE("out of range") {
        CHECK_THROWS_AS(window(t, 0), ValidationError);
        CHECK_THROWS_AS(window(t, 30001), ValidationError);
    }
}

TEST_CASE("window slices units with the clip") {
    SpeechSegment seg;
    seg.start_ms = 0;
    seg.end_ms = 200;
    seg.units = std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    seg.words = 3;
    const auto t = build_trace({{Speaker::A, seg}}, 400);
    const auto w = window(t, 300, 240);
    REQUIRE(w.channel(Speaker::A).size() == 1);
    const auto& s = w.channel(Speaker::A)[0];
    CHECK(s.interval() == Interval{0, 140});
    REQUIRE(s.units);
    CHECK(*s.units == std::vector<int>{3, 4, 5, 6, 7, 8, 9});
    CHECK_FALSE(s.words);
}

TEST_CASE("window wider than the trace equals the trace") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        const auto t = oracle::random_trace(rng, 20000, 1);
        CHECK(window(t, t.duration_ms, t.duration_ms) == t);
        CHECK(window(t, t.duration_ms, 20000 + t.duration_ms) == t);
    }
}

TEST_CASE("serialization round trip preserves trace and grid") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        const auto t = oracle::random_trace(rng, 30000, 1);
        const auto back = parse_trace(serialize_trace(t));
        CHECK(back == t);
        CHECK(frame_grid(back).frames == frame_grid(t).frames);
    }
}

TEST_CASE("annotations survive serialization") {
    SpeechSegment seg;
    seg.start_ms = 20;
    seg.end_ms = 80;
    seg.units = std::vector<int>{45, 45, 198};
    seg.words = 2;
    seg.events = EventCounts{1, 0, 1, 0};
    const auto t = build_trace({{Speaker::B, seg}}, 100);
    CHECK(parse_trace(serialize_trace(t)) == t);
}

TEST_CASE("malformed trace JSON is a validation error") {
    CHECK_THROWS_AS(parse_trace("{"), ValidationError);
    CHECK_THROWS_AS(parse_trace(R"({"duration_ms": 10, "channels": [[]]})"), ValidationError);
    CHECK_THROWS_AS(parse_trace(R"({"duration_ms": 10})"), ValidationError);
    CHECK_THROWS_AS(parse_trace(R"({"duration_ms": 10, "channels": [[{"start_ms": 5, "end_ms": 50}], []]})"),
                    ValidationError);
}

TEST_CASE("channel invariants hold after build_trace") {
    std::mt19937_64 rng(19);
    for (int i = 0; i < 200; ++i) {
        const auto t = oracle::random_trace(rng, 60000, 1);
        CHECK_NOTHROW(validate(t));
        for (const auto& ch : t.channels)
            for (std::size_t k = 1; k < ch.size(); ++k) CHECK(ch[k - 1].end_ms < ch[k].start_ms);
    }
}

TEST_CASE("VAD on silence finds nothing") {
    const std::array<std::vector<std::int16_t>, 2> pcm{std::vector<std::int16_t>(32000, 0),
                                                       std::vector<std::int16_t>(32000, 0)};
    const auto t = vad_from_samples(pcm);
    CHECK(t.duration_ms == 2000);
    CHECK(t.channel(Speaker::A).empty());
    CHECK(t.channel(Speaker::B).empty());
}

TEST_CASE("VAD recovers a tone burst") {
    const std::array<std::vector<std::int16_t>, 2> pcm{oracle::tone(2000, {{500, 1000}}, 440.0),
                                                       std::vector<std::int16_t>(32000, 0)};
    const auto t = vad_from_samples(pcm);
    REQUIRE(t.channel(Speaker::A).size() == 1);
    const auto& s = t.channel(Speaker::A)[0];
    CHECK(std::abs(s.start_ms - 500) <= 20);
    CHECK(std::abs(s.end_ms - 1000) <= 20);
    CHECK(t.channel(Speaker::B).empty());
}

TEST_CASE("VAD bridges short gaps") {
    const std::array<std::vector<std::int16_t>, 2> pcm{oracle::tone(1000, {{0, 200}, {280, 500}}, 300.0),
                                                       std::vector<std::int16_t>(16000, 0)};
    VadConfig cfg;
    cfg.min_gap_ms = 100;
    const auto t = vad_from_samples(pcm, cfg);
    REQUIRE(t.channel(Speaker::A).size() == 1);
    CHECK(std::abs(t.channel(Speaker::A)[0].start_ms - 0) <= 20);
    CHECK(std::abs(t.channel(Speaker::A)[0].end_ms - 500) <= 20);

    cfg.min_gap_ms = 40;
    CHECK(vad_from_samples(pcm, cfg).channel(Speaker::A).size() == 2);
}

TEST_CASE("VAD drops segments shorter than min_speech_ms") {
    const std::array<std::vector<std::int16_t>, 2> pcm{oracle::tone(1000, {{100, 160}, {500, 800}}, 300.0),
                                                       std::vector<std::int16_t>(16000, 0)};
    const auto t = vad_from_samples(pcm);
    REQUIRE(t.channel(Speaker::A).size() == 1);
    CHECK(std::abs(t.channel(Speaker::A)[0].start_ms - 500) <= 20);
}

TEST_CASE("VAD speech never exceeds the audio") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> noise(-3000, 3000);
    std::array<std::vector<std::int16_t>, 2> pcm{std::vector<std::int16_t>(48000), std::vector<std::int16_t>(48000)};
    for (auto& ch : pcm)
        for (auto& x : ch) x = static_cast<std::int16_t>(noise(rng));
    const auto t = vad_from_samples(pcm);
    for (Speaker s : {Speaker::A, Speaker::B}) CHECK(total_speech_ms(t, s) <= t.duration_ms);
}

TEST_CASE("VAD input errors") {
    const std::array<std::vector<std::int16_t>, 2> empty{};
    CHECK_THROWS_AS(vad_from_samples(empty), ValidationError);
    const std::array<std::vector<std::int16_t>, 2> uneven{std::vector<std::int16_t>(320),
                                                          std::vector<std::int16_t>(640)};
    CHECK_THROWS_AS(vad_from_samples(uneven), ValidationError);
    VadConfig cfg;
    cfg.min_speech_ms = 10;
    const std::array<std::vector<std::int16_t>, 2> ok{std::vector<std::int16_t>(320), std::vector<std::int16_t>(320)};
    CHECK_THROWS_AS(vad_from_samples(ok, cfg), ValidationError);
}

} // TEST_SUITE
