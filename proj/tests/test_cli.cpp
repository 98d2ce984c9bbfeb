#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <iterator>
#include <sstream>

#include "commands.hpp"
#include "dde/analytics.hpp"
#include "dde/labeler.hpp"
#include "dde/report_io.hpp"
#include "dde/trace_io.hpp"
#include "dde/wav.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace dde;
using testing::A;
using testing::trace_of;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result dde_cli(std::vector<std::string> args, std::optional<std::string> config = std::nullopt) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err, [&](const std::string& name) -> std::optional<std::string> {
        if (name == "DDE_CONFIG") return config;
        return std::nullopt;
    });
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("dde_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate then analyze a cascaded run") {
    TempDir dir;
    const auto sim = dde_cli({"simulate", "--policy", "cascaded", "--duration-s", "300", "--seed", "1", "--out", dir / "t.json"});
    REQUIRE(sim.code == 0);
    CHECK(sim.out.find("simulated 300.00s") != std::string::npos);
    CHECK(read_trace(dir / "t.json").duration_ms == 300000);

    const auto table = dde_cli({"analyze", dir / "t.json"});
    REQUIRE(table.code == 0);
    const auto rows = lines_of(table.out);
    REQUIRE(rows.size() == 2);
    std::istringstream words(rows[1]);
    std::vector<std::string> cells{std::istream_iterator<std::string>(words), std::istream_iterator<std::string>()};
    CHECK(cells == std::vector<std::string>{"t.json", "0", "0", "0", "800"});

    const auto js = dde_cli({"analyze", dir / "t.json", "--format", "json"});
    REQUIRE(js.code == 0);
    const auto rep = report_from_json(nlohmann::ordered_json::parse(js.out));
    CHECK(rep.avg_gap_ms == 800.0);
    CHECK(rep.overlaps_per_min == 0.0);
}

TEST_CASE("simulate is deterministic") {
    const auto a = dde_cli({"simulate", "--policy", "stochastic", "--duration-s", "30", "--seed", "7"});
    const auto b = dde_cli({"simulate", "--policy", "stochastic", "--duration-s", "30", "--seed", "7"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.err == b.err);
    CHECK(parse_trace(a.out).duration_ms == 30000);
}

TEST_CASE("simulate rejects bad input") {
    CHECK(dde_cli({"simulate", "--duration-s", "0"}).code != 0);
    CHECK(dde_cli({"simulate", "--tick-ms", "200"}).code != 0);
    CHECK(dde_cli({"simulate", "--policy", "neural"}).code != 0);
    CHECK(dde_cli({"simulate", "--policy", "scripted"}).code != 0);
    CHECK(dde_cli({"simulate", "--config", "/nonexistent/run.json"}).code != 0);
    CHECK(dde_cli({}).code != 0);
}

TEST_CASE("simulate from a run config") {
    TempDir dir;
    write_text_file(dir / "run.json",
                    R"({"duration_ms": 3200, "agents": [{"policy": {"kind": "scripted", "table": [{"tick": 0, "action": "SPK", "duration_ms": 2000}]}}, {"policy": {"kind": "cascaded"}}]})");
    const auto r = dde_cli({"simulate", "--config", dir / "run.json"});
    REQUIRE(r.code == 0);
    const auto t = parse_trace(r.out);
    REQUIRE(t.channel(Speaker::A).size() == 1);
    CHECK(t.channel(Speaker::A)[0].interval() == Interval{0, 2000});
}

TEST_CASE("eot flag changes cascaded gaps") {
    TempDir dir;
    REQUIRE(dde_cli({"simulate", "--duration-s", "120", "--eot-silence-ms", "640", "--out", dir / "t.json"}).code == 0);
    CHECK(conversation_report(read_trace(dir / "t.json")).avg_gap_ms == 640.0);
}

TEST_CASE("label writes one line per tick and speaker") {
    TempDir dir;
    write_trace(dir / "five.json", trace_of({{A, 1000, 3000}}, 5000));
    const auto r = dde_cli({"label", dir / "five.json", "--speaker", "A", "--out", dir / "s.jsonl"});
    REQUIRE(r.code == 0);
    CHECK(r.out == "A: SIL=19 CON=11 SPK=1 STP=0\n");
    const auto lines = lines_of(read_text_file(dir / "s.jsonl"));
    REQUIRE(lines.size() == 31);
    CHECK(nlohmann::json::parse(lines[6]).at("action") == "SPK");

    const auto js = dde_cli({"label", dir / "five.json", "--speaker", "A", "--format", "json"});
    REQUIRE(js.code == 0);
    const auto hist = nlohmann::json::parse(js.err);
    CHECK(hist["A"]["SIL"] == 19);
    CHECK(hist["A"]["CON"] == 11);
    CHECK(hist["A"]["SPK"] == 1);
}

TEST_CASE("label counts for long and silent traces") {
    TempDir dir;
    write_trace(dir / "long.json", build_trace({}, 300000));
    const auto r = dde_cli({"label", dir / "long.json"});
    REQUIRE(r.code == 0);
    CHECK(lines_of(r.out).size() == 2 * 1875);
    CHECK(r.err == "A: SIL=1875 CON=0 SPK=0 STP=0\nB: SIL=1875 CON=0 SPK=0 STP=0\n");
}

TEST_CASE("label rejects malformed traces") {
    TempDir dir;
    write_text_file(dir / "bad.json", R"({"duration_ms": 100, "channels": [[{"start_ms": 50, "end_ms": 10}], []]})");
    const auto r = dde_cli({"label", dir / "bad.json"});
    CHECK(r.code != 0);
    CHECK(r.err.find("error") != std::string::npos);
    CHECK(dde_cli({"label", dir / "missing.json"}).code != 0);
}

TEST_CASE("analyze a batch directory") {
    TempDir dir;
    fs::create_directories(dir.path / "batch");
    write_trace(dir / "batch/a.json", trace_of({{A, 0, 1000}, {A, 1300, 2000}, {testing::B, 500, 1200}}, 60000));
    write_trace(dir / "batch/b.json", build_trace({}, 60000));
    write_trace(dir / "batch/c.json", trace_of({{A, 0, 1000}, {testing::B, 1500, 2500}}, 60000));
    const auto r = dde_cli({"analyze", dir / "batch"});
    REQUIRE(r.code == 0);
    const auto rows = lines_of(r.out);
    REQUIRE(rows.size() == 5);
    CHECK(rows[1].rfind("a.json", 0) == 0);
    CHECK(rows[4].rfind("mean", 0) == 0);
    std::istringstream words(rows[4]);
    std::vector<std::string> cells{std::istream_iterator<std::string>(words), std::istream_iterator<std::string>()};
    CHECK(cells == std::vector<std::string>{"mean", "0.33", "0.33", "0.33", "500"});

    const auto js = dde_cli({"analyze", dir / "batch", "--format", "json"});
    REQUIRE(js.code == 0);
    const auto j = nlohmann::ordered_json::parse(js.out);
    CHECK(j["rows"].size() == 3);
    CHECK(j["mean"]["overlaps_per_min"].get<double>() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("analyze with a reference") {
    TempDir dir;
    write_trace(dir / "t.json", trace_of({{A, 0, 1000}, {testing::B, 1500, 2500}}, 60000));
    ConversationReport ref;
    ref.overlaps_per_min = 5.7;
    ref.backchannels_per_min = 2.1;
    ref.pauses_per_min = 12.2;
    ref.avg_gap_ms = 393.0;
    write_text_file(dir / "ref.json", report_to_json(ref).dump());
    const auto r = dde_cli({"analyze", dir / "t.json", "--compare", dir / "ref.json"});
    REQUIRE(r.code == 0);
    const auto rows = lines_of(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[2].find("reference") == 0);
    CHECK(rows[2].find("5.7") != std::string::npos);

    const auto against_trace = dde_cli({"analyze", dir / "t.json", "--compare", dir / "t.json"});
    REQUIRE(against_trace.code == 0);
    CHECK(lines_of(against_trace.out).size() == 3);
}

TEST_CASE("analyze rejects zero-duration traces") {
    TempDir dir;
    write_text_file(dir / "z.json", R"({"duration_ms": 0, "channels": [[], []]})");
    CHECK(dde_cli({"analyze", dir / "z.json"}).code != 0);
}

TEST_CASE("analyze with audio fills prosody") {
    TempDir dir;
    write_trace(dir / "t.json", trace_of({{A, 0, 2000}}, 2000));
    WavAudio wav;
    wav.sample_rate = 16000;
    wav.channels = {oracle::tone(2000, {{0, 2000}}, 220.0, 16000.0), std::vector<std::int16_t>(32000, 0)};
    write_wav(dir / "a.wav", wav);
    const auto r = dde_cli({"analyze", dir / "t.json", "--audio", dir / "a.wav", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["naturalness"]["pstd_hz"].get<double>() < 5.0);
}

TEST_CASE("ingest recovers tone bursts") {
    TempDir dir;
    WavAudio wav;
    wav.sample_rate = 16000;
    wav.channels = {oracle::tone(3000, {{500, 1000}}, 440.0), oracle::tone(3000, {{1500, 2500}}, 330.0)};
    write_wav(dir / "d.wav", wav);
    const auto r = dde_cli({"ingest", "--wav", dir / "d.wav", "--out", dir / "t.json"});
    REQUIRE(r.code == 0);
    const auto t = read_trace(dir / "t.json");
    REQUIRE(t.channel(Speaker::A).size() == 1);
    REQUIRE(t.channel(Speaker::B).size() == 1);
    CHECK(std::abs(t.channel(Speaker::B)[0].start_ms - 1500) <= 20);
    CHECK(std::abs(t.channel(Speaker::B)[0].end_ms - 2500) <= 20);
    CHECK(dde_cli({"ingest"}).code != 0);

    WavAudio wrong = wav;
    wrong.sample_rate = 8000;
    write_wav(dir / "w.wav", wrong);
    CHECK(dde_cli({"ingest", "--wav", dir / "w.wav"}).code != 0);
}

TEST_CASE("tokenize train, encode and decode") {
    TempDir dir;
    write_text_file(dir / "units.json", "[[7,7,8,7,8,9],[7,8,9,9]]");
    REQUIRE(dde_cli({"tokenize", "train", "--input", dir / "units.json", "--num-merges", "1", "--base-alphabet-size",
                     "10", "--out", dir / "vocab.json"})
                .code == 0);
    const auto vocab = nlohmann::json::parse(read_text_file(dir / "vocab.json"));
    CHECK(vocab["merges"] == nlohmann::json::parse("[[7,8,10]]"));

    const auto enc = dde_cli({"tokenize", "encode", "--input", dir / "units.json", "--vocab", dir / "vocab.json"});
    REQUIRE(enc.code == 0);
    CHECK(enc.out == "[10,10,9]\n[10,9]\n");
    write_text_file(dir / "enc.jsonl", enc.out);
    const auto dec = dde_cli({"tokenize", "decode", "--input", dir / "enc.jsonl", "--vocab", dir / "vocab.json"});
    REQUIRE(dec.code == 0);
    CHECK(dec.out == "[7,8,7,8,9]\n[7,8,9]\n");
    CHECK(dde_cli({"tokenize", "encode", "--input", dir / "units.json"}).code != 0);
    CHECK(dde_cli({"tokenize", "train", "--input", dir / "units.json", "--base-alphabet-size", "5"}).code != 0);
}

TEST_CASE("eval-actions") {
    TempDir dir;
    write_text_file(dir / "gold.jsonl", "{\"action\":\"SIL\"}\n{\"action\":\"SIL\"}\n{\"action\":\"SPK\"}\n");
    write_text_file(dir / "pred.jsonl", "{\"action\":\"SIL\"}\n{\"action\":\"SPK\"}\n{\"action\":\"SPK\"}\n");
    const auto r = dde_cli({"eval-actions", "--gold", dir / "gold.jsonl", "--pred", dir / "pred.jsonl", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["classes"]["SIL"]["f1"].get<double>() == doctest::Approx(2.0 / 3.0));
    CHECK(dde_cli({"eval-actions", "--gold", dir / "gold.jsonl", "--pred", dir / "gold.jsonl"}).code == 0);
    write_text_file(dir / "short.jsonl", "{\"action\":\"SIL\"}\n");
    CHECK(dde_cli({"eval-actions", "--gold", dir / "gold.jsonl", "--pred", dir / "short.jsonl"}).code != 0);
}

TEST_CASE("pipeline config supplies defaults that flags override") {
    TempDir dir;
    write_trace(dir / "t.json", trace_of({{A, 0, 1000}, {testing::B, 1500, 2500}}, 60000));
    const std::string cfg = R"({"paths": {"inputs": [")" + (dir / "t.json") + R"("]}, "report_format": "json"})";
    write_text_file(dir / "cfg.json", cfg);
    const auto js = dde_cli({"analyze"}, dir / "cfg.json");
    REQUIRE(js.code == 0);
    CHECK(nlohmann::json::parse(js.out)["avg_gap_ms"] == 500.0);
    const auto table = dde_cli({"analyze", "--format", "table"}, dir / "cfg.json");
    REQUIRE(table.code == 0);
    CHECK(table.out.rfind("Conversation", 0) == 0);

    write_text_file(dir / "sim.json", R"({"sim": {"duration_ms": 16000, "seed": 3, "policy": {"kind": "stochastic"}}})");
    const auto s1 = dde_cli({"simulate"}, dir / "sim.json");
    REQUIRE(s1.code == 0);
    CHECK(parse_trace(s1.out).duration_ms == 16000);
    const auto s2 = dde_cli({"simulate", "--duration-s", "8"}, dir / "sim.json");
    CHECK(parse_trace(s2.out).duration_ms == 8000);

    write_text_file(dir / "broken.json", R"({"paths": {"inputs": ["/no/such/file.json"]}})");
    CHECK(dde_cli({"analyze"}, dir / "broken.json").code != 0);
}

TEST_CASE("commands are idempotent") {
    TempDir dir;
    REQUIRE(dde_cli({"simulate", "--policy", "stochastic", "--duration-s", "60", "--seed", "2", "--out", dir / "t.json"})
                .code == 0);
    const auto first = read_text_file(dir / "t.json");
    REQUIRE(dde_cli({"simulate", "--policy", "stochastic", "--duration-s", "60", "--seed", "2", "--out", dir / "t.json"})
                .code == 0);
    CHECK(read_text_file(dir / "t.json") == first);
    const auto a = dde_cli({"label", dir / "t.json"});
    const auto b = dde_cli({"label", dir / "t.json"});
    CHECK(a.out == b.out);
    CHECK(dde_cli({"analyze", dir / "t.json"}).out == dde_cli({"analyze", dir / "t.json"}).out);
}

} // TEST_SUITE
