#include "commands.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "dde/analytics.hpp"
#include "dde/error.hpp"
#include "dde/labeler.hpp"
#include "dde/report_io.hpp"
#include "dde/sim_io.hpp"
#include "dde/trace_io.hpp"
#include "dde/units.hpp"
#include "dde/wav.hpp"

namespace dde::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

ojson ojson_parse(const std::string& text) {
    try {
        return ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
}

// Runs f(i) for i in [0, n) on a bounded pool and returns results in index order.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F f) {
    std::vector<std::optional<T>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i] = f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<T> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

// Files named on the command line; directories expand to their sorted .json/.jsonl entries.
std::vector<fs::path> expand_inputs(const std::vector<fs::path>& given) {
    std::vector<fs::path> files;
    for (const auto& p : given) {
        if (!fs::exists(p)) throw ValidationError("input not found: " + p.string());
        if (fs::is_directory(p)) {
            std::vector<fs::path> found;
            for (const auto& e : fs::directory_iterator(p)) {
                const auto ext = e.path().extension();
                if (e.is_regular_file() && (ext == ".json" || ext == ".jsonl")) found.push_back(e.path());
            }
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.push_back(p);
        }
    }
    if (files.empty()) throw ValidationError("no input traces");
    return files;
}

void emit(const std::optional<fs::path>& path, const std::string& text, std::ostream& out) {
    if (path) {
        if (path->has_parent_path() && !fs::is_directory(path->parent_path()))
            throw ValidationError("output directory does not exist: " + path->parent_path().string());
        write_text_file(*path, text);
    } else {
        out << text;
    }
}

void check_tick_ms(const std::optional<std::int64_t>& tick_ms) {
    if (tick_ms && *tick_ms != kTickMs)
        throw ValidationError("--tick-ms is fixed at " + std::to_string(kTickMs));
}

std::string check_format(const std::string& f) {
    if (f != "json" && f != "table") throw ValidationError("unknown format '" + f + "'");
    return f;
}

std::string seconds(std::int64_t ms) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2fs", static_cast<double>(ms) / 1000.0);
    return buf;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateArgs {
    std::optional<std::string> policy;
    std::optional<double> duration_s;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> window_ms;
    std::optional<std::int64_t> tick_ms;
    std::optional<std::int64_t> eot_silence_ms;
    std::optional<fs::path> config;
    std::optional<fs::path> out;
};

int cmd_simulate(const SimulateArgs& a, const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
    check_tick_ms(a.tick_ms);
    SimRun run = a.config ? run_from_json(ojson_parse(read_text_file(*a.config))) : cfg.sim;
    if (a.policy) {
        const PolicyKind kind = parse_policy_kind(*a.policy);
        for (auto& agent : run.agents) {
            if (agent.policy.kind() == kind) continue;
            if (kind == PolicyKind::cascaded) agent.policy.params = CascadedConfig{};
            else if (kind == PolicyKind::stochastic) agent.policy.params = default_stochastic_config();
            else throw ValidationError("a scripted policy needs its table from --config");
        }
    }
    if (a.eot_silence_ms)
        for (auto& agent : run.agents)
            if (auto* c = std::get_if<CascadedConfig>(&agent.policy.params)) c->eot_silence_ms = *a.eot_silence_ms;
    if (a.duration_s) {
        if (!(*a.duration_s >= 0)) throw ValidationError("--duration-s must be non-negative");
        run.duration_ms = std::llround(*a.duration_s * 1000.0);
    }
    if (a.seed) run.seed = *a.seed;
    if (a.window_ms) run.window_ms = *a.window_ms;
    validate(run);

    const ConversationTrace trace = run_selfchat(run);
    const auto target = a.out ? a.out : cfg.output;
    emit(target, serialize_trace(trace) + "\n", out);
    std::ostream& summary = target ? out : err;
    summary << "simulated " << seconds(trace.duration_ms) << "  A speech "
            << seconds(total_speech_ms(trace, Speaker::A)) << "  B speech "
            << seconds(total_speech_ms(trace, Speaker::B)) << "\n";
    return 0;
}

// ---- label ------------------------------------------------------------------

struct LabelArgs {
    std::vector<fs::path> inputs;
    std::string speaker = "both";
    std::optional<std::int64_t> window_ms;
    std::optional<std::int64_t> tick_ms;
    std::optional<fs::path> vocab;
    bool inline_context = false;
    std::optional<std::string> format;
    std::optional<fs::path> out;
};

int cmd_label(const LabelArgs& a, const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
    check_tick_ms(a.tick_ms);
    const std::int64_t window_ms = a.window_ms.value_or(cfg.window_ms);
    if (window_ms <= 0) throw ValidationError("--window-ms must be positive");
    const std::string format = check_format(a.format.value_or(cfg.report_format));
    std::vector<Speaker> speakers;
    if (a.speaker == "both") speakers = {Speaker::A, Speaker::B};
    else speakers = {parse_speaker(a.speaker)};

    std::optional<BpeVocab> vocab;
    if (a.vocab) vocab = vocab_from_json(ojson_parse(read_text_file(*a.vocab)));

    std::vector<ConversationTrace> traces;
    for (const auto& f : expand_inputs(a.inputs.empty() ? cfg.inputs : a.inputs))
        for (auto& t : read_traces(f)) traces.push_back(std::move(t));

    struct Labeled {
        std::string lines;
        std::array<std::array<std::size_t, 4>, 2> histogram{};
    };
    const auto results = parallel_map<Labeled>(traces.size(), [&](std::size_t i) {
        Labeled r;
        for (Speaker s : speakers)
            for (const auto& sample : build_samples(traces[i], s, window_ms, vocab ? &*vocab : nullptr)) {
                auto j = sample_to_json(sample, a.inline_context);
                if (traces.size() > 1) j["conversation"] = i;
                r.lines += j.dump() + "\n";
                ++r.histogram[index(s)][action_index(sample.action)];
            }
        return r;
    });

    std::string lines;
    std::array<std::array<std::size_t, 4>, 2> histogram{};
    for (const auto& r : results) {
        lines += r.lines;
        for (int s = 0; s < 2; ++s)
            for (int k = 0; k < 4; ++k) histogram[s][k] += r.histogram[s][k];
    }
    const auto target = a.out ? a.out : cfg.output;
    emit(target, lines, out);

    std::ostream& summary = target ? out : err;
    if (format == "json") {
        ojson h = ojson::object();
        for (Speaker s : speakers) {
            ojson row = ojson::object();
            for (Action act : kAllActions) row[std::string(action_name(act))] = histogram[index(s)][action_index(act)];
            h[std::string(1, speaker_name(s))] = row;
        }
        summary << h.dump() << "\n";
    } else {
        for (Speaker s : speakers) {
            summary << speaker_name(s) << ":";
            for (Action act : kAllActions)
                summary << " " << action_name(act) << "=" << histogram[index(s)][action_index(act)];
            summary << "\n";
        }
    }
    return 0;
}

// ---- analyze ----------------------------------------------------------------

struct AnalyzeArgs {
    std::vector<fs::path> inputs;
    std::optional<std::string> format;
    std::optional<fs::path> compare;
    std::optional<fs::path> audio;
    std::optional<fs::path> audio_a;
    std::optional<fs::path> audio_b;
    std::optional<fs::path> out;
};

std::string row_name(const fs::path& file, std::size_t k, std::size_t count) {
    std::string name = file.filename().string();
    if (count > 1) name += "#" + std::to_string(k);
    return name;
}

// A reference is either a saved report (object or list of named rows) or a trace file.
std::vector<ReportRow> load_reference(const fs::path& path) {
    const std::string text = read_text_file(path);
    if (path.extension() != ".jsonl") {
        ojson j;
        try {
            j = ojson::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("malformed reference " + path.string() + ": " + e.what());
        }
        if (j.is_object() && j.contains("overlaps_per_min")) return {{"reference", report_from_json(j)}};
        if (j.is_object() && j.contains("rows")) {
            std::vector<ReportRow> rows;
            for (const auto& r : j.at("rows"))
                rows.push_back({r.value("name", std::string("reference")), report_from_json(r.at("report"))});
            return rows;
        }
    }
    std::vector<ReportRow> rows;
    const auto traces = read_traces(path);
    for (std::size_t k = 0; k < traces.size(); ++k)
        rows.push_back({"reference:" + row_name(path, k, traces.size()), conversation_report(traces[k])});
    return rows;
}

int cmd_analyze(const AnalyzeArgs& a, const PipelineConfig& cfg, std::ostream& out, std::ostream&) {
    const std::string format = check_format(a.format.value_or(cfg.report_format));
    const auto files = expand_inputs(a.inputs.empty() ? cfg.inputs : a.inputs);

    std::optional<StereoPcm> audio;
    if (a.audio) audio = load_dyadic_pcm(*a.audio);
    else if (a.audio_a || a.audio_b) {
        if (!a.audio_a || !a.audio_b) throw ValidationError("--audio-a and --audio-b go together");
        audio = load_dyadic_pcm(*a.audio_a, *a.audio_b);
    }

    struct Item {
        fs::path file;
        std::size_t k, count;
        ConversationTrace trace;
    };
    std::vector<Item> items;
    for (const auto& f : files) {
        auto traces = read_traces(f);
        for (std::size_t k = 0; k < traces.size(); ++k) items.push_back({f, k, traces.size(), std::move(traces[k])});
    }
    if (audio && items.size() != 1) throw ValidationError("audio can only accompany a single conversation");

    const auto rows = parallel_map<ReportRow>(items.size(), [&](std::size_t i) {
        const auto& it = items[i];
        return ReportRow{row_name(it.file, it.k, it.count), conversation_report(it.trace, audio ? &*audio : nullptr)};
    });
    std::vector<ReportRow> reference;
    if (a.compare) reference = load_reference(*a.compare);

    std::string text;
    if (format == "json") {
        if (rows.size() == 1 && reference.empty()) {
            text = report_to_json(rows[0].report).dump(2) + "\n";
        } else {
            ojson j = ojson::object();
            auto list = [](const std::vector<ReportRow>& rs) {
                ojson arr = ojson::array();
                for (const auto& r : rs) arr.push_back({{"name", r.name}, {"report", report_to_json(r.report)}});
                return arr;
            };
            j["rows"] = list(rows);
            if (rows.size() > 1) j["mean"] = report_to_json(mean_report(rows));
            if (!reference.empty()) j["reference"] = list(reference);
            text = j.dump(2) + "\n";
        }
    } else {
        std::vector<ReportRow> table = rows;
        if (rows.size() > 1) table.push_back({"mean", mean_report(rows)});
        table.insert(table.end(), reference.begin(), reference.end());
        text = format_report_table(table);
    }
    emit(a.out ? a.out : cfg.output, text, out);
    return 0;
}

// ---- ingest -----------------------------------------------------------------

struct IngestArgs {
    std::optional<fs::path> wav;
    std::optional<fs::path> wav_a;
    std::optional<fs::path> wav_b;
    std::optional<double> threshold_db;
    std::optional<std::int64_t> min_speech_ms;
    std::optional<std::int64_t> min_gap_ms;
    std::optional<fs::path> out;
};

int cmd_ingest(const IngestArgs& a, const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
    VadConfig vad = cfg.vad;
    if (a.threshold_db) vad.energy_threshold_db = *a.threshold_db;
    if (a.min_speech_ms) vad.min_speech_ms = *a.min_speech_ms;
    if (a.min_gap_ms) vad.min_gap_ms = *a.min_gap_ms;

    StereoPcm pcm;
    if (a.wav) pcm = load_dyadic_pcm(*a.wav);
    else if (a.wav_a && a.wav_b) pcm = load_dyadic_pcm(*a.wav_a, *a.wav_b);
    else if (!cfg.inputs.empty()) pcm = load_dyadic_pcm(cfg.inputs.front());
    else throw ValidationError("ingest needs --wav or both --wav-a and --wav-b");

    const ConversationTrace trace = vad_from_samples(pcm, vad);
    const auto target = a.out ? a.out : cfg.output;
    emit(target, serialize_trace(trace) + "\n", out);
    (target ? out : err) << "ingested " << seconds(trace.duration_ms) << "  A speech "
                         << seconds(total_speech_ms(trace, Speaker::A)) << "  B speech "
                         << seconds(total_speech_ms(trace, Speaker::B)) << "\n";
    return 0;
}

// ---- tokenize ---------------------------------------------------------------

struct TokenizeArgs {
    std::optional<fs::path> input;
    std::optional<fs::path> vocab;
    std::optional<int> num_merges;
    std::optional<int> base_alphabet_size;
    bool no_dedup = false;
    std::optional<fs::path> out;
};

std::vector<UnitSequence> sequences_from(const ojson& j) {
    std::vector<UnitSequence> seqs;
    if (j.is_object()) {
        for (const auto& ch : trace_from_json(j).channels)
            for (const auto& seg : ch)
                if (seg.units) seqs.push_back(*seg.units);
    } else if (j.is_array() && (j.empty() || j.front().is_array())) {
        for (const auto& s : j) seqs.push_back(s.get<UnitSequence>());
    } else if (j.is_array()) {
        seqs.push_back(j.get<UnitSequence>());
    } else {
        throw ValidationError("expected a unit sequence, a list of sequences, or a trace");
    }
    return seqs;
}

// Accepts one JSON document or JSON lines, each line a sequence or a trace.
std::vector<UnitSequence> read_sequences(const fs::path& path) {
    const std::string text = read_text_file(path);
    try {
        try {
            return sequences_from(ojson::parse(text));
        } catch (const nlohmann::json::parse_error&) {
            std::vector<UnitSequence> seqs;
            std::istringstream lines(text);
            for (std::string line; std::getline(lines, line);) {
                if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                for (auto& s : sequences_from(ojson::parse(line))) seqs.push_back(std::move(s));
            }
            return seqs;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed unit file " + path.string() + ": " + e.what());
    }
}

std::string sequences_to_lines(const std::vector<UnitSequence>& seqs) {
    std::string text;
    for (const auto& s : seqs) text += ojson(s).dump() + "\n";
    return text;
}

int cmd_tokenize(const std::string& verb, const TokenizeArgs& a, const PipelineConfig& cfg, std::ostream& out) {
    const fs::path input = a.input ? *a.input
                           : !cfg.inputs.empty() ? cfg.inputs.front()
                                                 : throw ValidationError("tokenize needs --input");
    auto seqs = read_sequences(input);
    const auto target = a.out ? a.out : cfg.output;

    if (verb == "train") {
        if (!a.no_dedup)
            for (auto& s : seqs) s = dedup(s);
        const BpeVocab vocab = bpe_train(seqs, a.num_merges.value_or(cfg.num_merges),
                                         a.base_alphabet_size.value_or(cfg.base_alphabet_size));
        emit(target, vocab_to_json(vocab).dump() + "\n", out);
        return 0;
    }
    if (!a.vocab) throw ValidationError(verb + " needs --vocab");
    const BpeVocab vocab = vocab_from_json(ojson_parse(read_text_file(*a.vocab)));
    for (auto& s : seqs) {
        if (verb == "encode") s = bpe_encode(vocab, a.no_dedup ? s : dedup(s));
        else s = bpe_decode(vocab, s);
    }
    emit(target, sequences_to_lines(seqs), out);
    return 0;
}

// ---- eval-actions -----------------------------------------------------------

struct EvalArgs {
    std::optional<fs::path> gold;
    std::optional<fs::path> pred;
    std::optional<std::string> format;
    std::optional<fs::path> out;
};

struct Labeled {
    std::optional<std::string> agent;
    std::optional<int> tick;
    Action action;
};

std::vector<Labeled> read_actions(const fs::path& path) {
    std::vector<Labeled> rows;
    std::istringstream lines(read_text_file(path));
    std::size_t n = 0;
    for (std::string line; std::getline(lines, line);) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = ojson::parse(line);
            Labeled l{std::nullopt, std::nullopt, parse_action(j.at("action").get<std::string>())};
            if (j.contains("agent")) l.agent = j["agent"].get<std::string>();
            if (j.contains("tick_index")) l.tick = j["tick_index"].get<int>();
            rows.push_back(l);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return rows;
}

int cmd_eval_actions(const EvalArgs& a, const PipelineConfig& cfg, std::ostream& out) {
    if (!a.gold || !a.pred) throw ValidationError("eval-actions needs --gold and --pred");
    const std::string format = check_format(a.format.value_or(cfg.report_format));
    const auto gold = read_actions(*a.gold);
    const auto pred = read_actions(*a.pred);
    if (gold.size() != pred.size())
        throw ValidationError("gold has " + std::to_string(gold.size()) + " samples but predictions have " +
                              std::to_string(pred.size()));
    std::vector<Action> g, p;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const bool same_agent = !gold[i].agent || !pred[i].agent || *gold[i].agent == *pred[i].agent;
        const bool same_tick = !gold[i].tick || !pred[i].tick || *gold[i].tick == *pred[i].tick;
        if (!same_agent || !same_tick)
            throw ValidationError("sample " + std::to_string(i + 1) + " is misaligned between gold and predictions");
        g.push_back(gold[i].action);
        p.push_back(pred[i].action);
    }
    const ClassReport report = classification_report(g, p);
    emit(a.out ? a.out : cfg.output,
         format == "json" ? class_report_to_json(report).dump(2) + "\n" : format_class_report(report), out);
    return 0;
}

} // namespace

// ---- configuration ----------------------------------------------------------

PipelineConfig pipeline_config_from_json(const std::string& text) {
    PipelineConfig cfg;
    try {
        const ojson j = ojson::parse(text);
        if (!j.is_object()) throw ValidationError("pipeline config must be a JSON object");
        if (auto p = j.find("paths"); p != j.end()) {
            if (auto in = p->find("inputs"); in != p->end())
                for (const auto& s : *in) cfg.inputs.emplace_back(s.get<std::string>());
            if (auto o = p->find("outputs"); o != p->end() && !o->is_null()) cfg.output = o->get<std::string>();
            if (auto o = p->find("output"); o != p->end() && !o->is_null()) cfg.output = o->get<std::string>();
        }
        if (auto v = j.find("vad"); v != j.end()) {
            cfg.vad.frame_ms = v->value("frame_ms", cfg.vad.frame_ms);
            cfg.vad.energy_threshold_db = v->value("energy_threshold_db", cfg.vad.energy_threshold_db);
            cfg.vad.min_speech_ms = v->value("min_speech_ms", cfg.vad.min_speech_ms);
            cfg.vad.min_gap_ms = v->value("min_gap_ms", cfg.vad.min_gap_ms);
        }
        cfg.window_ms = j.value("window_ms", cfg.window_ms);
        if (auto b = j.find("bpe"); b != j.end()) {
            cfg.num_merges = b->value("num_merges", cfg.num_merges);
            cfg.base_alphabet_size = b->value("base_alphabet_size", cfg.base_alphabet_size);
        }
        if (auto s = j.find("sim"); s != j.end()) cfg.sim = run_from_json(*s);
        cfg.report_format = check_format(j.value("report_format", cfg.report_format));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed pipeline config: ") + e.what());
    }
    for (const auto& p : cfg.inputs)
        if (!fs::exists(p)) throw ValidationError("configured input not found: " + p.string());
    if (cfg.output && cfg.output->has_parent_path() && !fs::is_directory(cfg.output->parent_path()))
        throw ValidationError("configured output directory does not exist: " + cfg.output->parent_path().string());
    return cfg;
}

std::optional<std::string> system_env(const std::string& name) {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
    CLI::App app{"Duplex dialogue engine: label, tokenize, simulate and analyze spoken conversations", "dde"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Print help for every subcommand and exit");
    const std::vector<std::string> policies{"cascaded", "stochastic", "scripted"};
    const std::vector<std::string> formats{"json", "table"};

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Run a seeded two-agent self-chat and write its trace");
    s->add_option("--policy", sim.policy, "policy for both agents")->check(CLI::IsMember(policies));
    s->add_option("--duration-s", sim.duration_s, "conversation length in seconds");
    s->add_option("--seed", sim.seed, "run seed");
    s->add_option("--window-ms", sim.window_ms, "context window the policies observe");
    s->add_option("--tick-ms", sim.tick_ms, "decision interval (fixed at 160)");
    s->add_option("--eot-silence-ms", sim.eot_silence_ms, "cascaded end-of-turn silence");
    s->add_option("--config", sim.config, "run config JSON");
    s->add_option("--out", sim.out, "trace output path");

    LabelArgs lab;
    auto* l = app.add_subcommand("label", "Turn traces into per-tick training samples");
    l->add_option("inputs", lab.inputs, "trace files or directories");
    l->add_option("--speaker", lab.speaker, "A, B or both")->check(CLI::IsMember({"A", "B", "both"}));
    l->add_option("--window-ms", lab.window_ms, "context window length");
    l->add_option("--tick-ms", lab.tick_ms, "decision interval (fixed at 160)");
    l->add_option("--vocab", lab.vocab, "BPE vocabulary for SPK targets");
    l->add_flag("--inline-context", lab.inline_context, "embed the context window in every sample");
    l->add_option("--format", lab.format, "histogram format")->check(CLI::IsMember(formats));
    l->add_option("--out", lab.out, "JSON-lines output path");

    AnalyzeArgs an;
    auto* z = app.add_subcommand("analyze", "Report turn-taking statistics for traces");
    z->add_option("inputs", an.inputs, "trace files or directories");
    z->add_option("--format", an.format, "json or table")->check(CLI::IsMember(formats));
    z->add_option("--compare", an.compare, "reference report or trace shown alongside");
    z->add_option("--audio", an.audio, "stereo 16kHz WAV for prosody metrics");
    z->add_option("--audio-a", an.audio_a, "mono 16kHz WAV for speaker A");
    z->add_option("--audio-b", an.audio_b, "mono 16kHz WAV for speaker B");
    z->add_option("--out", an.out, "report output path");

    IngestArgs ing;
    auto* g = app.add_subcommand("ingest", "Detect speech in dyadic audio and write a trace");
    g->add_option("--wav", ing.wav, "stereo 16kHz WAV, channel 0 is A");
    g->add_option("--wav-a", ing.wav_a, "mono 16kHz WAV for speaker A");
    g->add_option("--wav-b", ing.wav_b, "mono 16kHz WAV for speaker B");
    g->add_option("--threshold-db", ing.threshold_db, "energy above the noise floor that counts as speech");
    g->add_option("--min-speech-ms", ing.min_speech_ms, "shortest kept speech segment");
    g->add_option("--min-gap-ms", ing.min_gap_ms, "shortest kept silence");
    g->add_option("--out", ing.out, "trace output path");

    TokenizeArgs tok;
    auto* t = app.add_subcommand("tokenize", "Deduplicate units and train or apply BPE");
    t->require_subcommand(1);
    std::string verb;
    for (const char* name : {"train", "encode", "decode"}) {
        auto* v = t->add_subcommand(name, std::string(name) + " unit sequences");
        v->add_option("--input", tok.input, "unit sequences (JSON, JSON lines or a trace)");
        v->add_option("--out", tok.out, "output path");
        v->add_flag("--no-dedup", tok.no_dedup, "keep repeated units");
        if (std::string(name) == "train") {
            v->add_option("--num-merges", tok.num_merges, "merge budget");
            v->add_option("--base-alphabet-size", tok.base_alphabet_size, "raw unit alphabet size");
        } else {
            v->add_option("--vocab", tok.vocab, "trained vocabulary");
        }
        v->callback([&verb, name] { verb = name; });
    }

    EvalArgs ev;
    auto* e = app.add_subcommand("eval-actions", "Score predicted actions against gold samples");
    e->add_option("--gold", ev.gold, "gold samples (JSON lines)");
    e->add_option("--pred", ev.pred, "predicted samples (JSON lines)");
    e->add_option("--format", ev.format, "json or table")->check(CLI::IsMember(formats));
    e->add_option("--out", ev.out, "report output path");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& ex) {
        return app.exit(ex, out, err);
    }

    try {
        PipelineConfig cfg;
        if (auto path = env("DDE_CONFIG"); path && !path->empty())
            cfg = pipeline_config_from_json(read_text_file(*path));
        if (s->parsed()) return cmd_simulate(sim, cfg, out, err);
        if (l->parsed()) return cmd_label(lab, cfg, out, err);
        if (z->parsed()) return cmd_analyze(an, cfg, out, err);
        if (g->parsed()) return cmd_ingest(ing, cfg, out, err);
        if (t->parsed()) return cmd_tokenize(verb, tok, cfg, out);
        if (e->parsed()) return cmd_eval_actions(ev, cfg, out);
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace dde::cli
