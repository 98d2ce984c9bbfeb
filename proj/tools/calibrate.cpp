// Seeded parameter search for the stochastic duplex policy. Every candidate
// is scored on the same seed set against the full-duplex target row
// (overlaps 5.7/min, backchannels 2.1/min, pauses 12.2/min, gap 393ms) by
// summed squared relative error.

#include <cmath>
#include <cstdio>
#include <future>
#include <vector>

#include <CLI11.hpp>

#include "dde/analytics.hpp"
#include "dde/sim.hpp"

namespace {

struct Targets {
    double overlaps = 5.7, backchannels = 2.1, pauses = 12.2, gap_ms = 393;
};

struct Score {
    double overlaps = 0, backchannels = 0, pauses = 0, gap_ms = 0;
    double loss = 0;
};

Score evaluate(const dde::StochasticConfig& cfg, int seeds, std::int64_t duration_ms) {
    std::vector<std::future<dde::ConversationReport>> jobs;
    for (int s = 1; s <= seeds; ++s)
        jobs.push_back(std::async(std::launch::async, [=] {
            return dde::conversation_report(dde::run_selfchat(dde::stochastic_run(duration_ms, s, cfg)));
        }));
    Score sc;
    int gaps = 0;
    for (auto& j : jobs) {
        const auto r = j.get();
        sc.overlaps += r.overlaps_per_min;
        sc.backchannels += r.backchannels_per_min;
        sc.pauses += r.pauses_per_min;
        if (r.avg_gap_ms) {
            sc.gap_ms += *r.avg_gap_ms;
            ++gaps;
        }
    }
    sc.overlaps /= seeds;
    sc.backchannels /= seeds;
    sc.pauses /= seeds;
    sc.gap_ms = gaps ? sc.gap_ms / gaps : 0;
    const Targets t;
    auto rel = [](double v, double target) { return (v - target) / target; };
    sc.loss = std::pow(rel(sc.overlaps, t.overlaps), 2) + std::pow(rel(sc.backchannels, t.backchannels), 2) +
              std::pow(rel(sc.pauses, t.pauses), 2) + std::pow(rel(sc.gap_ms, t.gap_ms), 2);
    return sc;
}

void print(const dde::StochasticConfig& c, const Score& s) {
    std::printf("p_bc=%.4f bc_ms=%lld pause_min=%lld p_init=%.2f min_gap=%d p_stop=%.2f pause_rate=%.2f | overlaps %.2f bc %.2f pauses %.2f "
                "gap %.0f | loss %.4f\n",
                c.p_backchannel_per_tick, (long long)c.backchannel_ms, (long long)c.pause_min_ms, c.p_initiate_per_tick_after_gap, c.min_gap_ticks,
                c.p_stop_on_overlap_per_tick, c.pause_insertion_rate, s.overlaps, s.backchannels, s.pauses, s.gap_ms,
                s.loss);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Calibrate the stochastic duplex policy"};
    int seeds = 50;
    int duration_s = 300;
    bool search = false;
    app.add_option("--seeds", seeds, "number of seeds per candidate")->check(CLI::PositiveNumber);
    app.add_option("--duration-s", duration_s, "run length in seconds")->check(CLI::PositiveNumber);
    app.add_flag("--search", search, "grid-search around the shipped default");
    CLI11_PARSE(app, argc, argv);

    const std::int64_t duration_ms = static_cast<std::int64_t>(duration_s) * 1000;
    const auto base = dde::default_stochastic_config();
    if (!search) {
        print(base, evaluate(base, seeds, duration_ms));
        return 0;
    }

    dde::StochasticConfig best = base;
    Score best_score = evaluate(base, seeds, duration_ms);
    for (double p_bc : {0.006, 0.008, 0.01, 0.012})
      for (std::int64_t bc_ms : {480, 640, 800})
        for (double p_init : {0.7, 0.9})
          for (int min_gap : {1, 2})
            for (double p_stop : {0.05, 0.1, 0.2})
              for (double rate : {0.3, 0.4, 0.5})
                for (std::int64_t pause_min : {160, 240}) {
                        dde::StochasticConfig c = base;
                        c.backchannel_ms = bc_ms;
                        c.pause_min_ms = pause_min;
                        c.p_backchannel_per_tick = p_bc;
                        c.p_initiate_per_tick_after_gap = p_init;
                        c.min_gap_ticks = min_gap;
                        c.p_stop_on_overlap_per_tick = p_stop;
                        c.pause_insertion_rate = rate;
                        const Score s = evaluate(c, seeds, duration_ms);
                        if (s.loss < best_score.loss) {
                            best = c;
                            best_score = s;
                            print(best, best_score);
                        }
                    }
    std::printf("best:\n");
    print(best, best_score);
    return 0;
}
