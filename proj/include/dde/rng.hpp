#pragma once

#include <cstdint>
#include <random>

namespace dde {

// Seeded generator with portable draws: the engine is std::mt19937_64 and all
// derived variates are computed here, not by <random> distributions, so a seed
// produces the same stream on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    double uniform(); // [0, 1)
    bool bernoulli(double p) { return p > 0 && uniform() < p; }
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi); // inclusive
    double normal();
    int poisson(double mean);

    bool operator==(const Rng&) const = default;

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Agent k's stream seed: splitmix64(run_seed + (k + 1) * 0x9E3779B97F4A7C15).
std::uint64_t agent_stream_seed(std::uint64_t run_seed, int agent_index);

} // namespace dde
