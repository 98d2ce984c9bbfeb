#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

namespace dde {

using UnitSequence = std::vector<int>;

struct BpeMerge {
    int left = 0;
    int right = 0;
    int id = 0;
    bool operator==(const BpeMerge&) const = default;
};

// Merge table over a base alphabet 0..base_alphabet_size-1. New ids are
// assigned consecutively from base_alphabet_size in application order.
struct BpeVocab {
    int base_alphabet_size = 0;
    std::vector<BpeMerge> merges;

    int size() const { return base_alphabet_size + static_cast<int>(merges.size()); }
    bool operator==(const BpeVocab&) const = default;
};

// Collapses runs of identical adjacent ids.
UnitSequence dedup(std::span<const int> seq);

// Greedy BPE. Each round merges the most frequent adjacent pair (ties go to
// the smallest (left, right)); stops early once no pair occurs twice.
BpeVocab bpe_train(std::span<const UnitSequence> corpus, int num_merges, int base_alphabet_size);

UnitSequence bpe_encode(const BpeVocab& vocab, std::span<const int> seq);
UnitSequence bpe_decode(const BpeVocab& vocab, std::span<const int> seq);

std::size_t edit_distance(std::span<const int> reference, std::span<const int> hypothesis);

// Levenshtein distance over reference length; may exceed 1.
double unit_error_rate(std::span<const int> reference, std::span<const int> hypothesis);

inline std::int64_t units_duration_ms(std::span<const int> raw) {
    return 20 * static_cast<std::int64_t>(raw.size());
}

// {base_alphabet_size, merges: [[left, right, new], ...]}
nlohmann::ordered_json vocab_to_json(const BpeVocab& vocab);
BpeVocab vocab_from_json(const nlohmann::ordered_json& j);

} // namespace dde
