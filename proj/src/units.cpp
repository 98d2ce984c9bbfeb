#include "dde/units.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "dde/error.hpp"

namespace dde {

namespace {

using Pair = std::pair<int, int>;

// Replaces non-overlapping occurrences of (left, right), scanning left to right.
void apply_merge(UnitSequence& seq, const BpeMerge& m) {
    if (seq.size() < 2) return;
    std::size_t out = 0;
    for (std::size_t i = 0; i < seq.size();) {
        if (i + 1 < seq.size() && seq[i] == m.left && seq[i + 1] == m.right) {
            seq[out++] = m.id;
            i += 2;
        } else {
            seq[out++] = seq[i++];
        }
    }
    seq.resize(out);
}

void check_ids(std::span<const int> seq, int limit, const char* what) {
    for (int u : seq)
        if (u < 0 || u >= limit)
            throw ValidationError(std::string(what) + ": id " + std::to_string(u) + " outside [0, " +
                                  std::to_string(limit) + ")");
}

} // namespace

UnitSequence dedup(std::span<const int> seq) {
    UnitSequence out;
    out.reserve(seq.size());
    for (int u : seq)
        if (out.empty() || out.back() != u) out.push_back(u);
    return out;
}

BpeVocab bpe_train(std::span<const UnitSequence> corpus, int num_merges, int base_alphabet_size) {
    if (num_merges < 0) throw ValidationError("num_merges must be non-negative");
    if (base_alphabet_size <= 0) throw ValidationError("base_alphabet_size must be positive");
    for (const auto& seq : corpus) check_ids(seq, base_alphabet_size, "bpe_train");

    BpeVocab vocab;
    vocab.base_alphabet_size = base_alphabet_size;
    std::vector<UnitSequence> work(corpus.begin(), corpus.end());
    for (int round = 0; round < num_merges; ++round) {
        std::map<Pair, std::int64_t> counts;
        for (const auto& seq : work)
            for (std::size_t i = 0; i + 1 < seq.size(); ++i) ++counts[{seq[i], seq[i + 1]}];

        // std::map iterates in ascending pair order, so strict '>' keeps the smallest on ties
        const std::pair<const Pair, std::int64_t>* best = nullptr;
        for (const auto& entry : counts)
            if (best == nullptr || entry.second > best->second) best = &entry;
        if (best == nullptr || best->second < 2) break;

        const BpeMerge m{best->first.first, best->first.second, vocab.size()};
        vocab.merges.push_back(m);
        for (auto& seq : work) apply_merge(seq, m);
    }
    return vocab;
}

UnitSequence bpe_encode(const BpeVocab& vocab, std::span<const int> seq) {
    check_ids(seq, vocab.base_alphabet_size, "bpe_encode");
    UnitSequence out(seq.begin(), seq.end());
    for (const auto& m : vocab.merges) apply_merge(out, m);
    return out;
}

UnitSequence bpe_decode(const BpeVocab& vocab, std::span<const int> seq) {
    check_ids(seq, vocab.size(), "bpe_decode");
    UnitSequence out;
    std::vector<int> stack;
    for (int id : seq) {
        stack.push_back(id);
        while (!stack.empty()) {
            const int top = stack.back();
            stack.pop_back();
            if (top < vocab.base_alphabet_size) {
                out.push_back(top);
            } else {
                const auto& m = vocab.merges[static_cast<std::size_t>(top - vocab.base_alphabet_size)];
                stack.push_back(m.right);
                stack.push_back(m.left);
            }
        }
    }
    return out;
}

std::size_t edit_distance(std::span<const int> reference, std::span<const int> hypothesis) {
    std::vector<std::size_t> prev(hypothesis.size() + 1), cur(hypothesis.size() + 1);
    for (std::size_t j = 0; j <= hypothesis.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= reference.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= hypothesis.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
            cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
        }
        std::swap(prev, cur);
    }
    return prev[hypothesis.size()];
}

double unit_error_rate(std::span<const int> reference, std::span<const int> hypothesis) {
    if (reference.empty()) throw ValidationError("unit error rate needs a non-empty reference");
    return static_cast<double>(edit_distance(reference, hypothesis)) / static_cast<double>(reference.size());
}

nlohmann::ordered_json vocab_to_json(const BpeVocab& vocab) {
    nlohmann::ordered_json j;
    j["base_alphabet_size"] = vocab.base_alphabet_size;
    auto merges = nlohmann::ordered_json::array();
    for (const auto& m : vocab.merges) merges.push_back({m.left, m.right, m.id});
    j["merges"] = std::move(merges);
    return j;
}

BpeVocab vocab_from_json(const nlohmann::ordered_json& j) {
    BpeVocab vocab;
    try {
        vocab.base_alphabet_size = j.at("base_alphabet_size").get<int>();
        if (vocab.base_alphabet_size <= 0) throw ValidationError("base_alphabet_size must be positive");
        for (const auto& mj : j.at("merges")) {
            if (!mj.is_array() || mj.size() != 3) throw ValidationError("merge must be [left, right, new]");
            const BpeMerge m{mj[0].get<int>(), mj[1].get<int>(), mj[2].get<int>()};
            if (m.id != vocab.size())
                throw ValidationError("merge ids must be consecutive from base_alphabet_size");
            if (m.left < 0 || m.left >= m.id || m.right < 0 || m.right >= m.id)
                throw ValidationError("merge operand is not a base or earlier id");
            vocab.merges.push_back(m);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed vocab: ") + e.what());
    }
    return vocab;
}

} // namespace dde
