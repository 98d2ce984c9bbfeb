#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace dde {

struct WavAudio {
    int sample_rate = 16000;
    std::vector<std::vector<std::int16_t>> channels;
};

// PCM16 RIFF/WAVE only. Throws ValidationError on anything else.
WavAudio read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const WavAudio& audio);

// Loads a 16 kHz stereo file, or two 16 kHz mono files, as speaker A/B channels.
std::array<std::vector<std::int16_t>, 2> load_dyadic_pcm(const std::filesystem::path& stereo);
std::array<std::vector<std::int16_t>, 2> load_dyadic_pcm(const std::filesystem::path& mono_a,
                                                         const std::filesystem::path& mono_b);

} // namespace dde
