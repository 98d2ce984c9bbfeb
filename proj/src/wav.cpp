#include "dde/wav.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "dde/error.hpp"

namespace dde {

namespace {

std::uint32_t le32(const unsigned char* p) {
    return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
std::uint16_t le16(const unsigned char* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }

void put32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>(v >> 8));
}

} // namespace

WavAudio read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 || std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
        throw ValidationError(path.string() + " is not a RIFF/WAVE file");

    int channels = 0, rate = 0, bits = 0;
    const unsigned char* data = nullptr;
    std::size_t data_size = 0;
    std::size_t pos = 12;
    while (pos + 8 <= buf.size()) {
        const std::uint32_t size = le32(&buf[pos + 4]);
        const unsigned char* body = &buf[pos + 8];
        const std::size_t avail = buf.size() - pos - 8;
        if (std::memcmp(&buf[pos], "fmt ", 4) == 0) {
            if (size < 16 || avail < 16) throw ValidationError("truncated fmt chunk");
            if (le16(body) != 1) throw ValidationError("only PCM WAV is supported");
            channels = le16(body + 2);
            rate = static_cast<int>(le32(body + 4));
            bits = le16(body + 14);
        } else if (std::memcmp(&buf[pos], "data", 4) == 0) {
            data = body;
            data_size = std::min<std::size_t>(size, avail);
            break;
        }
        pos += 8 + size + (size & 1);
    }
    if (channels == 0 || data == nullptr) throw ValidationError(path.string() + " lacks fmt or data chunk");
    if (bits != 16) throw ValidationError("only 16-bit PCM is supported");

    WavAudio audio;
    audio.sample_rate = rate;
    audio.channels.assign(channels, {});
    const std::size_t frames = data_size / (2 * channels);
    for (auto& ch : audio.channels) ch.reserve(frames);
    for (std::size_t i = 0; i < frames; ++i)
        for (int c = 0; c < channels; ++c)
            audio.channels[c].push_back(static_cast<std::int16_t>(le16(data + 2 * (i * channels + c))));
    return audio;
}

void write_wav(const std::filesystem::path& path, const WavAudio& audio) {
    if (audio.channels.empty()) throw ValidationError("no channels to write");
    const auto channels = static_cast<std::uint16_t>(audio.channels.size());
    const std::size_t frames = audio.channels[0].size();
    for (const auto& ch : audio.channels)
        if (ch.size() != frames) throw ValidationError("channels have different lengths");
    const auto data_size = static_cast<std::uint32_t>(frames * channels * 2);

    std::string out = "RIFF";
    put32(out, 36 + data_size);
    out += "WAVEfmt ";
    put32(out, 16);
    put16(out, 1);
    put16(out, channels);
    put32(out, static_cast<std::uint32_t>(audio.sample_rate));
    put32(out, static_cast<std::uint32_t>(audio.sample_rate) * channels * 2);
    put16(out, static_cast<std::uint16_t>(channels * 2));
    put16(out, 16);
    out += "data";
    put32(out, data_size);
    for (std::size_t i = 0; i < frames; ++i)
        for (const auto& ch : audio.channels) put16(out, static_cast<std::uint16_t>(ch[i]));

    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

std::array<std::vector<std::int16_t>, 2> load_dyadic_pcm(const std::filesystem::path& stereo) {
    auto audio = read_wav(stereo);
    if (audio.sample_rate != 16000) throw ValidationError("expected 16 kHz audio, got " + std::to_string(audio.sample_rate));
    if (audio.channels.size() != 2) throw ValidationError("expected a 2-channel file");
    return {std::move(audio.channels[0]), std::move(audio.channels[1])};
}

std::array<std::vector<std::int16_t>, 2> load_dyadic_pcm(const std::filesystem::path& mono_a,
                                                         const std::filesystem::path& mono_b) {
    std::array<std::vector<std::int16_t>, 2> out;
    const std::filesystem::path paths[2] = {mono_a, mono_b};
    for (int c = 0; c < 2; ++c) {
        auto audio = read_wav(paths[c]);
        if (audio.sample_rate != 16000)
            throw ValidationError("expected 16 kHz audio, got " + std::to_string(audio.sample_rate));
        if (audio.channels.size() != 1) throw ValidationError(paths[c].string() + " is not mono");
        out[c] = std::move(audio.channels[0]);
    }
    return out;
}

} // namespace dde
