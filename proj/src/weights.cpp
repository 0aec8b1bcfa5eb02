#include "irmen/weights.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace irmen {

namespace {

constexpr char kMagic[4] = {'I', 'R', 'M', 'W'};

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
    throw std::runtime_error("weights: " + origin + ": " + what);
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(std::uint8_t(v));
    out.push_back(std::uint8_t(v >> 8));
    out.push_back(std::uint8_t(v >> 16));
    out.push_back(std::uint8_t(v >> 24));
}

void put_f64(std::vector<std::uint8_t>& out, double x) {
    std::uint64_t v;
    std::memcpy(&v, &x, 8);
    for (int i = 0; i < 8; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

struct Reader {
    const std::vector<std::uint8_t>& bytes;
    const std::string& origin;
    std::size_t pos = 0;

    void need(std::size_t n) {
        if (bytes.size() - pos < n)
            fail(origin, "truncated at byte " + std::to_string(pos) + ", need " +
                             std::to_string(n) + " more");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(bytes[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(bytes[pos + i]) << (8 * i);
        pos += 8;
        double x;
        std::memcpy(&x, &v, 8);
        return x;
    }
    std::string str(std::size_t n) {
        need(n);
        std::string s(bytes.begin() + pos, bytes.begin() + pos + n);
        pos += n;
        return s;
    }
};

std::uint32_t crc_of(const std::uint8_t* p, std::size_t n) {
    return static_cast<std::uint32_t>(crc32(0L, p, static_cast<uInt>(n)));
}

}  // namespace

const WeightTensor* WeightsBundle::find(const std::string& name) const {
    for (const auto& t : tensors)
        if (t.name == name) return &t;
    return nullptr;
}

const WeightTensor& WeightsBundle::at(const std::string& name) const {
    if (const auto* t = find(name)) return *t;
    std::string have;
    for (const auto& t : tensors) have += (have.empty() ? "" : ", ") + t.name;
    throw std::runtime_error("weights: tensor \"" + name + "\" not found (bundle has: " + have +
                             ")");
}

std::vector<std::uint8_t> encode_weights(const WeightsBundle& w) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32(out, w.version);
    put_u32(out, static_cast<std::uint32_t>(w.tensors.size()));
    for (const auto& t : w.tensors) {
        if (t.data.size() != t.size())
            throw std::invalid_argument("weights: tensor \"" + t.name +
                                        "\" data size does not match its shape");
        put_u32(out, static_cast<std::uint32_t>(t.name.size()));
        out.insert(out.end(), t.name.begin(), t.name.end());
        put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
        for (auto d : t.shape) put_u32(out, d);
        for (double x : t.data) put_f64(out, x);
    }
    put_u32(out, crc_of(out.data(), out.size()));
    return out;
}

WeightsBundle decode_weights(const std::vector<std::uint8_t>& bytes, const std::string& origin) {
    if (bytes.size() < 16) fail(origin, "too short to be an IRMW file");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) fail(origin, "bad magic, want \"IRMW\"");
    const std::uint32_t stored = [&] {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(bytes[bytes.size() - 4 + i]) << (8 * i);
        return v;
    }();
    const std::uint32_t actual = crc_of(bytes.data(), bytes.size() - 4);
    if (stored != actual)
        fail(origin, "checksum mismatch: stored " + std::to_string(stored) + ", computed " +
                         std::to_string(actual));

    Reader r{bytes, origin, 4};
    WeightsBundle w;
    w.version = r.u32();
    if (w.version != 1)
        fail(origin, "unsupported version " + std::to_string(w.version));
    const std::uint32_t count = r.u32();
    w.tensors.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        WeightTensor t;
        const std::uint32_t name_len = r.u32();
        if (name_len > 4096) fail(origin, "implausible tensor name length");
        t.name = r.str(name_len);
        const std::uint32_t rank = r.u32();
        if (rank > 8) fail(origin, "implausible tensor rank");
        t.shape.resize(rank);
        std::size_t n = 1;
        for (auto& d : t.shape) {
            d = r.u32();
            n *= d;
        }
        if (n > (1u << 26)) fail(origin, "implausible tensor size");
        t.data.resize(n);
        for (auto& x : t.data) x = r.f64();
        w.tensors.push_back(std::move(t));
    }
    if (r.pos != bytes.size() - 4) fail(origin, "trailing bytes before checksum");
    return w;
}

void save_weights(const std::string& path, const WeightsBundle& w) {
    const auto bytes = encode_weights(w);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(path, "cannot open for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(path, "write failed");
}

WeightsBundle load_weights(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return decode_weights(bytes, path);
}

void quantize_tensor(std::vector<double>& w, int bits) {
    if (bits <= 0 || bits >= 53) return;
    double w_max = 0.0;
    for (double x : w) w_max = std::max(w_max, std::abs(x));
    if (w_max == 0.0) return;
    const double lim = static_cast<double>(1ll << (bits - 1));
    const double step = w_max / lim;
    for (auto& x : w) x = std::clamp(std::round(x / step), -lim, lim) * step;
}

}  // namespace irmen
