#ifndef CCSK_NN_CHECKPOINT_HPP
#define CCSK_NN_CHECKPOINT_HPP

// Checkpoint file layout (all integers and reals little-endian):
//
//   "CCSK"                      magic
//   u32 version                 = 1
//   u32 input_channels, u32 hidden, u32 heads, u32 attention_dim,
//   f64 dropout, u32 classes, u32 window_length, u32 aux
//   u64 config fingerprint
//   u32 tensor count
//   per tensor: u32 name length, name bytes, u32 ndims (= 2),
//               u32 rows, u32 cols, f64 values row-major
//   u64 FNV-1a checksum of every preceding byte

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "ccsk/error.hpp"
#include "ccsk/nn/network.hpp"

namespace ccsk::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

inline std::uint64_t fnv1a(const std::uint8_t* data, std::size_t n)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

class Writer {
public:
    void u32(std::uint32_t v) { le(v, 4); }
    void u64(std::uint64_t v) { le(v, 8); }
    void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
    void bytes(const std::string& s) { buf.insert(buf.end(), s.begin(), s.end()); }
    std::vector<std::uint8_t> buf;

private:
    void le(std::uint64_t v, int n)
    {
        for (int i = 0; i < n; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
};

class Reader {
public:
    Reader(const std::uint8_t* d, std::size_t n) : data_(d), size_(n) {}
    std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
    std::uint64_t u64() { return le(8); }
    double f64() { return std::bit_cast<double>(le(8)); }
    std::string bytes(std::size_t n)
    {
        need(n);
        std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
        pos_ += n;
        return s;
    }
    [[nodiscard]] std::size_t pos() const { return pos_; }

private:
    void need(std::size_t n) const
    {
        if (pos_ + n > size_) throw FormatError("checkpoint truncated");
    }
    std::uint64_t le(int n)
    {
        need(static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
        pos_ += static_cast<std::size_t>(n);
        return v;
    }
    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_{0};
};

} // namespace detail

inline std::vector<std::uint8_t> serialize_params(const NetParams& p)
{
    detail::Writer w;
    w.bytes("CCSK");
    w.u32(kCheckpointVersion);
    const NetConfig& c = p.config;
    w.u32(static_cast<std::uint32_t>(c.input_channels));
    w.u32(static_cast<std::uint32_t>(c.hidden));
    w.u32(static_cast<std::uint32_t>(c.heads));
    w.u32(static_cast<std::uint32_t>(c.attention_dim));
    w.f64(c.dropout);
    w.u32(static_cast<std::uint32_t>(c.classes));
    w.u32(static_cast<std::uint32_t>(c.window_length));
    w.u32(static_cast<std::uint32_t>(c.aux));
    w.u64(p.config_fingerprint);
    std::uint32_t count = 0;
    for_each_tensor(p, [&count](const std::string&, const Mat&) { ++count; });
    w.u32(count);
    for_each_tensor(p, [&w](const std::string& name, const Mat& m) {
        w.u32(static_cast<std::uint32_t>(name.size()));
        w.bytes(name);
        w.u32(2);
        w.u32(static_cast<std::uint32_t>(m.rows()));
        w.u32(static_cast<std::uint32_t>(m.cols()));
        for (Index i = 0; i < m.rows(); ++i)
            for (Index j = 0; j < m.cols(); ++j) w.f64(m(i, j));
    });
    w.u64(detail::fnv1a(w.buf.data(), w.buf.size()));
    return std::move(w.buf);
}

// Parses a checkpoint image. When `expected` is given, its fingerprint must match.
inline NetParams deserialize_params(const std::vector<std::uint8_t>& buf, const std::optional<NetConfig>& expected = {})
{
    if (buf.size() < 12) throw FormatError("checkpoint truncated");
    const std::size_t body = buf.size() - 8;
    detail::Reader tail(buf.data() + body, 8);
    if (tail.u64() != detail::fnv1a(buf.data(), body)) throw FormatError("checkpoint checksum mismatch");

    detail::Reader r(buf.data(), body);
    if (r.bytes(4) != "CCSK") throw FormatError("not a checkpoint (bad magic)");
    const auto version = r.u32();
    if (version != kCheckpointVersion) throw FormatError("unsupported checkpoint version " + std::to_string(version));
    NetConfig c;
    c.input_channels = r.u32();
    c.hidden = r.u32();
    c.heads = r.u32();
    c.attention_dim = r.u32();
    c.dropout = r.f64();
    c.classes = r.u32();
    c.window_length = r.u32();
    const auto aux = r.u32();
    if (aux > 1) throw FormatError("unknown auxiliary channel code");
    c.aux = static_cast<AuxChannel>(aux);
    const auto fp = r.u64();
    try {
        validate(c);
    } catch (const ParameterError& e) {
        throw FormatError(std::string("invalid network config in checkpoint: ") + e.what());
    }
    if (fp != fingerprint(c)) throw FormatError("config fingerprint does not match the stored config");
    if (expected && fingerprint(*expected) != fp)
        throw FormatError("checkpoint was saved for a different network config (fingerprint mismatch)");

    NetParams p = zero_params(c);
    const auto count = r.u32();
    std::uint32_t seen = 0;
    for_each_tensor(p, [&](const std::string& name, Mat& m) {
        ++seen;
        if (seen > count) throw FormatError("checkpoint holds too few tensors");
        const auto len = r.u32();
        if (r.bytes(len) != name) throw FormatError("unexpected tensor in checkpoint, wanted " + name);
        if (r.u32() != 2) throw FormatError("tensor " + name + " is not 2-D");
        const auto rows = r.u32();
        const auto cols = r.u32();
        if (rows != m.rows() || cols != m.cols()) throw FormatError("tensor " + name + " has the wrong shape");
        for (Index i = 0; i < m.rows(); ++i)
            for (Index j = 0; j < m.cols(); ++j) m(i, j) = r.f64();
    });
    if (seen != count) throw FormatError("checkpoint tensor count mismatch");
    if (r.pos() != body) throw FormatError("trailing bytes in checkpoint");
    if (!all_finite(p)) throw FormatError("checkpoint holds non-finite weights");
    return p;
}

// Written to a temporary file and renamed into place.
inline void save_params(const NetParams& p, const std::filesystem::path& path)
{
    const auto buf = serialize_params(p);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write checkpoint " + tmp.string());
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (!out) throw IoError("short write on checkpoint " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline NetParams load_params(const std::filesystem::path& path, const std::optional<NetConfig>& expected = {})
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path.string());
    std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_params(buf, expected);
}

} // namespace ccsk::nn

#endif
