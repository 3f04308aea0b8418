// SPDX-License-Identifier: Apache-2.0
#include "starm/codec.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>

namespace starm {

std::string_view to_string(CodecErrc code) {
    switch (code) {
        case CodecErrc::io_error: return "I/O error";
        case CodecErrc::bad_magic: return "bad magic";
        case CodecErrc::bad_version: return "unsupported version";
        case CodecErrc::bad_dtype: return "unsupported dtype";
        case CodecErrc::bad_method: return "unknown method";
        case CodecErrc::bad_transform_kind: return "unknown transform kind";
        case CodecErrc::truncated_header: return "truncated header";
        case CodecErrc::truncated_payload: return "truncated payload";
        case CodecErrc::inconsistent: return "inconsistent sizes";
    }
    return "codec error";
}

CodecError::CodecError(CodecErrc code, const std::string& detail)
    : Error(std::string(to_string(code)) + (detail.empty() ? "" : ": " + detail)), code_(code) {}

namespace {

constexpr std::size_t kChunk = std::size_t{1} << 16;

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }

    template <class T>
    void le(T value) {
        std::uint64_t bits;
        if constexpr (std::is_same_v<T, double>) {
            bits = std::bit_cast<std::uint64_t>(value);
        } else {
            bits = static_cast<std::uint64_t>(value);
        }
        unsigned char buf[sizeof(T)];
        for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(bits >> (8 * i));
        bytes(buf, sizeof(T));
    }

    void doubles(std::span<const double> values) {
        if constexpr (std::endian::native == std::endian::little) {
            bytes(values.data(), values.size() * sizeof(double));
        } else {
            for (double v : values) le(v);
        }
    }

    void finish() {
        out_.flush();
        if (!out_) throw CodecError(CodecErrc::io_error, "write failed");
    }

private:
    std::ostream& out_;
};

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {
        const auto pos = in_.tellg();
        if (pos != std::streampos(-1) && in_.seekg(0, std::ios::end)) {
            const auto end = in_.tellg();
            in_.seekg(pos);
            if (end != std::streampos(-1) && end >= pos) remaining_ = static_cast<std::size_t>(end - pos);
        }
        in_.clear();
        in_.seekg(pos);
        in_.clear();
    }

    std::optional<std::size_t> remaining() const { return remaining_; }

    void bytes(void* p, std::size_t n, CodecErrc on_short) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        const auto got = static_cast<std::size_t>(in_.gcount());
        if (remaining_) *remaining_ -= std::min(*remaining_, got);
        if (got != n) throw CodecError(on_short, "expected " + std::to_string(n) + " bytes, got " + std::to_string(got));
    }

    template <class T>
    T le(CodecErrc on_short = CodecErrc::truncated_header) {
        unsigned char buf[sizeof(T)];
        bytes(buf, sizeof(T), on_short);
        std::uint64_t bits = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
        if constexpr (std::is_same_v<T, double>) {
            return std::bit_cast<double>(bits);
        } else {
            return static_cast<T>(bits);
        }
    }

    /// Fails before allocating when the stream is known to be too short;
    /// otherwise grows the buffer only as data arrives.
    Buffer doubles(std::size_t count, const char* what) {
        if (count > std::numeric_limits<std::size_t>::max() / sizeof(double)) {
            throw CodecError(CodecErrc::inconsistent, std::string(what) + " size overflows");
        }
        if (remaining_ && count * sizeof(double) > *remaining_) {
            throw CodecError(CodecErrc::truncated_payload, std::string(what) + " needs " +
                                                               std::to_string(count * sizeof(double)) + " bytes, " +
                                                               std::to_string(*remaining_) + " available");
        }
        Buffer out;
        if (remaining_) out.reserve(count);
        while (out.size() < count) {
            const auto n = std::min(kChunk, count - out.size());
            const auto start = out.size();
            out.resize(start + n);
            bytes(out.data() + start, n * sizeof(double), CodecErrc::truncated_payload);
        }
        if constexpr (std::endian::native != std::endian::little) {
            for (auto& v : out) {
                auto bits = std::bit_cast<std::uint64_t>(v);
                std::uint64_t swapped = 0;
                for (int i = 0; i < 8; ++i) swapped |= ((bits >> (8 * i)) & 0xFFu) << (8 * (7 - i));
                v = std::bit_cast<double>(swapped);
            }
        }
        return out;
    }

    void require_header_bytes(std::size_t n) {
        if (remaining_ && n > *remaining_) {
            throw CodecError(CodecErrc::truncated_header, "header declares " + std::to_string(n) + " more bytes");
        }
    }

private:
    std::istream& in_;
    std::optional<std::size_t> remaining_;
};

std::size_t checked_mul(std::size_t a, std::size_t b) {
    std::size_t out;
    if (__builtin_mul_overflow(a, b, &out)) throw CodecError(CodecErrc::inconsistent, "declared size overflows");
    return out;
}

void read_magic(Reader& r, const std::array<char, 8>& expected) {
    std::array<char, 8> magic{};
    r.bytes(magic.data(), magic.size(), CodecErrc::truncated_header);
    if (magic != expected) throw CodecError(CodecErrc::bad_magic, std::string(magic.data(), magic.size()));
}

void check_version(std::uint8_t version) {
    if (version != kFormatVersion) throw CodecError(CodecErrc::bad_version, std::to_string(version));
}

Dims read_dims(Reader& r, std::size_t min_order) {
    const auto ndim = r.le<std::uint32_t>();
    if (ndim < min_order) {
        throw CodecError(CodecErrc::inconsistent, "order " + std::to_string(ndim) + " below " + std::to_string(min_order));
    }
    r.require_header_bytes(checked_mul(ndim, 8));
    Dims dims(ndim);
    std::size_t total = 1;
    for (auto& n : dims) {
        const auto v = r.le<std::uint64_t>();
        if (v == 0) throw CodecError(CodecErrc::inconsistent, "zero extent");
        if (v > std::numeric_limits<std::size_t>::max()) throw CodecError(CodecErrc::inconsistent, "extent too large");
        n = static_cast<std::size_t>(v);
        total = checked_mul(total, n);
    }
    checked_mul(total, sizeof(double));
    return dims;
}

void write_dims(Writer& w, const Dims& dims) {
    w.le(static_cast<std::uint32_t>(dims.size()));
    for (auto n : dims) w.le(static_cast<std::uint64_t>(n));
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CodecError(CodecErrc::io_error, "cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CodecError(CodecErrc::io_error, "cannot open " + path.string());
    return in;
}

void expect_eof(std::istream& in, const std::filesystem::path& path) {
    if (in.peek() != std::char_traits<char>::eof()) {
        throw CodecError(CodecErrc::inconsistent, "trailing bytes after payload in " + path.string());
    }
}

}  // namespace

void write_tensor(std::ostream& out, const DenseTensor& t) {
    Writer w(out);
    w.bytes(kTensorMagic.data(), kTensorMagic.size());
    w.le(kFormatVersion);
    w.le(kDtypeFloat64);
    write_dims(w, t.dims());
    w.doubles(t.values());
    w.finish();
}

DenseTensor read_tensor(std::istream& in) {
    Reader r(in);
    read_magic(r, kTensorMagic);
    check_version(r.le<std::uint8_t>());
    const auto dtype = r.le<std::uint8_t>();
    if (dtype != kDtypeFloat64) throw CodecError(CodecErrc::bad_dtype, std::to_string(dtype));
    auto dims = read_dims(r, 1);
    auto data = r.doubles(element_count(dims), "tensor payload");
    return DenseTensor(std::move(dims), std::move(data));
}

void write_tensor(const std::filesystem::path& path, const DenseTensor& t) {
    auto out = open_out(path);
    write_tensor(out, t);
}

DenseTensor read_tensor(const std::filesystem::path& path) {
    auto in = open_in(path);
    auto t = read_tensor(in);
    expect_eof(in, path);
    return t;
}

void write_compressed(std::ostream& out, const CompressedTensor& c) {
    c.validate();
    Writer w(out);
    w.bytes(kCompressedMagic.data(), kCompressedMagic.size());
    w.le(kFormatVersion);
    w.le(static_cast<std::uint8_t>(c.method));
    w.le(c.parameter);
    write_dims(w, c.dims);
    for (const auto& t : c.transforms.transforms()) w.le(static_cast<std::uint8_t>(t.kind()));
    w.le(static_cast<std::uint64_t>(c.ranks.size()));
    for (auto r : c.ranks) w.le(r);
    for (const auto& t : c.transforms.transforms()) {
        if (is_stored(t.kind())) w.doubles(std::span(t.matrix().values()));
    }
    w.doubles(c.u);
    w.doubles(c.g);
    w.finish();
}

CompressedTensor read_compressed(std::istream& in) {
    Reader r(in);
    read_magic(r, kCompressedMagic);
    check_version(r.le<std::uint8_t>());

    CompressedTensor c;
    const auto method = r.le<std::uint8_t>();
    if (method != static_cast<std::uint8_t>(Method::tsvdm1) && method != static_cast<std::uint8_t>(Method::tsvdm2)) {
        throw CodecError(CodecErrc::bad_method, std::to_string(method));
    }
    c.method = static_cast<Method>(method);
    c.parameter = r.le<double>();
    c.dims = read_dims(r, 3);

    const auto trailing = c.dims.size() - 2;
    std::vector<TransformKind> kinds(trailing);
    for (auto& k : kinds) {
        const auto raw = r.le<std::uint8_t>();
        if (raw > static_cast<std::uint8_t>(TransformKind::custom)) {
            throw CodecError(CodecErrc::bad_transform_kind, std::to_string(raw));
        }
        k = static_cast<TransformKind>(raw);
    }

    const auto count = r.le<std::uint64_t>();
    const auto expected = element_count(std::span(c.dims).subspan(2));
    if (count != expected) {
        throw CodecError(CodecErrc::inconsistent,
                         "header declares " + std::to_string(count) + " slices, dims imply " + std::to_string(expected));
    }
    r.require_header_bytes(checked_mul(expected, 4));
    const auto max_rank = std::min(c.dims[0], c.dims[1]);
    c.ranks.resize(expected);
    std::size_t rank_sum = 0;
    for (auto& rank : c.ranks) {
        rank = r.le<std::uint32_t>();
        if (rank > max_rank) throw CodecError(CodecErrc::inconsistent, "rank exceeds min(m,p)");
        rank_sum += rank;
    }

    std::vector<Transform> transforms;
    for (std::size_t k = 0; k < trailing; ++k) {
        const auto n = c.dims[k + 2];
        try {
            switch (kinds[k]) {
                case TransformKind::identity: transforms.push_back(identity_transform(n)); break;
                case TransformKind::dct: transforms.push_back(dct_matrix(n)); break;
                case TransformKind::data_driven:
                case TransformKind::custom: {
                    auto values = r.doubles(checked_mul(n, n), "transform matrix");
                    transforms.push_back(Transform::from_matrix(Matrix(n, n, std::move(values)), kinds[k]));
                    break;
                }
            }
        } catch (const InvalidArgument& e) {
            throw CodecError(CodecErrc::inconsistent, std::string("transform for mode ") + std::to_string(k + 3) +
                                                          ": " + e.what());
        }
    }
    c.transforms = TransformSet(std::move(transforms));

    c.u = r.doubles(checked_mul(rank_sum, c.dims[0]), "U blocks");
    c.g = r.doubles(checked_mul(rank_sum, c.dims[1]), "G blocks");
    try {
        c.validate();
    } catch (const InvalidArgument& e) {
        throw CodecError(CodecErrc::inconsistent, e.what());
    }
    return c;
}

void write_compressed(const std::filesystem::path& path, const CompressedTensor& c) {
    auto out = open_out(path);
    write_compressed(out, c);
}

CompressedTensor read_compressed(const std::filesystem::path& path) {
    auto in = open_in(path);
    auto c = read_compressed(in);
    expect_eof(in, path);
    return c;
}

FileKind detect_file_kind(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (in.gcount() != static_cast<std::streamsize>(magic.size())) {
        throw CodecError(CodecErrc::bad_magic, "file shorter than a magic number");
    }
    if (magic == kTensorMagic) return FileKind::tensor;
    if (magic == kCompressedMagic) return FileKind::compressed;
    throw CodecError(CodecErrc::bad_magic, std::string(magic.data(), magic.size()));
}

CsvWriter::CsvWriter(std::ostream& out) : out_(&out) { *out_ << kBenchCsvHeader << '\n'; }

void CsvWriter::write(const BenchRow& row) {
    char seconds[32];
    std::snprintf(seconds, sizeof(seconds), "%.9g", row.seconds);
    *out_ << row.kernel << ',' << row.variant << ',' << row.mode << ',' << row.threads << ',' << row.trial << ','
          << seconds << ',' << row.peak_bytes << '\n';
}

}  // namespace starm
