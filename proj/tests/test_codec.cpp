// SPDX-License-Identifier: Apache-2.0
#include "golden.hpp"
#include "oracles.hpp"

#include "starm/codec.hpp"
#include "starm/error.hpp"

#include <doctest.h>

#include <sstream>

using namespace starm;

namespace {

std::string tensor_bytes(const DenseTensor& t) {
    std::ostringstream out(std::ios::binary);
    write_tensor(out, t);
    return out.str();
}

std::string compressed_bytes(const CompressedTensor& c) {
    std::ostringstream out(std::ios::binary);
    write_compressed(out, c);
    return out.str();
}

CodecErrc tensor_error(const std::string& bytes) {
    std::istringstream in(bytes, std::ios::binary);
    try {
        read_tensor(in);
    } catch (const CodecError& e) {
        return e.code();
    }
    FAIL("read succeeded");
    return CodecErrc::io_error;
}

CodecErrc compressed_error(const std::string& bytes) {
    std::istringstream in(bytes, std::ios::binary);
    try {
        read_compressed(in);
    } catch (const CodecError& e) {
        return e.code();
    }
    FAIL("read succeeded");
    return CodecErrc::io_error;
}

CompressedTensor read_back(const std::string& bytes) {
    std::istringstream in(bytes, std::ios::binary);
    return read_compressed(in);
}

template <class T>
void put_le(std::string& s, std::size_t pos, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) s[pos + i] = static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("starm_codec_" + name);
}

}  // namespace

TEST_CASE("raw tensors round-trip bitwise") {
    std::mt19937_64 rng(71);
    const auto t = oracle::random({3, 4, 5}, rng);
    const auto bytes = tensor_bytes(t);
    std::istringstream in(bytes, std::ios::binary);
    const auto back = read_tensor(in);
    CHECK(back == t);

    const auto path = temp_path("raw.bin");
    write_tensor(path, t);
    CHECK(read_tensor(path) == t);
    CHECK(detect_file_kind(path) == FileKind::tensor);
    std::filesystem::remove(path);
}

TEST_CASE("raw header layout for (2,2,2)") {
    CHECK(tensor_header_size(3) == 38);
    const auto bytes = tensor_bytes(golden::tensor());
    CHECK(bytes.size() == 38 + 64);
    const std::vector<unsigned char> raw(bytes.begin(), bytes.end());
    CHECK(golden::hex(raw, 38) == golden::kTensorHeaderHex);
}

TEST_CASE("raw tensor read errors are distinct") {
    const auto good = tensor_bytes(golden::tensor());
    auto bad = good;
    bad[0] = 'X';
    CHECK(tensor_error(bad) == CodecErrc::bad_magic);
    bad = good;
    bad[8] = 2;
    CHECK(tensor_error(bad) == CodecErrc::bad_version);
    bad = good;
    bad[9] = 1;
    CHECK(tensor_error(bad) == CodecErrc::bad_dtype);
    CHECK(tensor_error(good.substr(0, 20)) == CodecErrc::truncated_header);
    CHECK(tensor_error(good.substr(0, good.size() - 1)) == CodecErrc::truncated_payload);
    CHECK(tensor_error(good.substr(0, 5)) == CodecErrc::truncated_header);
    bad = good;
    put_le<std::uint64_t>(bad, 14, 0);
    CHECK(tensor_error(bad) == CodecErrc::inconsistent);
}

TEST_CASE("huge declared sizes are rejected before allocation") {
    auto bytes = tensor_bytes(golden::tensor());
    put_le<std::uint64_t>(bytes, 14, std::uint64_t{1} << 40);
    CHECK(tensor_error(bytes) == CodecErrc::truncated_payload);
    put_le<std::uint64_t>(bytes, 22, std::uint64_t{1} << 40);
    CHECK(tensor_error(bytes) == CodecErrc::inconsistent);
    auto order = tensor_bytes(golden::tensor());
    put_le<std::uint32_t>(order, 10, 0xffffffffu);
    CHECK(tensor_error(order) == CodecErrc::truncated_header);
}

TEST_CASE("path reads reject trailing bytes and missing files") {
    const auto path = temp_path("trailing.bin");
    {
        std::ofstream out(path, std::ios::binary);
        out << tensor_bytes(golden::tensor()) << "x";
    }
    try {
        read_tensor(path);
        FAIL("accepted trailing bytes");
    } catch (const CodecError& e) {
        CHECK(e.code() == CodecErrc::inconsistent);
    }
    std::filesystem::remove(path);
    try {
        read_tensor(temp_path("missing.bin"));
        FAIL("read a missing file");
    } catch (const CodecError& e) {
        CHECK(e.code() == CodecErrc::io_error);
    }
}

TEST_CASE("compressed artifacts round-trip, including empty blocks") {
    std::mt19937_64 rng(72);
    const auto a = oracle::random({6, 5, 4, 2}, rng);
    for (const auto& ts : {TransformSet::dct(a.dims()), TransformSet::data_driven(a), TransformSet::identity(a.dims())}) {
        const auto c = tsvdm_tolerance(a, ts, 0.6).tensor;
        const auto bytes = compressed_bytes(c);
        const auto back = read_back(bytes);
        CHECK(back == c);
        CHECK(compressed_bytes(back) == bytes);
        CHECK(reconstruct(back) == reconstruct(c));
    }
    const auto zero = tsvdm_tolerance(DenseTensor({3, 2, 3}), TransformSet::dct(Dims{3, 2, 3}), 0.5).tensor;
    CHECK(read_back(compressed_bytes(zero)) == zero);

    const auto path = temp_path("c.bin");
    write_compressed(path, zero);
    CHECK(read_compressed(path) == zero);
    CHECK(detect_file_kind(path) == FileKind::compressed);
    std::filesystem::remove(path);
}

TEST_CASE("some slices dropped entirely") {
    std::mt19937_64 rng(73);
    DenseTensor a({4, 4, 3});
    const auto big = oracle::random({4, 4, 1}, rng);
    for (std::size_t i = 0; i < 16; ++i) a[i] = 100.0 * big[i];
    for (std::size_t i = 16; i < 48; ++i) a[i] = 1e-3 * big[i % 16];
    const auto c = tsvdm_tolerance(a, TransformSet::identity(a.dims()), 0.1).tensor;
    CHECK(c.ranks[1] == 0);
    CHECK(c.ranks[2] == 0);
    CHECK(read_back(compressed_bytes(c)) == c);
}

TEST_CASE("data-driven matrices are embedded bitwise; dct ones are not stored") {
    std::mt19937_64 rng(74);
    const auto a = oracle::random({3, 3, 4, 5}, rng);
    const auto dd = tsvdm_fixed_rank(a, TransformSet::data_driven(a), 2).tensor;
    const auto back = read_back(compressed_bytes(dd));
    for (std::size_t k = 3; k <= 4; ++k) {
        CHECK(back.transforms.for_mode(k).kind() == TransformKind::data_driven);
        CHECK(back.transforms.for_mode(k).matrix() == dd.transforms.for_mode(k).matrix());
    }

    const auto dct = tsvdm_fixed_rank(a, TransformSet::dct(a.dims()), 2).tensor;
    auto as_custom = dct;
    as_custom.transforms = TransformSet({validate(dct_matrix(4).matrix()), validate(dct_matrix(5).matrix())});
    CHECK(compressed_bytes(as_custom).size() - compressed_bytes(dct).size() == (16 + 25) * 8);
    CHECK(read_back(compressed_bytes(dct)).transforms == dct.transforms);
}

TEST_CASE("compressed read errors") {
    const auto good = compressed_bytes(golden::compressed());
    auto bad = good;
    bad[3] = 'x';
    CHECK(compressed_error(bad) == CodecErrc::bad_magic);
    bad = good;
    bad[8] = 9;
    CHECK(compressed_error(bad) == CodecErrc::bad_version);
    bad = good;
    bad[9] = 3;
    CHECK(compressed_error(bad) == CodecErrc::bad_method);
    bad = good;
    bad[46] = 7;
    CHECK(compressed_error(bad) == CodecErrc::bad_transform_kind);
    bad = good;
    put_le<std::uint64_t>(bad, 47, 3);
    CHECK(compressed_error(bad) == CodecErrc::inconsistent);
    bad = good;
    put_le<std::uint32_t>(bad, 55, 3);
    CHECK(compressed_error(bad) == CodecErrc::inconsistent);
    bad = good;
    put_le<std::uint32_t>(bad, 59, 1);
    CHECK(compressed_error(bad) == CodecErrc::truncated_payload);
    CHECK(compressed_error(good.substr(0, 40)) == CodecErrc::truncated_header);
    CHECK(compressed_error(good.substr(0, good.size() - 8)) == CodecErrc::truncated_payload);
    // A stored matrix that is not orthonormal.
    bad = good;
    bad[63 + 7] = 0x40;
    CHECK(compressed_error(bad) == CodecErrc::inconsistent);
}

TEST_CASE("tsvdm1 artifacts must carry uniform ranks") {
    auto c = golden::compressed();
    c.method = Method::tsvdm1;
    c.parameter = 1.0;
    CHECK_THROWS_AS(compressed_bytes(c), InvalidArgument);
}

TEST_CASE("golden files decode to the pinned values and re-encode identically") {
    const auto raw = golden::read_bytes(golden::data_dir() / "golden_tensor.bin");
    CHECK(golden::hex(raw, 38) == golden::kTensorHeaderHex);
    CHECK(read_tensor(golden::data_dir() / "golden_tensor.bin") == golden::tensor());
    CHECK(tensor_bytes(golden::tensor()) == std::string(raw.begin(), raw.end()));

    const auto cmp = golden::read_bytes(golden::data_dir() / "golden_compressed.bin");
    CHECK(golden::hex(cmp, 63) == golden::kCompressedHeaderHex);
    CHECK(read_compressed(golden::data_dir() / "golden_compressed.bin") == golden::compressed());
    CHECK(compressed_bytes(golden::compressed()) == std::string(cmp.begin(), cmp.end()));
}

TEST_CASE("benchmark CSV rows") {
    std::ostringstream out;
    CsvWriter csv(out);
    csv.write({"ttm", "batched", "3", 2, 0, 0.5, 1024});
    CHECK(out.str() == "kernel,variant,mode,threads,trial,seconds,peak_bytes\nttm,batched,3,2,0,0.5,1024\n");
}

TEST_CASE("error codes have names") {
    CHECK(to_string(CodecErrc::truncated_payload) == "truncated payload");
    CHECK(to_string(CodecErrc::bad_magic) == "bad magic");
}
