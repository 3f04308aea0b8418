// SPDX-License-Identifier: Apache-2.0
#pragma once

// On-disk formats. All multi-byte fields are little-endian; matrices and
// tensors are column-major float64.
//
// Raw tensor ("STARMTEN"):
//   magic[8] | version u8 = 1 | dtype u8 = 0 | ndim u32 | dims u64[ndim] | payload f64[prod dims]
//
// Compressed tensor ("STARMCMP"):
//   magic[8] | version u8 = 1 | method u8 (1 = tsvdm1, 2 = tsvdm2) | param f64 | ndim u32 |
//   dims u64[ndim] | kind u8[ndim-2] (0 identity, 1 dct, 2 data-driven, 3 custom) | N u64 |
//   ranks u32[N] | n_k x n_k matrices for kinds 2-3, in mode order | U blocks | G blocks

#include "starm/error.hpp"
#include "starm/tensor.hpp"
#include "starm/tsvdm.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace starm {

inline constexpr std::array<char, 8> kTensorMagic{'S', 'T', 'A', 'R', 'M', 'T', 'E', 'N'};
inline constexpr std::array<char, 8> kCompressedMagic{'S', 'T', 'A', 'R', 'M', 'C', 'M', 'P'};
inline constexpr std::uint8_t kFormatVersion = 1;
inline constexpr std::uint8_t kDtypeFloat64 = 0;

enum class CodecErrc {
    io_error,
    bad_magic,
    bad_version,
    bad_dtype,
    bad_method,
    bad_transform_kind,
    truncated_header,
    truncated_payload,
    inconsistent,
};

std::string_view to_string(CodecErrc code);

class CodecError : public Error {
public:
    CodecError(CodecErrc code, const std::string& detail);
    CodecErrc code() const noexcept { return code_; }

private:
    CodecErrc code_;
};

/// Size in bytes of a raw tensor header for the given order.
constexpr std::size_t tensor_header_size(std::size_t ndim) { return 8 + 1 + 1 + 4 + 8 * ndim; }

void write_tensor(std::ostream& out, const DenseTensor& t);
DenseTensor read_tensor(std::istream& in);
void write_tensor(const std::filesystem::path& path, const DenseTensor& t);
DenseTensor read_tensor(const std::filesystem::path& path);

void write_compressed(std::ostream& out, const CompressedTensor& c);
CompressedTensor read_compressed(std::istream& in);
void write_compressed(const std::filesystem::path& path, const CompressedTensor& c);
CompressedTensor read_compressed(const std::filesystem::path& path);

enum class FileKind { tensor, compressed };

/// Identifies a file by its magic. Throws CodecError (bad_magic, io_error).
FileKind detect_file_kind(const std::filesystem::path& path);

/// One timed run in a benchmark CSV.
struct BenchRow {
    std::string kernel;
    std::string variant;
    std::string mode;
    int threads = 1;
    int trial = 0;
    double seconds = 0.0;
    std::size_t peak_bytes = 0;
};

inline constexpr std::string_view kBenchCsvHeader = "kernel,variant,mode,threads,trial,seconds,peak_bytes";

/// Writes the header on construction and one line per row.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out);
    void write(const BenchRow& row);

private:
    std::ostream* out_;
};

}  // namespace starm
