// SPDX-License-Identifier: Apache-2.0
// Values held by the pinned files in tests/data (written by tools/make_golden.py).
#pragma once

#include "starm/transforms.hpp"
#include "starm/tsvdm.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace golden {

inline std::filesystem::path data_dir() { return STARM_TEST_DATA_DIR; }

inline const char* const kTensorHeaderHex =
    "535441524d54454e010003000000020000000000000002000000000000000200000000000000";
inline const char* const kCompressedHeaderHex =
    "535441524d434d500102000000000000d03f0300000002000000000000000300000000000000"
    "02000000000000000302000000000000000100000000000000";

inline starm::DenseTensor tensor() {
    starm::DenseTensor t({2, 2, 2});
    for (std::size_t i = 0; i < 8; ++i) t[i] = static_cast<double>(i);
    return t;
}

inline starm::CompressedTensor compressed() {
    starm::Matrix swap(2, 2);
    swap(0, 1) = swap(1, 0) = 1.0;
    starm::CompressedTensor c;
    c.dims = {2, 3, 2};
    c.transforms = starm::TransformSet({starm::validate(swap)});
    c.method = starm::Method::tsvdm2;
    c.parameter = 0.25;
    c.ranks = {1, 0};
    c.u = {1.0, 0.0};
    c.g = {2.0, -1.0, 0.5};
    return c;
}

inline std::vector<unsigned char> read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string hex(const std::vector<unsigned char>& bytes, std::size_t n) {
    std::string s;
    char buf[3];
    for (std::size_t i = 0; i < n && i < bytes.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%02x", bytes[i]);
        s += buf;
    }
    return s;
}

}  // namespace golden
