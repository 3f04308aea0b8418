// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "starm/tensor.hpp"
#include "starm/transforms.hpp"

#include <iosfwd>
#include <string>
#include <string_view>

namespace starm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Builds the transform set for `t` from "identity", "dct", "data",
/// "custom:<path>" or a comma list with one such entry per mode 3..d. Custom
/// matrices are raw tensor files with dims (n,n) or (n,n,1).
TransformSet parse_transform_spec(std::string_view spec, const DenseTensor& t);

/// Parses "16x16x8" or "16,16,8".
Dims parse_dims(std::string_view text);

/// Formats dims as "AxBxC".
std::string format_dims(const Dims& dims);

/// Runs the command line tool. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace starm
