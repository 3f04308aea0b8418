// SPDX-License-Identifier: Apache-2.0
#include "starm/cli.hpp"

#include "starm/bench.hpp"
#include "starm/codec.hpp"
#include "starm/error.hpp"
#include "starm/synthetic.hpp"
#include "starm/tsvdm.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>

namespace starm {

namespace {

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

Transform parse_one_transform(std::string_view spec, const DenseTensor& t, std::size_t mode) {
    const auto n = t.dim(mode - 1);
    if (spec == "identity") return identity_transform(n);
    if (spec == "dct") return dct_matrix(n);
    if (spec == "data") return data_driven_transform(t, mode);
    if (spec.starts_with("custom:")) {
        const auto m = read_tensor(std::filesystem::path(std::string(spec.substr(7))));
        const bool square = m.order() >= 2 && m.dim(0) == n && m.dim(1) == n && m.slice_count() == 1;
        if (!square) {
            throw InvalidArgument("custom transform for mode " + std::to_string(mode) + " must be " +
                                  std::to_string(n) + "x" + std::to_string(n) + ", got " + format_dims(m.dims()));
        }
        return validate(Matrix(n, n, Buffer(m.values().begin(), m.values().end())));
    }
    throw InvalidArgument("unknown transform '" + std::string(spec) + "'");
}

// Thread count from STARM_THREADS, or nullopt when the variable is unset.
std::optional<int> env_threads() {
    const char* env = std::getenv("STARM_THREADS");
    if (!env) return std::nullopt;
    int n = 0;
    const std::string_view text(env);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec != std::errc() || ptr != text.data() + text.size() || n < 1) {
        throw InvalidArgument("STARM_THREADS must be a positive integer");
    }
    return n;
}

// threads == 0 means the flag was not given.
ExecOptions exec_options(int threads, const std::string& ttm, const std::string& svd) {
    if (threads == 0) threads = env_threads().value_or(1);
    if (threads < 1) throw InvalidArgument("thread count must be at least 1");
    ExecOptions opts;
    opts.threads = threads;
    if (auto v = parse_ttm_variant(ttm)) opts.ttm = *v;
    else throw InvalidArgument("unknown ttm variant '" + ttm + "'");
    if (auto s = parse_svd_strategy(svd)) opts.svd = *s;
    else throw InvalidArgument("unknown svd strategy '" + svd + "'");
    return opts;
}

template <class T, class Parse>
std::vector<T> parse_list(const std::vector<std::string>& names, Parse parse, const char* what) {
    std::vector<T> out;
    for (const auto& name : names) {
        if (auto v = parse(name)) out.push_back(*v);
        else throw InvalidArgument(std::string("unknown ") + what + " '" + name + "'");
    }
    return out;
}

struct Common {
    int threads = 0;
    std::string ttm = "batched";
    std::string svd = "slices";
};

void add_threads(CLI::App* cmd, int& threads) {
    cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
}

void add_exec(CLI::App* cmd, Common& c) {
    add_threads(cmd, c.threads);
    cmd->add_option("--ttm-variant", c.ttm, "batched|loop|parfor");
    cmd->add_option("--svd-strategy", c.svd, "slices|svd");
}

void cmd_info(const std::string& path, std::ostream& out) {
    if (detect_file_kind(path) == FileKind::tensor) {
        const auto t = read_tensor(std::filesystem::path(path));
        out << "dims=" << format_dims(t.dims()) << " dtype=float64 norm=" << fmt("%.17g", frobenius_norm(t)) << "\n";
        return;
    }
    const auto c = read_compressed(std::filesystem::path(path));
    const auto rec = reconstruct(c);
    out << "dims=" << format_dims(c.dims) << " dtype=float64 norm=" << fmt("%.17g", frobenius_norm(rec)) << "\n";
    out << "method=" << to_string(c.method) << " param=" << fmt("%.17g", c.parameter) << "\n";
    out << "transforms=";
    for (std::size_t k = 0; k < c.transforms.size(); ++k) {
        out << (k ? "," : "") << to_string(c.transforms.transforms()[k].kind());
    }
    out << "\n";
    std::map<std::uint32_t, std::size_t> hist;
    for (auto r : c.ranks) ++hist[r];
    out << "rank_histogram=";
    bool first = true;
    for (auto [r, n] : hist) {
        out << (first ? "" : " ") << r << ":" << n;
        first = false;
    }
    out << "\n";
    out << "rank_sum=" << c.rank_sum() << "\n";
    out << "ratio=" << fmt("%.17g", compression_ratio(c)) << "\n";
}

}  // namespace

Dims parse_dims(std::string_view text) {
    const char sep = text.find('x') != std::string_view::npos ? 'x' : ',';
    Dims dims;
    for (auto part : split(text, sep)) {
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc() || ptr != part.data() + part.size() || v == 0) {
            throw InvalidArgument("bad dims '" + std::string(text) + "'");
        }
        dims.push_back(v);
    }
    return dims;
}

std::string format_dims(const Dims& dims) {
    std::string s;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) s += 'x';
        s += std::to_string(dims[i]);
    }
    return s;
}

TransformSet parse_transform_spec(std::string_view spec, const DenseTensor& t) {
    if (t.order() < 3) throw InvalidArgument("tensor order must be at least 3");
    const auto parts = split(spec, ',');
    const auto modes = t.order() - 2;
    if (parts.size() != 1 && parts.size() != modes) {
        throw InvalidArgument("transform list has " + std::to_string(parts.size()) + " entries, tensor has " +
                              std::to_string(modes) + " transformed modes");
    }
    std::vector<Transform> ts;
    for (std::size_t k = 3; k <= t.order(); ++k) {
        ts.push_back(parse_one_transform(parts.size() == 1 ? parts[0] : parts[k - 3], t, k));
    }
    return TransformSet(std::move(ts));
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tensor compression with the *M tensor SVD", "starm"};
    app.require_subcommand(1);

    std::string info_path;
    auto* info = app.add_subcommand("info", "Describe a raw tensor or compressed file");
    info->add_option("path", info_path)->required();

    std::string c_in, c_out, c_method, c_transform = "dct", c_strategy = "memory";
    std::optional<std::size_t> c_rank;
    std::optional<double> c_tol;
    Common c_exec;
    auto* compress = app.add_subcommand("compress", "Compress a raw tensor");
    compress->add_option("-i,--input", c_in)->required();
    compress->add_option("-o,--output", c_out)->required();
    compress->add_option("--method", c_method, "tsvdm1|tsvdm2")->required()->check(CLI::IsMember({"tsvdm1", "tsvdm2"}));
    compress->add_option("--rank", c_rank, "Truncation rank (tsvdm1)");
    compress->add_option("--tol", c_tol, "Relative error tolerance (tsvdm2)");
    compress->add_option("--transform", c_transform, "identity|dct|data|custom:path, or one per mode");
    compress->add_option("--tsvdm2-strategy", c_strategy, "truncate|compute|memory");
    add_exec(compress, c_exec);

    std::string d_in, d_out;
    Common d_exec;
    auto* decompress = app.add_subcommand("decompress", "Reconstruct a raw tensor from a compressed file");
    decompress->add_option("input", d_in)->required();
    decompress->add_option("output", d_out)->required();
    add_exec(decompress, d_exec);

    std::string e_a, e_b;
    auto* error = app.add_subcommand("error", "Relative Frobenius error of B against A");
    error->add_option("a", e_a)->required();
    error->add_option("b", e_b)->required();

    std::string b_kernel = "ttm", b_in, b_dims, b_csv, b_transform = "dct";
    std::vector<int> b_threads;
    std::vector<std::string> b_variants, b_strategies, b_t2;
    int b_trials = 3;
    SyntheticSpec b_spec;
    std::size_t b_rank = 1;
    double b_tol = 0.1;
    auto* bench = app.add_subcommand("bench", "Time kernels and emit CSV rows");
    bench->add_option("--kernel", b_kernel, "ttm|svd|tsvdm1|tsvdm2")
        ->check(CLI::IsMember({"ttm", "svd", "tsvdm1", "tsvdm2"}));
    bench->add_option("-i,--input", b_in, "Raw tensor file");
    bench->add_option("--dims", b_dims, "Synthetic tensor dims, e.g. 16x16x8");
    bench->add_option("--seed", b_spec.seed);
    bench->add_option("--synthetic-rank", b_spec.rank);
    bench->add_option("--noise", b_spec.noise)->check(CLI::NonNegativeNumber);
    bench->add_option("--threads", b_threads, "Thread counts")->delimiter(',')->check(CLI::PositiveNumber);
    bench->add_option("--trials", b_trials)->check(CLI::PositiveNumber);
    bench->add_option("--ttm-variant", b_variants, "Variants to time")->delimiter(',');
    bench->add_option("--svd-strategy", b_strategies, "Strategies to time")->delimiter(',');
    bench->add_option("--tsvdm2-strategy", b_t2, "Strategies to time")->delimiter(',');
    bench->add_option("--transform", b_transform, "identity|dct|data")
        ->check(CLI::IsMember({"identity", "dct", "data"}));
    bench->add_option("--rank", b_rank)->check(CLI::PositiveNumber);
    bench->add_option("--tol", b_tol);
    bench->add_option("--csv-out", b_csv, "CSV path (default stdout)");

    std::string g_out, g_dims, g_domain = "dct";
    SyntheticSpec g_spec;
    auto* generate = app.add_subcommand("generate", "Write a seeded synthetic tensor");
    generate->add_option("-o,--output", g_out)->required();
    generate->add_option("--dims", g_dims)->required();
    generate->add_option("--rank", g_spec.rank);
    generate->add_option("--noise", g_spec.noise)->check(CLI::NonNegativeNumber);
    generate->add_option("--decay", g_spec.decay);
    generate->add_option("--domain", g_domain)->check(CLI::IsMember({"identity", "dct", "random"}));
    generate->add_option("--seed", g_spec.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*info) {
            cmd_info(info_path, out);
        } else if (*compress) {
            const auto opts = exec_options(c_exec.threads, c_exec.ttm, c_exec.svd);
            const auto a = read_tensor(std::filesystem::path(c_in));
            const auto ts = parse_transform_spec(c_transform, a);
            Compression result;
            if (c_method == "tsvdm1") {
                if (!c_rank || c_tol) throw InvalidArgument("tsvdm1 takes --rank and no --tol");
                if (*c_rank == 0) throw InvalidArgument("--rank must be positive");
                result = tsvdm_fixed_rank(a, ts, *c_rank, opts);
            } else {
                if (!c_tol || c_rank) throw InvalidArgument("tsvdm2 takes --tol and no --rank");
                if (!(*c_tol > 0.0 && *c_tol < 1.0)) throw InvalidArgument("--tol must lie in (0, 1)");
                const auto strategy = parse_tsvdm2_strategy(c_strategy);
                if (!strategy) throw InvalidArgument("unknown tsvdm2 strategy '" + c_strategy + "'");
                result = tsvdm_tolerance(a, ts, *c_tol, *strategy, opts);
            }
            write_compressed(std::filesystem::path(c_out), result.tensor);
            out << "ratio=" << fmt("%.17g", compression_ratio(result.tensor)) << "\n";
            out << "error=" << fmt("%.17g", result.relative_error()) << "\n";
        } else if (*decompress) {
            const auto opts = exec_options(d_exec.threads, d_exec.ttm, d_exec.svd);
            const auto c = read_compressed(std::filesystem::path(d_in));
            write_tensor(std::filesystem::path(d_out), reconstruct(c, opts));
        } else if (*error) {
            const auto a = read_tensor(std::filesystem::path(e_a));
            const auto b = read_tensor(std::filesystem::path(e_b));
            out << fmt("%.6g", relative_error(a, b)) << "\n";
        } else if (*bench) {
            BenchConfig cfg;
            cfg.kernel = *parse_bench_kernel(b_kernel);
            cfg.trials = b_trials;
            cfg.rank = b_rank;
            cfg.tolerance = b_tol;
            cfg.transform = b_transform == "identity" ? TransformKind::identity
                            : b_transform == "dct"    ? TransformKind::dct
                                                      : TransformKind::data_driven;
            if (!b_threads.empty()) {
                cfg.threads = b_threads;
            } else if (const auto n = env_threads()) {
                cfg.threads = {*n};
            }
            if (!b_variants.empty()) cfg.ttm_variants = parse_list<TtmVariant>(b_variants, parse_ttm_variant, "ttm variant");
            if (!b_strategies.empty())
                cfg.svd_strategies = parse_list<SvdStrategy>(b_strategies, parse_svd_strategy, "svd strategy");
            if (!b_t2.empty())
                cfg.tsvdm2_strategies = parse_list<Tsvdm2Strategy>(b_t2, parse_tsvdm2_strategy, "tsvdm2 strategy");
            if (b_in.empty() == b_dims.empty()) throw InvalidArgument("bench needs exactly one of --input or --dims");
            DenseTensor t = [&] {
                if (!b_in.empty()) return read_tensor(std::filesystem::path(b_in));
                b_spec.dims = parse_dims(b_dims);
                return synthetic_tensor(b_spec);
            }();
            std::ofstream file;
            std::ostream* sink = &out;
            if (!b_csv.empty()) {
                file.open(b_csv, std::ios::trunc);
                if (!file) throw CodecError(CodecErrc::io_error, "cannot open " + b_csv + " for writing");
                sink = &file;
            }
            CsvWriter csv(*sink);
            run_bench(t, cfg, &csv);
            sink->flush();
            if (!*sink) throw CodecError(CodecErrc::io_error, "failed writing benchmark CSV");
        } else if (*generate) {
            g_spec.dims = parse_dims(g_dims);
            g_spec.domain = *parse_synthetic_domain(g_domain);
            write_tensor(std::filesystem::path(g_out), synthetic_tensor(g_spec));
        }
    } catch (const CodecError& e) {
        err << "error: " << e.what() << "\n";
        return e.code() == CodecErrc::io_error ? kExitFailure : kExitUsage;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}

}  // namespace starm
