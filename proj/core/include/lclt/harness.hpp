#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lclt/error.hpp"
#include "lclt/exact_oracle.hpp"

namespace lclt {

enum class ExperimentKind { pmf, charfn, decoupling, distances, toolbox_verify, cover_check };

std::string to_string(ExperimentKind kind);

/// Accepts the canonical names and the CLI subcommand names
/// (decouple, verify, cover).
ExperimentKind parse_kind(const std::string& name);

/// Flat `key = value` manifest. Lists are comma separated; `#` starts a comment.
struct Manifest {
    ExperimentKind kind = ExperimentKind::pmf;
    std::vector<std::size_t> n;
    std::vector<double> p;
    std::vector<std::size_t> m;
    std::vector<double> t;
    std::vector<double> gamma;
    std::vector<double> K;
    std::vector<double> epsilon;
    std::uint64_t seed = 1;
    std::size_t samples = 100000;
    std::size_t trials = 1000;
    std::size_t workers = 0;
    std::size_t points_per_segment = 16;
    std::size_t exact_ceiling = kDefaultExactCeiling;
    double c_edge = 1.0;
    // p path p(n) = min(p_cap, p_scale * n^p_exponent), used when p is empty.
    std::optional<double> p_scale;
    std::optional<double> p_exponent;
    std::optional<double> p_cap;
    std::string out = "results";
    std::string cache_dir; // defaults to <out>/cache
};

Manifest parse_manifest(std::istream& in);
Manifest parse_manifest_text(const std::string& text);

/// Sets one key as if it appeared in a manifest file.
void set_manifest_value(Manifest& manifest, const std::string& key, const std::string& value);

/// Canonical text form; parses back to an equal manifest.
std::string to_text(const Manifest& manifest);

/// `<kind>_<hash>` where the hash covers every key except workers, out and cache_dir.
std::string output_key(const Manifest& manifest);

/// Checks parameter domains that do not need a run, e.g. gamma in (0, 1/8).
void validate(const Manifest& manifest);

/// p for each n, from the explicit list or the p path.
std::vector<double> p_values(const Manifest& manifest, std::size_t n);

int exit_code(ErrorKind kind);

struct RunResult {
    int exit_code = 0;
    std::filesystem::path directory;
    std::string message;
};

/// Runs the experiment and writes results.csv, summary.json and manifest.echo
/// into <out>/<output_key>. On failure nothing is left behind.
RunResult run(const Manifest& manifest);

std::filesystem::path cache_path(const std::filesystem::path& dir, std::size_t n);

void cache(const TriangleEdgeTable& table, const std::filesystem::path& dir);

/// Reads and validates the cached census for n; throws a checksum error on a
/// corrupt file and a resource-limit error when no file exists.
TriangleEdgeTable load_cache(std::size_t n, const std::filesystem::path& dir);

struct CachedTable {
    TriangleEdgeTable table;
    bool rebuilt = false;
};

/// Loads the cache, building (and writing) it when missing or corrupt.
CachedTable cached_table(std::size_t n, const std::filesystem::path& dir, std::size_t ceiling = kDefaultExactCeiling,
                         std::size_t workers = 1);

} // namespace lclt
