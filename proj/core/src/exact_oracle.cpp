#include "lclt/exact_oracle.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "lclt/error.hpp"
#include "lclt/parallel.hpp"

namespace lclt {
namespace {

std::vector<std::uint32_t> triangle_masks(std::size_t n) {
    std::vector<std::size_t> index(n * n, 0);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) index[i * n + j] = next++;
    std::vector<std::uint32_t> masks;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            for (std::size_t c = b + 1; c < n; ++c)
                masks.push_back((1U << index[a * n + b]) | (1U << index[a * n + c]) | (1U << index[b * n + c]));
    return masks;
}

} // namespace

TriangleEdgeTable::TriangleEdgeTable(std::size_t n)
    : n_(n), max_edges_(n * (n - 1) / 2), max_triangles_(n * (n - 1) * (n - 2) / 6),
      cells_((max_triangles_ + 1) * (max_edges_ + 1), 0) {}

void TriangleEdgeTable::validate() const {
    require(n_ >= 3 && max_edges_ < 64, ErrorKind::checksum, "table shape is invalid");
    std::uint64_t total = 0;
    for (std::size_t k = 0; k <= max_triangles_; ++k)
        for (std::size_t m = 0; m <= max_edges_; ++m) {
            const std::uint64_t c = count(k, m);
            total += c;
            require(k == 0 || m >= 3 || c == 0, ErrorKind::checksum,
                    "a graph with fewer than three edges cannot contain a triangle");
        }
    require(total == (std::uint64_t{1} << max_edges_), ErrorKind::checksum,
            "table total " + std::to_string(total) + " differs from 2^" + std::to_string(max_edges_));
    require(count(max_triangles_, max_edges_) == 1, ErrorKind::checksum, "complete graph must appear exactly once");
}

TriangleEdgeTable& TriangleEdgeTable::operator+=(const TriangleEdgeTable& other) {
    for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] += other.cells_[i];
    return *this;
}

TriangleEdgeTable build_table(std::size_t n, std::size_t ceiling, std::size_t workers) {
    require(n >= 3, ErrorKind::invalid_parameter, "exact table needs n >= 3");
    require(n <= ceiling, ErrorKind::resource_limit,
            "exact table for n=" + std::to_string(n) + " exceeds the ceiling " + std::to_string(ceiling));
    require(n <= 11, ErrorKind::resource_limit, "edge masks wider than 55 bits are not enumerable");

    const auto masks = triangle_masks(n);
    const std::size_t edges = n * (n - 1) / 2;
    const std::uint64_t total = std::uint64_t{1} << edges;
    const std::size_t chunks = total < 4096 ? 1 : 64;

    auto partials = run_batches<TriangleEdgeTable>(
        chunks, workers, [n] { return TriangleEdgeTable(n); },
        [&](std::size_t chunk, TriangleEdgeTable& table) {
            const IndexRange range = partition_range(total, chunks, chunk);
            for (std::uint64_t mask = range.begin; mask < range.end; ++mask) {
                std::size_t k = 0;
                for (const std::uint32_t t : masks) k += (mask & t) == t;
                ++table.count(k, static_cast<std::size_t>(std::popcount(mask)));
            }
        });

    TriangleEdgeTable result(n);
    for (const auto& part : partials) result += part;
    return result;
}

std::vector<double> exact_pmf(const TriangleEdgeTable& table, double p) {
    require(std::isfinite(p) && p >= 0.0 && p <= 1.0, ErrorKind::invalid_parameter, "p must lie in [0, 1]");
    const std::size_t edges = table.max_edges();
    std::vector<double> weight(edges + 1);
    for (std::size_t m = 0; m <= edges; ++m)
        weight[m] = std::pow(p, static_cast<double>(m)) * std::pow(1.0 - p, static_cast<double>(edges - m));

    std::vector<double> pmf(table.max_triangles() + 1, 0.0);
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        long double mass = 0.0L;
        for (std::size_t m = 0; m <= edges; ++m)
            mass += static_cast<long double>(table.count(k, m)) * weight[m];
        pmf[k] = static_cast<double>(mass);
    }
    return pmf;
}

std::complex<double> charfn_from_pmf(const std::vector<double>& pmf, double theta) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        const double angle = theta * static_cast<double>(k);
        re += pmf[k] * std::cos(angle);
        im += pmf[k] * std::sin(angle);
    }
    return {re, im};
}

std::complex<double> exact_charfn(const TriangleEdgeTable& table, double p, double theta) {
    return charfn_from_pmf(exact_pmf(table, p), theta);
}

void write_table(std::ostream& out, const TriangleEdgeTable& table) {
    out << "# n=" << table.n() << " edges=" << table.max_edges() << '\n';
    out << "k,m,count\n";
    for (std::size_t k = 0; k <= table.max_triangles(); ++k)
        for (std::size_t m = 0; m <= table.max_edges(); ++m)
            if (const auto c = table.count(k, m); c != 0) out << k << ',' << m << ',' << c << '\n';
}

TriangleEdgeTable read_table(std::istream& in) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorKind::checksum, "cache file is empty");
    std::size_t n = 0;
    std::size_t edges = 0;
    {
        std::istringstream head(line);
        std::string hash, n_field, e_field;
        head >> hash >> n_field >> e_field;
        require(hash == "#" && n_field.rfind("n=", 0) == 0 && e_field.rfind("edges=", 0) == 0, ErrorKind::checksum,
                "cache comment line is malformed");
        try {
            n = std::stoul(n_field.substr(2));
            edges = std::stoul(e_field.substr(6));
        } catch (const std::exception&) {
            fail(ErrorKind::checksum, "cache comment line is malformed");
        }
    }
    require(n >= 3 && n <= 11 && edges == n * (n - 1) / 2, ErrorKind::checksum, "cache header is inconsistent");
    require(std::getline(in, line) && line == "k,m,count", ErrorKind::checksum, "cache column header is missing");

    TriangleEdgeTable table(n);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::size_t k = 0, m = 0;
        std::uint64_t c = 0;
        char sep1 = 0, sep2 = 0;
        row >> k >> sep1 >> m >> sep2 >> c;
        require(row && sep1 == ',' && sep2 == ',' && (row >> std::ws).eof(), ErrorKind::checksum,
                "cache row is malformed: " + line);
        require(k <= table.max_triangles() && m <= table.max_edges(), ErrorKind::checksum,
                "cache row out of range: " + line);
        table.count(k, m) = c;
    }
    table.validate();
    return table;
}

} // namespace lclt
