#pragma once

#include "mlcache/allocation.hpp"
#include "mlcache/model.hpp"
#include "mlcache/tradeoff.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlcache {

/*
 * Single-library reduction of a multi-library network. File n of the
 * concatenated library is [W^(f(n))_n, ..., W^(L)_n] over the libraries sorted
 * by ascending size, where f(n) is the first sorted library holding at least n
 * files. Sizes are normalised so that the mean of `betas` is 1.
 */
struct ConcatenatedLibrary {
    std::int64_t num_files = 0;       // N_L, the largest library size
    std::vector<Rational> betas;      // non-increasing, mean 1
    NetworkConfig source_config;      // as given, original library order
    std::vector<std::size_t> order;   // order[j] = original index of the j-th smallest library

    /// Reference-size change between the two networks: sum(alpha N) / N_L.
    /// One unit of F in the source network is 1/scale units in this one.
    Rational scale() const { return total_content(source_config) / num_files; }
};

inline bool sorted_by_size(const NetworkConfig& config) {
    return std::is_sorted(config.libraries.begin(), config.libraries.end(),
                          [](const LibrarySpec& a, const LibrarySpec& b) { return a.num_files < b.num_files; });
}

/// Smallest 1-based library index j with n <= N_j. The config must be sorted ascending by N.
inline std::size_t subfile_level(const NetworkConfig& config, std::int64_t n) {
    if (!sorted_by_size(config))
        throw std::invalid_argument("subfile_level needs libraries sorted ascending by num_files");
    if (config.libraries.empty() || n < 1 || n > config.libraries.back().num_files)
        throw std::invalid_argument("file index " + std::to_string(n) + " out of range");
    for (std::size_t j = 0; j < config.libraries.size(); ++j)
        if (n <= config.libraries[j].num_files)
            return j + 1;
    throw std::logic_error("unreachable");
}

/// Stable ascending sort of libraries by num_files; order[j] is the original index.
inline std::vector<std::size_t> size_order(const NetworkConfig& config) {
    std::vector<std::size_t> order(config.num_libraries());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return config.libraries[a].num_files < config.libraries[b].num_files;
    });
    return order;
}

inline NetworkConfig sorted_by_size_copy(const NetworkConfig& config, const std::vector<std::size_t>& order) {
    NetworkConfig sorted = config;
    for (std::size_t j = 0; j < order.size(); ++j)
        sorted.libraries[j] = config.libraries[order[j]];
    return sorted;
}

inline ConcatenatedLibrary concatenate(const NetworkConfig& config) {
    require_valid(config);
    ConcatenatedLibrary out;
    out.source_config = config;
    out.order = size_order(config);
    const NetworkConfig sorted = sorted_by_size_copy(config, out.order);
    const std::size_t L = sorted.num_libraries();
    out.num_files = sorted.libraries.back().num_files;

    // suffix[j] = alpha of sorted libraries j..L-1
    std::vector<Rational> suffix(L + 1, Rational(0));
    for (std::size_t j = L; j-- > 0;)
        suffix[j] = suffix[j + 1] + sorted.libraries[j].alpha;
    const Rational denominator = total_content(sorted);
    for (std::int64_t n = 1; n <= out.num_files; ++n) {
        const std::size_t level = subfile_level(sorted, n);
        out.betas.push_back(suffix[level - 1] / denominator * out.num_files);
    }
    return out;
}

/// Cut-set bound for one library of unequal file sizes `sizes` (units of its
/// own reference size): s users over floor(N/s) rounds must decode the
/// s*floor(N/s) largest files from s caches and floor(N/s) broadcasts.
inline Rational concatenated_cut_set_bound(std::span<const Rational> sizes, std::int64_t num_users,
                                           const Rational& memory) {
    std::vector<Rational> sorted(sizes.begin(), sizes.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const auto N = static_cast<std::int64_t>(sorted.size());
    Rational best = 0;
    for (std::int64_t s = 1; s <= std::min(N, num_users); ++s) {
        const std::int64_t rounds = N / s;
        Rational decoded = 0;
        for (std::int64_t i = 0; i < s * rounds; ++i)
            decoded += sorted[static_cast<std::size_t>(i)];
        const Rational bound = (decoded - s * memory) / rounds;
        if (bound > best)
            best = bound;
    }
    return best;
}

using SingleLibraryBound = std::function<Rational(const Rational&)>;

/// Lower bound on the multi-library rate at the config's cache size, from a
/// lower bound on the concatenated library's tradeoff (in that library's own
/// units). Converting reference sizes gives scale * bound(M / scale); for
/// equal library sizes scale = 1 and this is bound(M).
inline Rational converse_bound(const NetworkConfig& config, const SingleLibraryBound& single_library_bound) {
    const ConcatenatedLibrary lib = concatenate(config);
    const Rational s = lib.scale();
    return s * single_library_bound(config.cache_size / s);
}

inline Rational cut_set_converse(const NetworkConfig& config) {
    const ConcatenatedLibrary lib = concatenate(config);
    return converse_bound(config, [&](const Rational& memory) {
        return concatenated_cut_set_bound(lib.betas, config.num_users, memory);
    });
}

struct GapReport {
    Rational achievable;
    Rational converse;
    Rational gap;
    std::string status;         // "tight" or "open"
    std::string converse_kind;  // "exact" or "cutset"
    std::vector<std::string> tradeoff_labels;
};

/// Compares the best memory-sharing rate with the best lower bound at hand.
/// Exact single-library tradeoffs serve as the bound only when every library
/// has the same size and the same exact curve.
inline GapReport conjecture_gap(const NetworkConfig& config, std::span<const PiecewiseLinearTradeoff> tradeoffs) {
    GapReport report;
    const AllocationTrace trace = greedy_allocate(config, tradeoffs);
    report.achievable = trace.rate;
    report.tradeoff_labels = trace.tradeoff_labels;
    report.converse = cut_set_converse(config);
    report.converse_kind = "cutset";

    const bool equal_n = std::all_of(config.libraries.begin(), config.libraries.end(), [&](const LibrarySpec& lib) {
        return lib.num_files == config.libraries.front().num_files;
    });
    const bool shared_exact = std::all_of(tradeoffs.begin(), tradeoffs.end(), [&](const PiecewiseLinearTradeoff& t) {
        return t.is_exact() && t.same_curve(tradeoffs.front());
    });
    if (equal_n && shared_exact) {
        const Rational exact = converse_bound(config, [&](const Rational& m) { return tradeoffs.front()(m); });
        if (exact >= report.converse) {
            report.converse = exact;
            report.converse_kind = "exact";
        }
    }
    report.gap = report.achievable - report.converse;
    report.status = report.gap == 0 ? "tight" : "open";
    return report;
}

}  // namespace mlcache
