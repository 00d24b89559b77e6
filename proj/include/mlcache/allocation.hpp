#pragma once

#include "mlcache/model.hpp"
#include "mlcache/tradeoff.hpp"

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlcache {

/// Split of each user's cache between libraries, in units of F.
struct Allocation {
    std::vector<Rational> per_library;

    Rational total() const {
        Rational sum = 0;
        for (const auto& m : per_library)
            sum += m;
        return sum;
    }

    friend bool operator==(const Allocation&, const Allocation&) = default;
};

struct AllocationStep {
    std::size_t library = 0;         // 0-based
    std::size_t segment_before = 0;  // i_l of the chosen library before the step
    Rational delta;
    Rational allocated_total;        // AllocM after the step
};

struct AllocationTrace {
    std::vector<AllocationStep> steps;
    Allocation final;
    Rational rate;
    std::vector<std::string> tradeoff_labels;
};

namespace detail {

inline void require_matching_tradeoffs(const NetworkConfig& config, std::span<const PiecewiseLinearTradeoff> tradeoffs) {
    if (tradeoffs.size() != config.num_libraries())
        throw std::invalid_argument("expected " + std::to_string(config.num_libraries()) + " tradeoffs, got " +
                                    std::to_string(tradeoffs.size()));
    for (std::size_t l = 0; l < tradeoffs.size(); ++l)
        if (tradeoffs[l].num_files() != config.libraries[l].num_files)
            throw std::invalid_argument("tradeoff for library " + std::to_string(l + 1) + " has N = " +
                                        std::to_string(tradeoffs[l].num_files()) + ", library has " +
                                        std::to_string(config.libraries[l].num_files));
}

inline void require_cache_within_content(const NetworkConfig& config) {
    if (config.cache_size > total_content(config))
        throw std::invalid_argument("cache_size " + to_string(config.cache_size) + " exceeds total content " +
                                    to_string(total_content(config)) + "; clamp the config first");
}

inline std::vector<std::string> labels_of(std::span<const PiecewiseLinearTradeoff> tradeoffs) {
    std::vector<std::string> out;
    for (const auto& t : tradeoffs)
        out.push_back(t.label());
    return out;
}

}  // namespace detail

/// Sum over libraries of alpha * R(M_l / alpha): the rate of running one
/// independent single-library scheme per cache segment.
inline Rational memory_sharing_rate(const NetworkConfig& config, const Allocation& alloc,
                                    std::span<const PiecewiseLinearTradeoff> tradeoffs) {
    detail::require_matching_tradeoffs(config, tradeoffs);
    if (alloc.per_library.size() != config.num_libraries())
        throw std::invalid_argument("allocation has " + std::to_string(alloc.per_library.size()) +
                                    " entries for " + std::to_string(config.num_libraries()) + " libraries");
    if (alloc.total() != config.cache_size)
        throw std::invalid_argument("allocation sums to " + to_string(alloc.total()) + ", cache size is " +
                                    to_string(config.cache_size));
    Rational rate = 0;
    for (std::size_t l = 0; l < tradeoffs.size(); ++l) {
        const auto& alpha = config.libraries[l].alpha;
        if (alloc.per_library[l] < 0)
            throw std::invalid_argument("negative allocation for library " + std::to_string(l + 1));
        rate += alpha * tradeoffs[l](alloc.per_library[l] / alpha);
    }
    return rate;
}

inline Allocation proportional_allocation(const NetworkConfig& config) {
    require_valid(config);
    Allocation alloc;
    for (const auto& lib : config.libraries)
        alloc.per_library.push_back(lib.alpha * config.cache_size);
    return alloc;
}

/// Greedy water-filling. A unit of cache given to library l lowers
/// alpha_l R(M_l / alpha_l) by the right-slope gamma_i of its current segment,
/// so libraries are ranked by gamma_i itself. Each step grants the steepest
/// library either that whole segment or whatever cache is left. Ties go to the
/// smallest library index.
inline AllocationTrace greedy_allocate(const NetworkConfig& config, std::span<const PiecewiseLinearTradeoff> tradeoffs) {
    require_valid(config);
    detail::require_matching_tradeoffs(config, tradeoffs);
    detail::require_cache_within_content(config);

    const std::size_t L = config.num_libraries();
    AllocationTrace trace;
    trace.final.per_library.assign(L, Rational(0));
    trace.tradeoff_labels = detail::labels_of(tradeoffs);
    std::vector<std::size_t> segment(L, 0);
    Rational allocated = 0;

    while (allocated < config.cache_size) {
        std::size_t best = L;
        Rational best_slope = 0;
        for (std::size_t l = 0; l < L; ++l) {
            if (segment[l] >= tradeoffs[l].segment_count())
                continue;  // full library: right-slope 0
            const Rational& slope = tradeoffs[l].slopes()[segment[l]];
            if (best == L || slope > best_slope) {
                best = l;
                best_slope = slope;
            }
        }
        if (best == L)
            throw std::logic_error("every library is full before the cache is allocated");

        const auto& theta = tradeoffs[best].breakpoints();
        const std::size_t i = segment[best];
        const Rational full_segment = config.libraries[best].alpha * (theta[i + 1] - theta[i]);
        const Rational remaining = config.cache_size - allocated;
        // A library may already sit inside segment i after a partial step; only the final step is partial.
        const Rational delta = rational_min(full_segment, remaining);
        trace.final.per_library[best] += delta;
        allocated += delta;
        trace.steps.push_back({best, i, delta, allocated});
        if (delta == full_segment)
            ++segment[best];
    }
    trace.rate = memory_sharing_rate(config, trace.final, tradeoffs);
    return trace;
}

/// Corner structure of an allocation: for each library the segment index i_l
/// and the leftover M_rem beyond the corner theta_{i_l} * alpha.
struct CornerStructure {
    std::vector<std::size_t> segment;
    std::vector<Rational> remainder;
    std::vector<std::size_t> non_corner;  // libraries with remainder > 0
    bool slope_conditions_hold = false;         // both inequalities on gamma_i, with sentinels
    std::string failure;
    bool scaled_slope_conditions_hold = false;  // the same inequalities on gamma_i / alpha
    std::string scaled_failure;

    bool at_most_one_non_corner() const { return non_corner.size() <= 1; }
};

namespace detail {

/// Optimality conditions at a corner structure: no library's right-slope
/// exceeds another's left-slope, and none exceeds the partially filled
/// library's right-slope. gamma_{-1} is infinite. With `scaled` every slope is
/// divided by its library's alpha.
inline bool check_slope_conditions(const NetworkConfig& config, std::span<const PiecewiseLinearTradeoff> tradeoffs,
                                   const CornerStructure& s, bool scaled, std::string& failure) {
    const std::size_t L = config.num_libraries();
    auto weight = [&](std::size_t l) { return scaled ? config.libraries[l].alpha : Rational(1); };
    auto right = [&](std::size_t l) { return tradeoffs[l].right_slope(s.segment[l]) / weight(l); };
    auto left = [&](std::size_t l) { return tradeoffs[l].right_slope(s.segment[l] - 1) / weight(l); };
    const std::string name = scaled ? "gamma_i/alpha" : "gamma_i";
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t m = 0; m < L; ++m) {
            if (s.segment[m] > 0 && right(l) > left(m)) {
                failure = "right " + name + " of library " + std::to_string(l + 1) + " exceeds the left " + name +
                          " of library " + std::to_string(m + 1);
                return false;
            }
        }
    }
    if (s.non_corner.size() == 1) {
        const std::size_t hat = s.non_corner.front();
        for (std::size_t l = 0; l < L; ++l) {
            if (right(l) > right(hat)) {
                failure = "library " + std::to_string(l + 1) + " has a steeper right " + name +
                          " than the partially filled library " + std::to_string(hat + 1);
                return false;
            }
        }
    }
    return true;
}

}  // namespace detail

inline CornerStructure analyze_corner_structure(const NetworkConfig& config, const Allocation& alloc,
                                                std::span<const PiecewiseLinearTradeoff> tradeoffs) {
    detail::require_matching_tradeoffs(config, tradeoffs);
    const std::size_t L = config.num_libraries();
    CornerStructure out;
    for (std::size_t l = 0; l < L; ++l) {
        const auto& alpha = config.libraries[l].alpha;
        const Rational memory = alloc.per_library[l] / alpha;
        const std::size_t i = tradeoffs[l].segment_at(memory);
        out.segment.push_back(i);
        out.remainder.push_back(alloc.per_library[l] - tradeoffs[l].breakpoints()[i] * alpha);
        if (out.remainder.back() > 0)
            out.non_corner.push_back(l);
    }

    out.slope_conditions_hold = detail::check_slope_conditions(config, tradeoffs, out, false, out.failure);
    out.scaled_slope_conditions_hold = detail::check_slope_conditions(config, tradeoffs, out, true, out.scaled_failure);
    return out;
}

struct BruteForceResult {
    Allocation allocation;
    Rational rate;
    std::uint64_t candidates = 0;
};

inline constexpr std::uint64_t kDefaultBruteForceCap = 4'000'000;

/// Exhaustive minimisation over the grid of multiples of `grid_step` (the last
/// library takes the remainder) plus every corner-aligned allocation. Ties go
/// to the lexicographically smallest allocation.
inline BruteForceResult brute_force_allocate(const NetworkConfig& config,
                                             std::span<const PiecewiseLinearTradeoff> tradeoffs,
                                             const Rational& grid_step,
                                             std::uint64_t cap = kDefaultBruteForceCap) {
    require_valid(config);
    detail::require_matching_tradeoffs(config, tradeoffs);
    detail::require_cache_within_content(config);
    if (grid_step <= 0)
        throw std::invalid_argument("grid_step must be positive");

    const std::size_t L = config.num_libraries();
    const Rational& M = config.cache_size;
    std::vector<Rational> capacity;
    for (const auto& lib : config.libraries)
        capacity.push_back(lib.alpha * lib.num_files);

    // Candidate values per library for the "fixed" coordinates.
    const BigInt grid_points = floor_of(M / grid_step) + 1;
    BigInt corner_count = 0;
    for (std::size_t free = 0; free < L; ++free) {
        BigInt combos = 1;
        for (std::size_t l = 0; l < L; ++l)
            if (l != free)
                combos *= tradeoffs[l].breakpoints().size();
        corner_count += combos;
    }
    const BigInt grid_count = boost::multiprecision::pow(grid_points, static_cast<unsigned>(L - 1));
    if (grid_count + corner_count > cap)
        throw EnumerationCapExceeded("brute-force candidates", grid_count + corner_count);

    BruteForceResult best;
    bool have_best = false;
    auto consider = [&](const std::vector<Rational>& cand) {
        ++best.candidates;
        Rational rate = 0;
        for (std::size_t l = 0; l < L; ++l) {
            if (cand[l] < 0 || cand[l] > capacity[l])
                return;
            rate += config.libraries[l].alpha * tradeoffs[l](cand[l] / config.libraries[l].alpha);
        }
        if (!have_best || rate < best.rate ||
            (rate == best.rate && std::lexicographical_compare(cand.begin(), cand.end(),
                                                               best.allocation.per_library.begin(),
                                                               best.allocation.per_library.end()))) {
            best.rate = rate;
            best.allocation.per_library = cand;
            have_best = true;
        }
    };

    std::vector<Rational> cand(L);
    // Uniform grid: odometer over the first L-1 coordinates.
    {
        const std::int64_t points = grid_points.convert_to<std::int64_t>();
        std::vector<std::int64_t> index(L > 0 ? L - 1 : 0, 0);
        while (true) {
            Rational used = 0;
            for (std::size_t l = 0; l + 1 < L; ++l) {
                cand[l] = grid_step * index[l];
                used += cand[l];
            }
            if (used <= M) {
                cand[L - 1] = M - used;
                consider(cand);
            }
            std::size_t pos = 0;
            while (pos < index.size() && ++index[pos] == points)
                index[pos++] = 0;
            if (pos == index.size())
                break;
        }
    }
    // Corner-aligned: every library but one at a breakpoint, the free one takes the rest.
    for (std::size_t free = 0; free < L; ++free) {
        std::vector<std::size_t> index(L, 0);
        while (true) {
            Rational used = 0;
            for (std::size_t l = 0; l < L; ++l) {
                if (l == free)
                    continue;
                cand[l] = tradeoffs[l].breakpoints()[index[l]] * config.libraries[l].alpha;
                used += cand[l];
            }
            cand[free] = M - used;
            consider(cand);
            std::size_t pos = 0;
            while (pos < L) {
                if (pos == free) {
                    ++pos;
                    continue;
                }
                if (++index[pos] == tradeoffs[pos].breakpoints().size()) {
                    index[pos++] = 0;
                    continue;
                }
                break;
            }
            if (pos == L)
                break;
        }
    }
    if (!have_best)
        throw std::logic_error("no feasible allocation found");
    return best;
}

struct LambdaSegment {
    Rational start;
    Rational end;
    Rational intercept;  // rate = intercept + slope * lambda on [start, end)
    Rational slope;
};

struct LambdaSample {
    Rational lambda;
    Rational rate;
};

struct LambdaSweep {
    std::vector<LambdaSample> samples;
    std::vector<Rational> breakpoints;
    std::vector<LambdaSegment> segments;
};

/// Rate of the two-library split (lambda M, (1 - lambda) M) as a function of lambda.
inline Rational two_library_rate(const NetworkConfig& config, std::span<const PiecewiseLinearTradeoff> tradeoffs,
                                 const Rational& lambda) {
    const Rational& M = config.cache_size;
    const auto& a1 = config.libraries[0].alpha;
    const auto& a2 = config.libraries[1].alpha;
    return a1 * tradeoffs[0](lambda * M / a1) + a2 * tradeoffs[1]((1 - lambda) * M / a2);
}

inline LambdaSweep lambda_sweep(const NetworkConfig& config, std::span<const PiecewiseLinearTradeoff> tradeoffs,
                                std::int64_t num_samples) {
    if (config.num_libraries() != 2)
        throw std::invalid_argument("lambda sweep needs exactly 2 libraries, config has " +
                                    std::to_string(config.num_libraries()));
    require_valid(config);
    detail::require_matching_tradeoffs(config, tradeoffs);
    if (num_samples < 1)
        throw std::invalid_argument("num_samples must be >= 1");

    const Rational& M = config.cache_size;
    std::vector<Rational> cuts{Rational(0), Rational(1)};
    if (M > 0) {
        for (const auto& theta : tradeoffs[0].breakpoints()) {
            const Rational lambda = theta * config.libraries[0].alpha / M;
            if (lambda > 0 && lambda < 1)
                cuts.push_back(lambda);
        }
        for (const auto& theta : tradeoffs[1].breakpoints()) {
            const Rational lambda = 1 - theta * config.libraries[1].alpha / M;
            if (lambda > 0 && lambda < 1)
                cuts.push_back(lambda);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    LambdaSweep sweep;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const Rational& a = cuts[i];
        const Rational& b = cuts[i + 1];
        const Rational slope = (two_library_rate(config, tradeoffs, b) - two_library_rate(config, tradeoffs, a)) / (b - a);
        const Rational intercept = two_library_rate(config, tradeoffs, a) - slope * a;
        if (!sweep.segments.empty() && sweep.segments.back().slope == slope &&
            sweep.segments.back().intercept == intercept) {
            sweep.segments.back().end = b;
            continue;
        }
        sweep.segments.push_back({a, b, intercept, slope});
    }
    for (std::size_t i = 1; i < sweep.segments.size(); ++i)
        sweep.breakpoints.push_back(sweep.segments[i].start);

    std::vector<Rational> grid;
    for (std::int64_t j = 0; j <= num_samples; ++j)
        grid.push_back(Rational(j, num_samples));
    grid.insert(grid.end(), sweep.breakpoints.begin(), sweep.breakpoints.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    for (const auto& lambda : grid)
        sweep.samples.push_back({lambda, two_library_rate(config, tradeoffs, lambda)});
    return sweep;
}

struct OptimalityCertificate {
    Rational single_library_rate;   // R(M) of the shared tradeoff
    Rational proportional_rate;     // memory-sharing rate at M_l = alpha_l M
    Rational greedy_rate;
    Rational converse_rate;         // concatenated-library bound, which is R(M) when every N is equal
    std::string tradeoff_label;
    bool exact_tradeoff = false;
    bool holds = false;
};

/// Equal-N optimality: proportional memory-sharing and greedy both reach R(M).
/// Meaningful as an optimality statement only when the shared tradeoff is exact.
inline OptimalityCertificate certify_equal_n_optimality(const NetworkConfig& config,
                                                        std::span<const PiecewiseLinearTradeoff> tradeoffs) {
    require_valid(config);
    detail::require_matching_tradeoffs(config, tradeoffs);
    const auto N = config.libraries.front().num_files;
    for (const auto& lib : config.libraries)
        if (lib.num_files != N)
            throw std::invalid_argument("certification needs equal N across libraries");
    for (const auto& t : tradeoffs)
        if (!t.same_curve(tradeoffs.front()))
            throw std::invalid_argument("certification needs the same tradeoff for every library");

    OptimalityCertificate cert;
    cert.tradeoff_label = tradeoffs.front().label();
    cert.exact_tradeoff = std::all_of(tradeoffs.begin(), tradeoffs.end(), [](const auto& t) { return t.is_exact(); });
    cert.single_library_rate = tradeoffs.front()(config.cache_size);
    cert.proportional_rate = memory_sharing_rate(config, proportional_allocation(config), tradeoffs);
    cert.greedy_rate = greedy_allocate(config, tradeoffs).rate;
    // beta is identically 1 here and sum(alpha) N = N, so the concatenated bound is R(M) itself.
    cert.converse_rate = cert.single_library_rate;
    cert.holds = cert.single_library_rate == cert.proportional_rate && cert.proportional_rate == cert.greedy_rate &&
                 cert.greedy_rate == cert.converse_rate;
    return cert;
}

}  // namespace mlcache
