#pragma once

#include "mlcache/allocation.hpp"
#include "mlcache/model.hpp"
#include "mlcache/tradeoff.hpp"

#include <random>
#include <vector>

namespace mlcache::fixture {

inline Rational q(std::int64_t p, std::int64_t d = 1) { return Rational(p, d); }

/// Straight-line interpolation between corner points; independent of the
/// segment representation used by PiecewiseLinearTradeoff.
inline Rational interpolate(const std::vector<CornerPoint>& corners, const Rational& memory) {
    if (memory >= corners.back().memory)
        return corners.back().rate;
    for (std::size_t i = 0; i + 1 < corners.size(); ++i) {
        const auto& a = corners[i];
        const auto& b = corners[i + 1];
        if (a.memory <= memory && memory <= b.memory)
            return a.rate + (b.rate - a.rate) * (memory - a.memory) / (b.memory - a.memory);
    }
    throw std::logic_error("memory below the first corner");
}

inline NetworkConfig two_library_config() {
    return {{{2, q(2, 5)}, {2, q(3, 5)}}, 2, q(1)};
}

inline NetworkConfig unequal_config(Rational cache = q(1, 2)) {
    return {{{1, q(1, 2)}, {2, q(1, 2)}}, 2, std::move(cache)};
}

inline std::vector<PiecewiseLinearTradeoff> auto_tradeoffs(const NetworkConfig& config) {
    std::vector<PiecewiseLinearTradeoff> out;
    for (const auto& lib : config.libraries)
        out.push_back(build_tradeoff("auto", lib.num_files, config.num_users));
    return out;
}

inline std::vector<PiecewiseLinearTradeoff> scheme_tradeoffs(const NetworkConfig& config) {
    std::vector<PiecewiseLinearTradeoff> out;
    for (const auto& lib : config.libraries)
        out.push_back(build_centralized_scheme_tradeoff(lib.num_files, config.num_users));
    return out;
}

/// Random configs: L <= 4, alpha from positive integer weights renormalised,
/// N and K in 1..4, M on the grid total_content * j / 8.
class ConfigGenerator {
public:
    explicit ConfigGenerator(std::uint64_t seed) : rng_(seed) {}

    NetworkConfig next(bool equal_n, std::int64_t max_libraries = 4, std::int64_t max_n = 4, std::int64_t max_k = 4) {
        NetworkConfig config;
        const auto L = pick(1, max_libraries);
        const auto shared_n = pick(1, max_n);
        std::vector<std::int64_t> weights;
        std::int64_t total = 0;
        for (std::int64_t l = 0; l < L; ++l) {
            weights.push_back(pick(1, 6));
            total += weights.back();
        }
        for (std::int64_t l = 0; l < L; ++l)
            config.libraries.push_back({equal_n ? shared_n : pick(1, max_n), Rational(weights[static_cast<std::size_t>(l)], total)});
        config.num_users = pick(1, max_k);
        config.cache_size = total_content(config) * pick(0, 8) / 8;
        return config;
    }

    std::int64_t pick(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
    }

    Rational rational_in(const Rational& lo, const Rational& hi, std::int64_t denominator = 60) {
        return lo + (hi - lo) * pick(0, denominator) / denominator;
    }

    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace mlcache::fixture
