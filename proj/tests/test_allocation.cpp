#include "mlcache/allocation.hpp"
#include "mlcache/io.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

using namespace mlcache;
using mlcache::fixture::q;

namespace {

std::vector<PiecewiseLinearTradeoff> exact_pair() { return {build_exact_two_by_two(), build_exact_two_by_two()}; }

}  // namespace

TEST(MemorySharingRate, TwoLibraryPoints) {
    const auto config = fixture::two_library_config();
    const auto t = exact_pair();
    EXPECT_EQ(memory_sharing_rate(config, {{q(2, 5), q(3, 5)}}, t), q(1, 2));
    EXPECT_EQ(memory_sharing_rate(config, {{q(0), q(1)}}, t), q(9, 10));
}

TEST(MemorySharingRate, FullCacheIsFree) {
    auto config = fixture::two_library_config();
    config.cache_size = total_content(config);
    EXPECT_EQ(memory_sharing_rate(config, {{q(4, 5), q(6, 5)}}, exact_pair()), q(0));
}

TEST(MemorySharingRate, RejectsMismatches) {
    const auto config = fixture::two_library_config();
    EXPECT_THROW(memory_sharing_rate(config, {{q(1, 5), q(3, 5)}}, exact_pair()), std::invalid_argument);
    EXPECT_THROW(memory_sharing_rate(config, {{q(1)}}, exact_pair()), std::invalid_argument);
    std::vector<PiecewiseLinearTradeoff> wrong{build_exact_two_by_two(), build_centralized_scheme_tradeoff(3, 2)};
    EXPECT_THROW(memory_sharing_rate(config, {{q(2, 5), q(3, 5)}}, wrong), std::invalid_argument);
}

TEST(Greedy, TwoLibraryTrace) {
    const auto trace = greedy_allocate(fixture::two_library_config(), exact_pair());
    ASSERT_EQ(trace.steps.size(), 4u);
    const std::vector<std::size_t> libs{0, 1, 0, 1};
    const std::vector<Rational> deltas{q(1, 5), q(3, 10), q(1, 5), q(3, 10)};
    const std::vector<Rational> totals{q(1, 5), q(1, 2), q(7, 10), q(1)};
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(trace.steps[i].library, libs[i]);
        EXPECT_EQ(trace.steps[i].delta, deltas[i]);
        EXPECT_EQ(trace.steps[i].allocated_total, totals[i]);
    }
    EXPECT_EQ(trace.steps[2].segment_before, 1u);
    EXPECT_EQ(trace.final.per_library, (std::vector<Rational>{q(2, 5), q(3, 5)}));
    EXPECT_EQ(trace.rate, q(1, 2));
    EXPECT_EQ(trace.tradeoff_labels, (std::vector<std::string>{"exact(N=2,K=2)", "exact(N=2,K=2)"}));
}

TEST(Greedy, ZeroCache) {
    auto config = fixture::two_library_config();
    config.cache_size = 0;
    const auto trace = greedy_allocate(config, exact_pair());
    EXPECT_TRUE(trace.steps.empty());
    EXPECT_EQ(trace.final.per_library, (std::vector<Rational>{q(0), q(0)}));
    EXPECT_EQ(trace.rate, q(2, 5) * 2 + q(3, 5) * 2);
}

TEST(Greedy, FullCache) {
    auto config = fixture::two_library_config();
    config.cache_size = total_content(config);
    const auto trace = greedy_allocate(config, exact_pair());
    EXPECT_EQ(trace.final.per_library, (std::vector<Rational>{q(4, 5), q(6, 5)}));
    EXPECT_EQ(trace.rate, q(0));
}

TEST(Greedy, RejectsUnclampedCache) {
    auto config = fixture::two_library_config();
    config.cache_size = 3;
    EXPECT_THROW(greedy_allocate(config, exact_pair()), std::invalid_argument);
}

TEST(Greedy, TieGoesToSmallestIndex) {
    // unequal_n: library 1 slope 1/(1/2) = 2 ties with library 2 after its first segment (1/(1/2) = 2).
    const auto config = fixture::unequal_config();
    const auto t = fixture::auto_tradeoffs(config);
    const auto trace = greedy_allocate(config, t);
    ASSERT_EQ(trace.steps.size(), 2u);
    EXPECT_EQ(trace.steps[0].library, 1u);
    EXPECT_EQ(trace.steps[1].library, 0u);
    EXPECT_EQ(trace.final.per_library, (std::vector<Rational>{q(1, 4), q(1, 4)}));
}

TEST(Greedy, RanksByUnscaledSlope) {
    // Equal N, skewed alpha: the optimum is proportional, both libraries at theta = 3.
    const NetworkConfig config{{{4, q(1, 6)}, {4, q(5, 6)}}, 4, q(3)};
    const auto t = fixture::scheme_tradeoffs(config);
    const auto greedy = greedy_allocate(config, t);
    EXPECT_EQ(greedy.final.per_library, (std::vector<Rational>{q(1, 2), q(5, 2)}));
    EXPECT_EQ(greedy.rate, q(1, 4));
    EXPECT_EQ(greedy.rate, t[0](q(3)));
    // Ranking by gamma / alpha fills library 1 first and stops at (2/3, 7/3).
    EXPECT_EQ(memory_sharing_rate(config, {{q(2, 3), q(7, 3)}}, t), q(5, 18));

    const auto s = analyze_corner_structure(config, greedy.final, t);
    EXPECT_TRUE(s.non_corner.empty());
    EXPECT_TRUE(s.slope_conditions_hold) << s.failure;
    // gamma_3 / (1/6) = 3/2 exceeds gamma_2 / (5/6) = 1/2 at the unique optimum.
    EXPECT_FALSE(s.scaled_slope_conditions_hold);
    EXPECT_EQ(brute_force_allocate(config, t, q(1, 12)).rate, q(1, 4));
}

TEST(BruteForce, TwoLibraryGrid) {
    const auto r = brute_force_allocate(fixture::two_library_config(), exact_pair(), q(1, 20));
    EXPECT_EQ(r.rate, q(1, 2));
    EXPECT_EQ(r.allocation.per_library, (std::vector<Rational>{q(2, 5), q(3, 5)}));
}

TEST(BruteForce, SingleLibraryIsTrivial) {
    NetworkConfig config{{{3, q(1)}}, 2, q(5, 4)};
    const std::vector<PiecewiseLinearTradeoff> t{build_centralized_scheme_tradeoff(3, 2)};
    const auto r = brute_force_allocate(config, t, q(1, 3));
    EXPECT_EQ(r.allocation.per_library, (std::vector<Rational>{q(5, 4)}));
    EXPECT_EQ(r.rate, t[0](q(5, 4)));
}

TEST(BruteForce, CapExceeded) {
    fixture::ConfigGenerator gen(5);
    NetworkConfig config{{{2, q(1, 4)}, {2, q(1, 4)}, {2, q(1, 4)}, {2, q(1, 4)}}, 2, q(1)};
    const auto t = fixture::auto_tradeoffs(config);
    EXPECT_THROW(brute_force_allocate(config, t, q(1, 1000), 10000), EnumerationCapExceeded);
    EXPECT_THROW(brute_force_allocate(config, t, q(0)), std::invalid_argument);
}

TEST(Proportional, Rule) {
    EXPECT_EQ(proportional_allocation(fixture::two_library_config()).per_library, (std::vector<Rational>{q(2, 5), q(3, 5)}));
    NetworkConfig uniform{{{2, q(1, 3)}, {3, q(1, 3)}, {1, q(1, 3)}}, 2, q(1)};
    EXPECT_EQ(proportional_allocation(uniform).per_library, (std::vector<Rational>{q(1, 3), q(1, 3), q(1, 3)}));
    EXPECT_EQ(proportional_allocation(fixture::unequal_config(q(1))).per_library,
              (std::vector<Rational>{q(1, 2), q(1, 2)}));
}

TEST(LambdaSweep, TwoLibrarySegments) {
    const auto sweep = lambda_sweep(fixture::two_library_config(), exact_pair(), 10);
    ASSERT_EQ(sweep.segments.size(), 5u);
    const std::vector<std::pair<Rational, Rational>> expected{
        {q(9, 10), q(-3, 2)}, {q(7, 10), q(-1, 2)}, {q(3, 10), q(1, 2)}, {q(-2, 5), q(3, 2)}, {q(-4, 5), q(2)}};
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(sweep.segments[i].intercept, expected[i].first) << i;
        EXPECT_EQ(sweep.segments[i].slope, expected[i].second) << i;
    }
    EXPECT_EQ(sweep.breakpoints, (std::vector<Rational>{q(1, 5), q(2, 5), q(7, 10), q(4, 5)}));
}

TEST(LambdaSweep, SamplesIncludeBreakpointsAndKnownValues) {
    const auto config = fixture::two_library_config();
    const auto sweep = lambda_sweep(config, exact_pair(), 10);
    auto at = [&](const Rational& lambda) {
        for (const auto& s : sweep.samples)
            if (s.lambda == lambda)
                return s.rate;
        ADD_FAILURE() << "lambda " << lambda << " not sampled";
        return Rational(-1);
    };
    EXPECT_EQ(at(q(3, 10)), q(11, 20));
    EXPECT_EQ(at(q(2, 5)), q(1, 2));
    EXPECT_EQ(at(q(1)), q(6, 5));
    EXPECT_EQ(at(q(7, 10)), q(3, 10) + q(1, 2) * q(7, 10));
    const auto best = std::min_element(sweep.samples.begin(), sweep.samples.end(),
                                       [](const auto& a, const auto& b) { return a.rate < b.rate; });
    EXPECT_EQ(best->lambda, q(2, 5));
    EXPECT_EQ(best->rate, q(1, 2));
}

TEST(LambdaSweep, ZeroCacheIsConstant) {
    auto config = fixture::two_library_config();
    config.cache_size = 0;
    const auto sweep = lambda_sweep(config, exact_pair(), 4);
    ASSERT_EQ(sweep.segments.size(), 1u);
    EXPECT_EQ(sweep.segments[0].slope, q(0));
    EXPECT_EQ(sweep.segments[0].intercept, q(2));
}

TEST(LambdaSweep, NeedsTwoLibraries) {
    NetworkConfig config{{{2, q(1, 6)}, {2, q(1, 3)}, {2, q(1, 2)}}, 2, q(1)};
    EXPECT_THROW(lambda_sweep(config, fixture::auto_tradeoffs(config), 10), std::invalid_argument);
}

TEST(Certify, TwoLibrary) {
    const auto cert = certify_equal_n_optimality(fixture::two_library_config(), exact_pair());
    EXPECT_TRUE(cert.holds);
    EXPECT_TRUE(cert.exact_tradeoff);
    EXPECT_EQ(cert.greedy_rate, q(1, 2));
    EXPECT_EQ(cert.single_library_rate, q(1, 2));
}

TEST(Certify, ZeroCache) {
    auto config = fixture::two_library_config();
    config.cache_size = 0;
    const auto cert = certify_equal_n_optimality(config, exact_pair());
    EXPECT_TRUE(cert.holds);
    EXPECT_EQ(cert.proportional_rate, build_exact_two_by_two()(q(0)));
}

TEST(Certify, ThreeLibrariesAgreeWithBruteForce) {
    NetworkConfig config{{{2, q(1, 6)}, {2, q(1, 3)}, {2, q(1, 2)}}, 2, q(1)};
    const std::vector<PiecewiseLinearTradeoff> t(3, build_exact_two_by_two());
    const auto cert = certify_equal_n_optimality(config, t);
    EXPECT_TRUE(cert.holds);
    EXPECT_EQ(cert.proportional_rate, q(1, 2));
    EXPECT_EQ(brute_force_allocate(config, t, q(1, 12)).rate, q(1, 2));
}

TEST(Certify, UnequalNIsNotApplicable) {
    const auto config = fixture::unequal_config();
    EXPECT_THROW(certify_equal_n_optimality(config, fixture::auto_tradeoffs(config)), std::invalid_argument);
}

TEST(AllocationJson, TraceCarriesStepsAndLabels) {
    const auto j = to_json(greedy_allocate(fixture::two_library_config(), exact_pair()));
    EXPECT_EQ(j["steps"].size(), 4u);
    EXPECT_EQ(j["steps"][1]["library"], 2);
    EXPECT_EQ(j["final"], json::parse(R"(["2/5","3/5"])"));
    EXPECT_EQ(j["rate"], "1/2");
}

class AllocationProperties : public ::testing::Test {
protected:
    fixture::ConfigGenerator gen{99};
};

TEST_F(AllocationProperties, GreedyMatchesCornerAugmentedBruteForce) {
    for (int i = 0; i < 120; ++i) {
        const auto config = gen.next(i % 2 == 0, 3);
        const auto t = fixture::auto_tradeoffs(config);
        const auto greedy = greedy_allocate(config, t);
        const auto brute = brute_force_allocate(config, t, total_content(config) / 6);
        EXPECT_EQ(greedy.rate, brute.rate) << to_json(config).dump();
        const auto structure = analyze_corner_structure(config, greedy.final, t);
        EXPECT_TRUE(structure.at_most_one_non_corner());
        EXPECT_TRUE(structure.slope_conditions_hold) << structure.failure;
        EXPECT_EQ(greedy.final.total(), config.cache_size);
        for (std::size_t s = 1; s < greedy.steps.size(); ++s)
            EXPECT_LE(greedy.steps[s - 1].allocated_total, greedy.steps[s].allocated_total);
    }
}

TEST_F(AllocationProperties, RateNonIncreasingInCache) {
    for (int i = 0; i < 40; ++i) {
        auto config = gen.next(false);
        const auto t = fixture::auto_tradeoffs(config);
        const auto total = total_content(config);
        Rational previous = -1;
        for (int j = 0; j <= 12; ++j) {
            config.cache_size = total * j / 12;
            const auto rate = memory_sharing_rate(config, proportional_allocation(config), t);
            if (previous >= 0) {
                EXPECT_LE(rate, previous);
            }
            previous = rate;
        }
    }
}

TEST_F(AllocationProperties, PermutingLibrariesPermutesTheAnswer) {
    for (int i = 0; i < 60; ++i) {
        const auto config = gen.next(false);
        const auto t = fixture::auto_tradeoffs(config);
        std::vector<std::size_t> perm(config.num_libraries());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), gen.rng());
        NetworkConfig permuted = config;
        std::vector<PiecewiseLinearTradeoff> pt;
        for (std::size_t j = 0; j < perm.size(); ++j) {
            permuted.libraries[j] = config.libraries[perm[j]];
            pt.push_back(t[perm[j]]);
        }
        const auto a = greedy_allocate(config, t);
        const auto b = greedy_allocate(permuted, pt);
        EXPECT_EQ(a.rate, b.rate);
        // With distinct slopes the allocation itself is permuted.
        std::vector<Rational> slopes;
        for (const auto& curve : t)
            slopes.insert(slopes.end(), curve.slopes().begin(), curve.slopes().end());
        std::sort(slopes.begin(), slopes.end());
        if (std::adjacent_find(slopes.begin(), slopes.end()) == slopes.end()) {
            for (std::size_t j = 0; j < perm.size(); ++j)
                EXPECT_EQ(b.final.per_library[j], a.final.per_library[perm[j]]);
        }
    }
}
