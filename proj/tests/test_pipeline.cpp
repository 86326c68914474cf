#include <gtest/gtest.h>

#include "optdisc/errors.hpp"
#include "optdisc/geometry.hpp"
#include "optdisc/oracle.hpp"
#include "optdisc/pipeline.hpp"

using namespace optdisc;

namespace {

Instance xor_instance() {
    Instance inst;
    inst.w1 = {{0, 0, 1}, {1, 1, 1}};
    inst.w2 = {{0, 1, 2}, {1, 0, 2}};
    return normalize(inst).inst;
}

}  // namespace

TEST(Augment, FourLinesAroundThePoint) {
    auto s = augment_separation(Separation{}, Point{3, 3, 1});
    EXPECT_EQ(s.xs, (std::vector<long long>{2, 4}));
    EXPECT_EQ(s.ys, (std::vector<long long>{2, 4}));
    auto t = augment_separation(s, Point{6, 3, 1});
    EXPECT_EQ(t.xs, (std::vector<long long>{2, 4, 5, 7}));
    EXPECT_EQ(t.ys, (std::vector<long long>{2, 4}));  // no duplicates
}

TEST(Compress, RejectsANonSeparatingStart) {
    EXPECT_THROW(compress(xor_instance(), Separation{}, 2), InvalidApprox);
}

TEST(Compress, ShrinksAGenerousStart) {
    auto inst = xor_instance();
    Separation start{{2, 4, 5, 7}, {2, 4, 5, 7}};
    ASSERT_TRUE(verify_separation(inst, start).ok);
    auto s = compress(inst, start, 2);
    ASSERT_TRUE(s);
    EXPECT_TRUE(verify_separation(inst, *s).ok);
    EXPECT_LE(s->size(), 2);
    EXPECT_FALSE(compress(inst, start, 1));
}

TEST(Decide, Xor) {
    auto inst = xor_instance();
    EXPECT_FALSE(decide(inst, 0));
    EXPECT_FALSE(decide(inst, 1));
    auto s = decide(inst, 2);
    ASSERT_TRUE(s);
    EXPECT_TRUE(verify_separation(inst, *s).ok);
}

TEST(Decide, SingleClassNeedsNoLines) {
    Instance inst;
    inst.w1 = {{0, 0, 1}, {4, 1, 1}, {2, 9, 1}};
    inst = normalize(inst).inst;
    auto s = decide(inst, 0);
    ASSERT_TRUE(s);
    EXPECT_EQ(s->size(), 0);
    EXPECT_EQ(solve_min(inst).size(), 0);
}

TEST(Decide, MonotoneInK) {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        auto inst = normalize(generate_random(seed, 8, 8)).inst;
        const int opt = min_separation_bruteforce(inst).size();
        for (int k = 0; k <= opt + 1; ++k) {
            auto s = decide(inst, k);
            EXPECT_EQ(s.has_value(), k >= opt) << seed << " k=" << k;
            if (s) {
                EXPECT_LE(s->size(), k);
                EXPECT_TRUE(verify_separation(inst, *s).ok);
            }
        }
    }
}

TEST(SolveMin, MatchesOracleOnSmallRandomInstances) {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto inst = normalize(generate_random(seed, 10, 10)).inst;
        auto s = solve_min(inst);
        EXPECT_TRUE(verify_separation(inst, s).ok) << seed;
        EXPECT_EQ(s.size(), min_separation_bruteforce(inst).size()) << seed;
    }
}

TEST(SolveMin, PlantedGrid) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        auto inst = normalize(generate_planted(seed, 2, 1, 2)).inst;
        auto s = solve_min(inst);
        EXPECT_TRUE(verify_separation(inst, s).ok);
        EXPECT_LE(s.size(), 3);
        EXPECT_EQ(s.size(), min_separation_bruteforce(inst).size()) << seed;
    }
}

TEST(SolveMin, RandomizedIsNeverBelowTheOptimum) {
    SolveOptions o;
    o.reduction.mode = ColorMode::Randomized;
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        o.reduction.seed = seed;
        auto inst = normalize(generate_random(seed, 8, 8)).inst;
        auto s = solve_min(inst, o);
        EXPECT_TRUE(verify_separation(inst, s).ok);
        EXPECT_GE(s.size(), min_separation_bruteforce(inst).size()) << seed;
    }
}

TEST(SolveMin, ParallelFanOutMatchesSerial) {
    SolveOptions par;
    par.jobs = 4;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto inst = normalize(generate_random(seed, 9, 8)).inst;
        ReductionStats s1, s2;
        auto a = solve_min(inst, {}, &s1);
        auto b = solve_min(inst, par, &s2);
        EXPECT_EQ(a.size(), b.size()) << seed;
        EXPECT_TRUE(verify_separation(inst, b).ok);
        EXPECT_EQ(s1.structure_violations, 0);
        EXPECT_EQ(s2.structure_violations, 0);
    }
}
