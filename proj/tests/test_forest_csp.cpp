#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "optdisc/errors.hpp"
#include "optdisc/forest_csp.hpp"
#include "optdisc/oracle.hpp"
#include "random_structures.hpp"

using namespace optdisc;

namespace {

// Satisfying assignments restricted to the variables that stay alive.
std::set<std::vector<int>> solution_set(const ForestCspInstance& inst) {
    std::set<std::vector<int>> out;
    for (const auto& a : forest_csp_enumerate(inst, 1u << 20)) out.insert(a);
    return out;
}

}  // namespace

TEST(ForbidValue, IsolatedVariable) {
    ForestCspInstance inst;
    int y = inst.add_tree(3);
    inst.set_values(y, {10, 20, 30});
    auto j = forbid_value(inst, y, 2);
    EXPECT_EQ(j.domain(0), 2);
    EXPECT_EQ(j.values[y], (std::vector<long long>{10, 30}));
}

TEST(ForbidValue, PropagatesThroughFullReversal) {
    ForestCspInstance inst;
    int y = inst.add_tree(3);
    int y2 = inst.add_child(y, SegmentReversion::full(3));
    int z = inst.add_tree(3);
    inst.set_values(y2, {1, 2, 3});
    inst.add_constraint(y2, z, DownwardClosedRelation(3, 3, {3, 2, 1}));
    auto j = forbid_value(inst, y, 1);
    EXPECT_EQ(j.domain(0), 2);
    // y2 lost value 3 (the image of 1); frontier rows 1, 2 survive.
    EXPECT_EQ(j.values[y2], (std::vector<long long>{1, 2}));
    EXPECT_EQ(j.constraints[0].rel.frontier(), (std::vector<int>{3, 2}));
    // Bijection of satisfying assignments avoiding y = 1.
    auto before = solution_set(inst);
    auto after = solution_set(j);
    std::size_t avoiding = std::count_if(before.begin(), before.end(), [&](const auto& a) { return a[y] != 1; });
    EXPECT_EQ(avoiding, after.size());
}

TEST(ForbidValue, LastValueEmptiesDomain) {
    ForestCspInstance inst;
    int y = inst.add_tree(1);
    EXPECT_EQ(forbid_value(inst, y, 1).domain(0), 0);
}

TEST(RestrictDomain, FullKeepIsUnchangedAndEmptyKeepEmpties) {
    ForestCspInstance inst;
    int y = inst.add_tree(4);
    inst.add_child(y, SegmentReversion::from_boundaries(4, {1, 3, 5}));
    auto same = restrict_domain(inst, y, std::vector<bool>(4, true));
    EXPECT_EQ(debug_dump(same), debug_dump(inst));
    EXPECT_EQ(restrict_domain(inst, y, std::vector<bool>(4, false)).domain(0), 0);
}

TEST(RestrictDomain, LeftEndpointsMakeEdgeIdentity) {
    ForestCspInstance inst;
    int y = inst.add_tree(6);
    auto g = SegmentReversion::from_boundaries(6, {1, 3, 4, 7});
    int y2 = inst.add_child(y, g);
    std::vector<bool> keep(6, false);
    for (int i = 0; i < g.partition().segments(); ++i) keep[g.partition().begin(i) - 1] = true;
    auto j = restrict_domain(inst, y, keep);
    EXPECT_EQ(j.domain(0), 3);
    EXPECT_TRUE(j.edges[0].g.is_identity());
    auto before = solution_set(inst);
    auto after = solution_set(j);
    std::size_t kept = std::count_if(before.begin(), before.end(), [&](const auto& a) { return keep[a[y] - 1]; });
    EXPECT_EQ(kept, after.size());
    (void)y2;
}

TEST(RestrictDomain, RandomBijection) {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 300; ++t) {
        auto inst = testing_support::random_forest_csp(rng, 3, 6, 6, 4);
        int y = testing_support::uniform(rng, 0, inst.num_variable_slots() - 1);
        int m = inst.domain(inst.tree(y));
        std::vector<bool> keep(m);
        for (int i = 0; i < m; ++i) keep[i] = rng() & 1;
        auto j = restrict_domain(inst, y, keep);
        auto before = solution_set(inst);
        auto after = solution_set(j);
        std::size_t kept = std::count_if(before.begin(), before.end(), [&](const auto& a) { return keep[a[y] - 1]; });
        ASSERT_EQ(kept, after.size());
    }
}

TEST(Preprocess, ZeroVariablesTriviallySat) {
    ForestCspInstance inst;
    EXPECT_EQ(preprocess(inst).status, PreprocessStatus::TriviallySat);
}

TEST(Preprocess, IntraTreeConstraintExcludingAll) {
    ForestCspInstance inst;
    int y = inst.add_tree(3);
    int y2 = inst.add_child(y, SegmentReversion::full(3));
    // phi(y2) = 4 - phi(y); require phi(y) + phi(y2) < 4 impossible via frontier 0.
    inst.add_constraint(y, y2, DownwardClosedRelation(3, 3, {1, 1, 0}));
    EXPECT_EQ(preprocess(inst).status, PreprocessStatus::Unsat);
}

TEST(Preprocess, ForbidsRowWithoutPartner) {
    ForestCspInstance inst;
    int a = inst.add_tree(2);
    int b = inst.add_tree(2);
    inst.add_constraint(a, b, DownwardClosedRelation(2, 2, {2, 0}));
    auto r = preprocess(inst);
    ASSERT_EQ(r.status, PreprocessStatus::Preprocessed);
    EXPECT_EQ(r.inst.domain(0), 1);
    EXPECT_EQ(r.inst.domain(1), 2);
    EXPECT_LE(r.inst.apparent_size(), inst.apparent_size());
}

TEST(Propagate, Basics) {
    ForestCspInstance inst;
    int y = inst.add_tree(4);
    int y2 = inst.add_child(y, SegmentReversion::full(4));
    auto g = SegmentReversion::from_boundaries(4, {1, 3, 5});
    int y3 = inst.add_child(y2, g);
    int z = inst.add_tree(4);
    EXPECT_EQ(propagate(inst, y, 3, y), 3);
    EXPECT_EQ(propagate(inst, y, 1, y2), 4);
    for (int a = 1; a <= 4; ++a) EXPECT_EQ(propagate(inst, y, a, y3), g.apply(5 - a));
    EXPECT_THROW(propagate(inst, y, 1, z), DifferentTrees);
}

TEST(Solve, EmptyInstance) {
    ForestCspInstance inst;
    auto r = solve(inst);
    ASSERT_TRUE(r);
    EXPECT_TRUE(r->empty());
}

TEST(Solve, TwoIsolatedVariables) {
    ForestCspInstance inst;
    int a = inst.add_tree(2);
    int b = inst.add_tree(2);
    inst.add_constraint(a, b, DownwardClosedRelation(2, 2, {2, 0}));
    auto r = solve(inst);
    ASSERT_TRUE(r);
    EXPECT_EQ((*r)[a], 1);
}

TEST(Solve, MatchesEnumeration) {
    std::mt19937_64 rng(1234);
    int sat = 0;
    for (int t = 0; t < 1000; ++t) {
        auto inst = testing_support::random_forest_csp(rng, 4, 6, 8, 5);
        bool expect = !forest_csp_enumerate(inst, 1).empty();
        auto r = solve(inst);
        ASSERT_EQ(static_cast<bool>(r), expect) << debug_dump(inst);
        if (r) {
            ++sat;
            ASSERT_TRUE(verify_assignment(inst, *r).ok);
        }
    }
    EXPECT_GT(sat, 100);
    EXPECT_LT(sat, 900);
}

TEST(VerifyAssignment, DetectsCorruption) {
    std::mt19937_64 rng(99);
    int checked = 0;
    for (int t = 0; t < 200 && checked < 50; ++t) {
        auto inst = testing_support::random_forest_csp(rng, 3, 5, 6, 3);
        auto sols = forest_csp_enumerate(inst, 1u << 20);
        if (sols.empty()) continue;
        ASSERT_TRUE(verify_assignment(inst, sols[0]).ok);
        for (int y = 0; y < inst.num_variable_slots(); ++y) {
            int m = inst.domain(inst.tree(y));
            if (m < 2) continue;
            auto bad = sols[0];
            bad[y] = bad[y] % m + 1;
            bool in_set = std::find(sols.begin(), sols.end(), bad) != sols.end();
            EXPECT_EQ(verify_assignment(inst, bad).ok, in_set);
            ++checked;
            break;
        }
    }
    EXPECT_GT(checked, 10);
}

TEST(FromAuxiliary, NoConstraintsGivesIsolatedTrees) {
    AuxiliaryCspInstance aux;
    aux.add_variable(3);
    aux.add_variable(2);
    auto r = from_auxiliary(aux);
    EXPECT_EQ(r.inst.num_trees(), 2);
    EXPECT_EQ(r.inst.num_variables(), 2);
    EXPECT_TRUE(r.inst.edges.empty());
}

TEST(FromAuxiliary, DepthZeroConstraintIsDirect) {
    AuxiliaryCspInstance aux;
    aux.add_variable(3);
    aux.add_variable(3);
    aux.constraints.push_back({0, 1, {}, {}, DownwardClosedRelation(3, 3, {3, 2, 1}), "direct"});
    auto r = from_auxiliary(aux);
    EXPECT_EQ(r.inst.num_variables(), 2);
    ASSERT_EQ(r.inst.num_constraints(), 1);
    EXPECT_EQ(r.inst.constraints[0].u, r.var_of[0]);
    EXPECT_EQ(r.inst.constraints[0].v, r.var_of[1]);
}

TEST(FromAuxiliary, DepthTwoBijection) {
    AuxiliaryCspInstance aux;
    aux.add_variable(4);
    aux.add_variable(4);
    auto cl = clause_relation(ClauseKind::GeGe, {{3, 2}, {2, 4}}, 4, 4);
    aux.constraints.push_back({0, 1, {cl.g1}, {cl.g2}, cl.rel, "clause"});
    auto r = from_auxiliary(aux);
    EXPECT_EQ(r.inst.apparent_size(), aux.total_depth() + 2 * 2 + 1);
    std::set<std::pair<int, int>> want, got;
    for (int a = 1; a <= 4; ++a)
        for (int b = 1; b <= 4; ++b)
            if (aux.satisfied_by({a, b})) want.insert({a, b});
    for (const auto& s : forest_csp_enumerate(r.inst, 1000)) got.insert({s[r.var_of[0]], s[r.var_of[1]]});
    EXPECT_EQ(want, got);
}

TEST(FromAuxiliary, RandomChainsBiject) {
    std::mt19937_64 rng(77);
    for (int t = 0; t < 200; ++t) {
        AuxiliaryCspInstance aux;
        int k = testing_support::uniform(rng, 1, 3);
        for (int i = 0; i < k; ++i) aux.add_variable(testing_support::uniform(rng, 1, 5));
        int c = testing_support::uniform(rng, 0, 3);
        for (int j = 0; j < c; ++j) {
            AuxConstraint C;
            C.x1 = testing_support::uniform(rng, 0, k - 1);
            C.x2 = testing_support::uniform(rng, 0, k - 1);
            for (int d = testing_support::uniform(rng, 0, 2); d > 0; --d)
                C.rep1.push_back(testing_support::random_reversion(rng, aux.domain_size[C.x1]));
            for (int d = testing_support::uniform(rng, 0, 2); d > 0; --d)
                C.rep2.push_back(testing_support::random_reversion(rng, aux.domain_size[C.x2]));
            C.rel = testing_support::random_relation(rng, aux.domain_size[C.x1], aux.domain_size[C.x2]);
            aux.constraints.push_back(C);
        }
        auto r = from_auxiliary(aux);
        ASSERT_EQ(r.inst.apparent_size(), aux.total_depth() + 2 * k + c);
        std::set<std::vector<int>> want, got;
        std::vector<int> a(k, 1);
        for (;;) {
            if (aux.satisfied_by(a)) want.insert(a);
            int i = 0;
            while (i < k && a[i] == aux.domain_size[i]) a[i++] = 1;
            if (i == k) break;
            ++a[i];
        }
        for (const auto& s : forest_csp_enumerate(r.inst, 1u << 20)) {
            std::vector<int> proj;
            for (int i = 0; i < k; ++i) proj.push_back(s[r.var_of[i]]);
            got.insert(proj);
        }
        ASSERT_EQ(want, got);
        auto sol = solve(r.inst);
        ASSERT_EQ(static_cast<bool>(sol), !want.empty());
    }
}

TEST(DebugDump, StableFormat) {
    ForestCspInstance inst;
    int y = inst.add_tree(3);
    inst.add_child(y, SegmentReversion::full(3));
    int z = inst.add_tree(2);
    inst.add_constraint(y, z, DownwardClosedRelation(3, 2, {2, 1, 0}));
    EXPECT_EQ(debug_dump(inst),
              "forest-csp trees 2 variables 3 constraints 1\n"
              "tree 0 domain 3\n"
              "tree 1 domain 2\n"
              "var 0 tree 0\n"
              "var 1 tree 0\n"
              "var 2 tree 1\n"
              "edge 0 1 boundaries 1 4\n"
              "constraint 0 2 frontier 2 1 0\n");
}
