#pragma once

// Random generators shared by the property tests and the acceptance run.

#include <algorithm>
#include <random>
#include <vector>

#include "optdisc/forest_csp.hpp"
#include "optdisc/segrev.hpp"

namespace testing_support {

using namespace optdisc;

inline int uniform(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline SegmentPartition random_partition(std::mt19937_64& rng, int m) {
    std::vector<int> b{1};
    for (int i = 2; i <= m; ++i)
        if (rng() & 1) b.push_back(i);
    b.push_back(m + 1);
    return SegmentPartition::from_boundaries(m, b);
}

inline SegmentPartition random_refinement(std::mt19937_64& rng, const SegmentPartition& p) {
    std::vector<int> b;
    for (int i = 1; i <= p.m + 1; ++i) {
        bool forced = std::binary_search(p.boundaries.begin(), p.boundaries.end(), i);
        if (forced || uniform(rng, 0, 2) == 0) b.push_back(i);
    }
    return SegmentPartition::from_boundaries(p.m, b);
}

inline SegmentReversion random_reversion(std::mt19937_64& rng, int m) {
    return reversal_of_partition(random_partition(rng, m));
}

inline DownwardClosedRelation random_relation(std::mt19937_64& rng, int m1, int m2) {
    std::vector<int> fr(m1);
    for (auto& v : fr) v = uniform(rng, 0, m2);
    std::sort(fr.rbegin(), fr.rend());
    // Occasionally make it full or empty.
    int mode = uniform(rng, 0, 9);
    if (mode == 0) std::fill(fr.begin(), fr.end(), m2);
    if (mode == 1) std::fill(fr.begin(), fr.end(), 0);
    return DownwardClosedRelation(m1, m2, fr);
}

inline Table random_nondecreasing(std::mt19937_64& rng, int m1, int m2) {
    Table f(m1);
    for (auto& v : f) v = uniform(rng, 1, m2);
    std::sort(f.begin(), f.end());
    return f;
}

inline std::vector<long long> random_sorted_values(std::mt19937_64& rng, int m, int range) {
    std::vector<long long> v(m);
    for (auto& x : v) x = uniform(rng, 0, range);
    std::sort(v.begin(), v.end());
    return v;
}

struct LeafFamily {
    PartitionTree tree;
    std::vector<Table> fns;
};

// Random partition tree of the given depth with a valid leaf family. Values are
// ranks of per-level keys (segment index within the parent segment, negated
// for dec nodes); weak families pass the ranks through a random nondecreasing
// map, which keeps every non-strict comparison.
inline LeafFamily random_leaf_family(std::mt19937_64& rng, int m, int depth, bool strict) {
    LeafFamily fam;
    auto& t = fam.tree;
    t.m = m;
    t.parent = {-1};
    t.partition = {SegmentPartition::whole(m)};
    t.type = {NodeType::Inc};
    std::vector<int> level{0};
    std::vector<int> frontier{0};
    for (int d = 1; d <= depth; ++d) {
        std::vector<int> next;
        for (int p : frontier) {
            int kids = uniform(rng, 1, 2);
            for (int c = 0; c < kids; ++c) {
                t.parent.push_back(p);
                t.partition.push_back(d == depth ? SegmentPartition::singletons(m)
                                                 : random_refinement(rng, t.partition[p]));
                t.type.push_back(rng() & 1 ? NodeType::Inc : NodeType::Dec);
                next.push_back(t.size() - 1);
            }
        }
        frontier = next;
    }
    // Non-leaf nodes must have coarser partitions; leaves are singletons.
    fam.fns.assign(t.size(), Table{});
    Table h = random_nondecreasing(rng, m, m);
    for (int v = 0; v < t.size(); ++v) {
        if (!t.is_leaf(v) || t.parent[v] < 0) continue;
        auto path = t.root_path(v);
        std::reverse(path.begin(), path.end());  // root first
        std::vector<std::pair<std::vector<int>, int>> keys;
        for (int x = 1; x <= m; ++x) {
            std::vector<int> key;
            for (std::size_t i = 1; i < path.size(); ++i) {
                const auto& P = t.partition[path[i]];
                const auto& Pp = t.partition[path[i - 1]];
                int idx = P.segment_of(x) - P.segment_of(Pp.begin(Pp.segment_of(x)));
                key.push_back(t.type[path[i]] == NodeType::Inc ? idx : -idx);
            }
            keys.push_back({key, x});
        }
        std::sort(keys.begin(), keys.end());
        Table f(m);
        for (int r = 0; r < m; ++r) f[keys[r].second - 1] = strict ? r + 1 : h[r];
        fam.fns[v] = f;
    }
    return fam;
}

// Random forest CSP with at most max_trees trees, max_nodes variables, domains
// up to max_domain and at most max_constraints constraints.
inline ForestCspInstance random_forest_csp(std::mt19937_64& rng, int max_trees, int max_nodes, int max_domain,
                                           int max_constraints) {
    ForestCspInstance inst;
    int trees = uniform(rng, 1, max_trees);
    int nodes = uniform(rng, trees, std::max(trees, max_nodes));
    std::vector<int> roots;
    for (int t = 0; t < trees; ++t) roots.push_back(inst.add_tree(uniform(rng, 1, max_domain)));
    for (int v = trees; v < nodes; ++v) {
        int parent = uniform(rng, 0, inst.num_variable_slots() - 1);
        int m = inst.domain(inst.tree(parent));
        inst.add_child(parent, random_reversion(rng, m));
    }
    int cons = uniform(rng, 0, max_constraints);
    for (int c = 0; c < cons; ++c) {
        int u = uniform(rng, 0, nodes - 1), v = uniform(rng, 0, nodes - 1);
        inst.add_constraint(u, v, random_relation(rng, inst.domain(inst.tree(u)), inst.domain(inst.tree(v))));
    }
    return inst;
}

}  // namespace testing_support
