#pragma once

// Segment reversions, downwards-closed relations and the constructions that
// turn monotone maps into reversion chains.
//
// All domains are {1..m}. Function tables are stored 0-based: f[a-1] = f(a).

#include <optional>
#include <string>
#include <vector>

namespace optdisc {

using Table = std::vector<int>;

struct SegmentPartition {
    int m = 0;
    std::vector<int> boundaries;  // 1 = a_1 < ... < a_r = m+1

    static SegmentPartition singletons(int m);
    static SegmentPartition whole(int m);
    static SegmentPartition from_boundaries(int m, std::vector<int> b);
    // Partition into maximal runs where key is constant.
    static SegmentPartition runs_of(const std::vector<int>& key);

    int segments() const { return static_cast<int>(boundaries.size()) - 1; }
    int begin(int i) const { return boundaries[i]; }
    int end(int i) const { return boundaries[i + 1] - 1; }  // inclusive
    int segment_of(int x) const;
    // Every segment of *this lies inside one segment of other.
    bool refines(const SegmentPartition& other) const;
    bool operator==(const SegmentPartition&) const = default;
};

class SegmentReversion {
public:
    SegmentReversion() = default;
    static SegmentReversion identity(int m);
    static SegmentReversion full(int m);
    static SegmentReversion from_boundaries(int m, std::vector<int> b);
    // Inverse of table(); nullopt if perm is not a segment reversion.
    static std::optional<SegmentReversion> from_permutation(const Table& perm);

    int m() const { return m_; }
    const std::vector<int>& boundaries() const { return part_.boundaries; }
    const SegmentPartition& partition() const { return part_; }
    int apply(int x) const;
    const Table& table() const { return table_; }
    bool is_identity() const { return part_.segments() == m_; }
    bool operator==(const SegmentReversion& o) const { return table_ == o.table_; }

private:
    explicit SegmentReversion(SegmentPartition p);
    int m_ = 0;
    SegmentPartition part_;
    Table table_;
};

SegmentReversion reversal_of_partition(const SegmentPartition& p);

class DownwardClosedRelation {
public:
    DownwardClosedRelation() = default;
    DownwardClosedRelation(int m1, int m2, std::vector<int> frontier);
    static DownwardClosedRelation full(int m1, int m2);

    int m1() const { return m1_; }
    int m2() const { return m2_; }
    const std::vector<int>& frontier() const { return frontier_; }
    int frontier_at(int a) const { return frontier_[a - 1]; }
    bool contains(int a, int b) const { return b >= 1 && b <= frontier_[a - 1]; }
    DownwardClosedRelation transpose() const;
    bool operator==(const DownwardClosedRelation&) const = default;

private:
    int m1_ = 0, m2_ = 0;
    std::vector<int> frontier_;
};

// Sequence of reversions. As a permutation it applies reversions[0] first;
// as a function representation it applies the last reversion first and the
// nondecreasing tail last.
struct SegmentRepresentation {
    std::vector<SegmentReversion> reversions;
    std::optional<Table> tail;

    int depth() const { return static_cast<int>(reversions.size()); }
    int apply_permutation(int x) const;
    int apply_function(int x) const;
};

// Drops identities and cancels adjacent equal reversions.
std::vector<SegmentReversion> simplify_chain(std::vector<SegmentReversion> chain);

bool is_nondecreasing(const Table& f);
bool is_strictly_increasing(const Table& f);

struct LessThanRelation {
    SegmentReversion g2;  // full reversal of side 2
    DownwardClosedRelation rel;
    bool holds(int a, int b) const { return rel.contains(a, g2.apply(b)); }
};

// Encodes values1[a] < values2[b] as (a, g(b)) in R. Tables must be
// nondecreasing.
LessThanRelation less_than_relation(const std::vector<long long>& values1,
                                    const std::vector<long long>& values2);

enum class ClauseKind { LeLe, LeGe, GeLe, GeGe };

struct ClauseRelation {
    SegmentReversion g1, g2;  // identity or full reversal
    DownwardClosedRelation rel;
    bool holds(int x1, int x2) const { return rel.contains(g1.apply(x1), g2.apply(x2)); }
    int depth() const { return (g1.is_identity() ? 0 : 1) + (g2.is_identity() ? 0 : 1); }
};

// Conjunction over clauses of (x1 op1 a_j) or (x2 op2 b_j). Thresholds for a
// "<=" side lie in [0, m], for a ">=" side in [1, m+1].
ClauseRelation clause_relation(ClauseKind kind, const std::vector<std::pair<int, int>>& clauses,
                               int m1, int m2);

struct SegSwapResult {
    Table f_prime;
    SegmentReversion g_prime;
};

// Returns f', g' with g(f(x)) = f'(g'(x)) and f' nondecreasing.
SegSwapResult seg_swap(const Table& f, const SegmentReversion& g);

DownwardClosedRelation dc_compose(const Table& f, const DownwardClosedRelation& r);

enum class NodeType { Inc, Dec };

struct PartitionTree {
    int m = 0;
    std::vector<int> parent;  // -1 for the root
    std::vector<SegmentPartition> partition;
    std::vector<NodeType> type;  // ignored at the root

    int size() const { return static_cast<int>(parent.size()); }
    int root() const;
    std::vector<int> children(int v) const;
    bool is_leaf(int v) const;
    // Root partition whole, leaves all-singletons, parents coarser.
    void validate() const;
    // Path from v up to the root, v first.
    std::vector<int> root_path(int v) const;
};

struct SegRepResult {
    std::vector<SegmentReversion> g;  // per node; identity at the root
    std::vector<Table> f_hat;         // per node; empty for non-leaves
    // Reversions in application order for leaf v: g_{v_1}, ..., g_{v_{b-1}}
    // (leaf first). Then f_v(x) = f_hat_v(chain applied to x).
    std::vector<SegmentReversion> chain(const PartitionTree& t, int leaf) const;
};

// strict: the family satisfies the strict ordering conditions and every
// f_hat is strictly increasing. Otherwise the weak conditions and
// nondecreasing f_hat.
SegRepResult make_seg_rep(const PartitionTree& t, const std::vector<Table>& leaf_fns,
                          bool strict = true);

// Throws InvalidLeafFamily with a description when the condition fails.
void check_leaf_family(const PartitionTree& t, const std::vector<Table>& leaf_fns, bool strict);

}  // namespace optdisc
