#include "optdisc/segrev.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

#include "optdisc/errors.hpp"

namespace optdisc {

// ---------------------------------------------------------------- partitions

SegmentPartition SegmentPartition::singletons(int m) {
    SegmentPartition p;
    p.m = m;
    for (int i = 1; i <= m + 1; ++i) p.boundaries.push_back(i);
    return p;
}

SegmentPartition SegmentPartition::whole(int m) {
    SegmentPartition p;
    p.m = m;
    p.boundaries = {1};
    if (m > 0) p.boundaries.push_back(m + 1);
    return p;
}

SegmentPartition SegmentPartition::from_boundaries(int m, std::vector<int> b) {
    if (m == 0 && (b.empty() || b == std::vector<int>{1})) return whole(0);
    if (b.size() < 2 || b.front() != 1 || b.back() != m + 1)
        throw std::invalid_argument("segment boundaries must run from 1 to m+1");
    for (std::size_t i = 1; i < b.size(); ++i)
        if (b[i] <= b[i - 1]) throw std::invalid_argument("segment boundaries must increase");
    SegmentPartition p;
    p.m = m;
    p.boundaries = std::move(b);
    return p;
}

SegmentPartition SegmentPartition::runs_of(const std::vector<int>& key) {
    SegmentPartition p;
    p.m = static_cast<int>(key.size());
    p.boundaries = {1};
    for (int i = 1; i < p.m; ++i)
        if (key[i] != key[i - 1]) p.boundaries.push_back(i + 1);
    if (p.m > 0) p.boundaries.push_back(p.m + 1);
    return p;
}

int SegmentPartition::segment_of(int x) const {
    if (x < 1 || x > m) throw OutOfDomain("segment_of: value outside domain");
    auto it = std::upper_bound(boundaries.begin(), boundaries.end(), x);
    return static_cast<int>(it - boundaries.begin()) - 1;
}

bool SegmentPartition::refines(const SegmentPartition& other) const {
    if (other.m != m) return false;
    // Every boundary of the coarser partition is a boundary here.
    return std::includes(boundaries.begin(), boundaries.end(), other.boundaries.begin(),
                         other.boundaries.end());
}

// ---------------------------------------------------------------- reversions

SegmentReversion::SegmentReversion(SegmentPartition p) : m_(p.m), part_(std::move(p)) {
    table_.resize(m_);
    for (int i = 0; i < part_.segments(); ++i) {
        int a = part_.begin(i), e = part_.end(i);
        for (int x = a; x <= e; ++x) table_[x - 1] = e - (x - a);
    }
}

SegmentReversion SegmentReversion::identity(int m) {
    return SegmentReversion(SegmentPartition::singletons(m));
}

SegmentReversion SegmentReversion::full(int m) { return SegmentReversion(SegmentPartition::whole(m)); }

SegmentReversion SegmentReversion::from_boundaries(int m, std::vector<int> b) {
    return SegmentReversion(SegmentPartition::from_boundaries(m, std::move(b)));
}

std::optional<SegmentReversion> SegmentReversion::from_permutation(const Table& perm) {
    const int m = static_cast<int>(perm.size());
    std::vector<int> b{1};
    int s = 1;
    while (s <= m) {
        int e = perm[s - 1];
        if (e < s || e > m) return std::nullopt;
        b.push_back(e + 1);
        s = e + 1;
    }
    if (m == 0) b = {1};
    auto cand = SegmentReversion(SegmentPartition::from_boundaries(m, b));
    if (cand.table() != perm) return std::nullopt;
    return cand;
}

int SegmentReversion::apply(int x) const {
    if (x < 1 || x > m_) throw OutOfDomain("apply: value outside domain");
    return table_[x - 1];
}

SegmentReversion reversal_of_partition(const SegmentPartition& p) {
    return SegmentReversion::from_boundaries(p.m, p.boundaries);
}

std::vector<SegmentReversion> simplify_chain(std::vector<SegmentReversion> chain) {
    std::vector<SegmentReversion> out;
    for (auto& g : chain) {
        if (g.is_identity()) continue;
        if (!out.empty() && out.back() == g) {
            out.pop_back();
            continue;
        }
        out.push_back(std::move(g));
    }
    return out;
}

// ---------------------------------------------------------------- relations

DownwardClosedRelation::DownwardClosedRelation(int m1, int m2, std::vector<int> frontier)
    : m1_(m1), m2_(m2), frontier_(std::move(frontier)) {
    if (static_cast<int>(frontier_.size()) != m1_)
        throw std::invalid_argument("frontier length must equal m1");
    for (int a = 0; a < m1_; ++a) {
        if (frontier_[a] < 0 || frontier_[a] > m2_)
            throw OutOfDomain("frontier value outside 0..m2");
        if (a > 0 && frontier_[a] > frontier_[a - 1]) throw NotMonotone("frontier must be nonincreasing");
    }
}

DownwardClosedRelation DownwardClosedRelation::full(int m1, int m2) {
    return DownwardClosedRelation(m1, m2, std::vector<int>(m1, m2));
}

DownwardClosedRelation DownwardClosedRelation::transpose() const {
    std::vector<int> t(m2_, 0);
    for (int b = 1; b <= m2_; ++b) {
        int cnt = 0;
        while (cnt < m1_ && frontier_[cnt] >= b) ++cnt;
        t[b - 1] = cnt;
    }
    return DownwardClosedRelation(m2_, m1_, std::move(t));
}

int SegmentRepresentation::apply_permutation(int x) const {
    for (const auto& g : reversions) x = g.apply(x);
    return x;
}

int SegmentRepresentation::apply_function(int x) const {
    for (auto it = reversions.rbegin(); it != reversions.rend(); ++it) x = it->apply(x);
    return tail ? (*tail)[x - 1] : x;
}

bool is_nondecreasing(const Table& f) { return std::is_sorted(f.begin(), f.end()); }

bool is_strictly_increasing(const Table& f) {
    for (std::size_t i = 1; i < f.size(); ++i)
        if (f[i] <= f[i - 1]) return false;
    return true;
}

LessThanRelation less_than_relation(const std::vector<long long>& values1,
                                    const std::vector<long long>& values2) {
    if (!std::is_sorted(values1.begin(), values1.end()) ||
        !std::is_sorted(values2.begin(), values2.end()))
        throw NotMonotone("less_than_relation: value tables must be sorted");
    const int m1 = static_cast<int>(values1.size()), m2 = static_cast<int>(values2.size());
    std::vector<int> fr(m1);
    for (int a = 0; a < m1; ++a) {
        auto it = std::upper_bound(values2.begin(), values2.end(), values1[a]);
        fr[a] = static_cast<int>(values2.end() - it);
    }
    return {SegmentReversion::full(m2), DownwardClosedRelation(m1, m2, std::move(fr))};
}

ClauseRelation clause_relation(ClauseKind kind, const std::vector<std::pair<int, int>>& clauses,
                               int m1, int m2) {
    const bool rev1 = kind == ClauseKind::GeLe || kind == ClauseKind::GeGe;
    const bool rev2 = kind == ClauseKind::LeGe || kind == ClauseKind::GeGe;
    std::vector<int> fr(m1, m2);
    for (auto [a, b] : clauses) {
        if (rev1 ? (a < 1 || a > m1 + 1) : (a < 0 || a > m1))
            throw OutOfDomain("clause threshold a outside domain");
        if (rev2 ? (b < 1 || b > m2 + 1) : (b < 0 || b > m2))
            throw OutOfDomain("clause threshold b outside domain");
        // After reversal x >= a becomes x' <= m+1-a.
        int aa = rev1 ? m1 + 1 - a : a;
        int bb = rev2 ? m2 + 1 - b : b;
        for (int x = aa + 1; x <= m1; ++x) fr[x - 1] = std::min(fr[x - 1], bb);
    }
    ClauseRelation out{rev1 ? SegmentReversion::full(m1) : SegmentReversion::identity(m1),
                       rev2 ? SegmentReversion::full(m2) : SegmentReversion::identity(m2),
                       DownwardClosedRelation(m1, m2, std::move(fr))};
    return out;
}

// ---------------------------------------------------------------- swap and composition

SegSwapResult seg_swap(const Table& f, const SegmentReversion& g) {
    if (!is_nondecreasing(f)) throw NotMonotone("seg_swap: f must be nondecreasing");
    const int m1 = static_cast<int>(f.size());
    const int m2 = g.m();
    for (int v : f)
        if (v < 1 || v > m2) throw OutOfDomain("seg_swap: f maps outside the domain of g");
    const auto& P = g.partition();
    std::vector<int> b{1};
    for (int i = 0; i < P.segments(); ++i) {
        int ai = P.begin(i), bi = P.end(i);
        int c = static_cast<int>(std::lower_bound(f.begin(), f.end(), ai) - f.begin()) + 1;
        int d = static_cast<int>(std::upper_bound(f.begin(), f.end(), bi) - f.begin());
        if (c > d) continue;
        // A singleton segment of g maps [c, d] to one value; no reversal needed.
        if (ai == bi)
            for (int x = c + 1; x <= d; ++x) b.push_back(x);
        b.push_back(d + 1);
    }
    if (m1 == 0) b = {1};
    SegSwapResult r{Table(m1), SegmentReversion::from_boundaries(m1, b)};
    for (int x = 1; x <= m1; ++x) r.f_prime[r.g_prime.apply(x) - 1] = g.apply(f[x - 1]);
    assert(is_nondecreasing(r.f_prime));
    return r;
}

DownwardClosedRelation dc_compose(const Table& f, const DownwardClosedRelation& r) {
    if (!is_nondecreasing(f)) throw NotMonotone("dc_compose: f must be nondecreasing");
    std::vector<int> fr(f.size());
    for (std::size_t x = 0; x < f.size(); ++x) {
        if (f[x] < 1 || f[x] > r.m1()) throw OutOfDomain("dc_compose: f maps outside the relation");
        fr[x] = r.frontier_at(f[x]);
    }
    return DownwardClosedRelation(static_cast<int>(f.size()), r.m2(), std::move(fr));
}

// ---------------------------------------------------------------- partition trees

int PartitionTree::root() const {
    int r = -1;
    for (int v = 0; v < size(); ++v)
        if (parent[v] < 0) {
            if (r >= 0) throw std::invalid_argument("partition tree has two roots");
            r = v;
        }
    if (r < 0) throw std::invalid_argument("partition tree has no root");
    return r;
}

std::vector<int> PartitionTree::children(int v) const {
    std::vector<int> c;
    for (int w = 0; w < size(); ++w)
        if (parent[w] == v) c.push_back(w);
    return c;
}

bool PartitionTree::is_leaf(int v) const { return children(v).empty(); }

std::vector<int> PartitionTree::root_path(int v) const {
    std::vector<int> path{v};
    while (parent[path.back()] >= 0) {
        path.push_back(parent[path.back()]);
        if (static_cast<int>(path.size()) > size()) throw std::invalid_argument("partition tree has a cycle");
    }
    return path;
}

void PartitionTree::validate() const {
    if (static_cast<int>(partition.size()) != size() || static_cast<int>(type.size()) != size())
        throw std::invalid_argument("partition tree arrays disagree in size");
    int r = root();
    if (partition[r].segments() != (m > 0 ? 1 : 0)) throw std::invalid_argument("root partition must be one segment");
    for (int v = 0; v < size(); ++v) {
        if (partition[v].m != m) throw std::invalid_argument("partition over wrong domain");
        root_path(v);
        if (parent[v] >= 0 && !partition[v].refines(partition[parent[v]]))
            throw std::invalid_argument("child partition must refine its parent");
        if (is_leaf(v) && v != r && partition[v].segments() != m)
            throw std::invalid_argument("leaf partition must be all singletons");
    }
}

void check_leaf_family(const PartitionTree& t, const std::vector<Table>& leaf_fns, bool strict) {
    t.validate();
    for (int v = 0; v < t.size(); ++v) {
        if (!t.is_leaf(v) || t.parent[v] < 0) continue;
        const Table& f = leaf_fns.at(v);
        if (static_cast<int>(f.size()) != t.m) throw InvalidLeafFamily("leaf function has wrong length");
        for (int w : t.root_path(v)) {
            int pw = t.parent[w];
            if (pw < 0) break;
            const auto& Pw = t.partition[w];
            const auto& Pp = t.partition[pw];
            for (int q = 0; q < Pp.segments(); ++q) {
                // Segments of P_w inside segment q of the parent, in order.
                int s = Pw.segment_of(Pp.begin(q));
                int last = Pw.segment_of(Pp.end(q));
                for (; s < last; ++s) {
                    auto lo = f.begin() + (Pw.begin(s) - 1), hi = f.begin() + Pw.end(s);
                    auto lo2 = f.begin() + (Pw.begin(s + 1) - 1), hi2 = f.begin() + Pw.end(s + 1);
                    bool ok;
                    if (t.type[w] == NodeType::Inc) {
                        int a = *std::max_element(lo, hi), b = *std::min_element(lo2, hi2);
                        ok = strict ? a < b : a <= b;
                    } else {
                        int a = *std::min_element(lo, hi), b = *std::max_element(lo2, hi2);
                        ok = strict ? a > b : a >= b;
                    }
                    if (!ok) {
                        std::ostringstream os;
                        os << "leaf " << v << " violates the ordering at node " << w << " between segments "
                           << s << " and " << s + 1;
                        throw InvalidLeafFamily(os.str());
                    }
                }
            }
        }
    }
}

std::vector<SegmentReversion> SegRepResult::chain(const PartitionTree& t, int leaf) const {
    std::vector<SegmentReversion> c;
    for (int w : t.root_path(leaf))
        if (t.parent[w] >= 0) c.push_back(g[w]);
    return c;
}

SegRepResult make_seg_rep(const PartitionTree& t, const std::vector<Table>& leaf_fns, bool strict) {
    check_leaf_family(t, leaf_fns, strict);
    const int root = t.root();
    SegRepResult res;
    res.g.assign(t.size(), SegmentReversion::identity(t.m));
    res.f_hat.assign(t.size(), Table{});
    for (int w = 0; w < t.size(); ++w) {
        int p = t.parent[w];
        if (p < 0) continue;
        bool pivotal = (p == root) ? t.type[w] == NodeType::Dec : t.type[w] != t.type[p];
        if (pivotal) res.g[w] = reversal_of_partition(t.partition[p]);
    }
    for (int v = 0; v < t.size(); ++v) {
        if (!t.is_leaf(v) || v == root) continue;
        auto path = t.root_path(v);  // v_1 = v, ..., v_b = root
        Table fh(t.m);
        for (int x = 1; x <= t.m; ++x) {
            // Apply g_{v_{b-1}} first, g_{v_1} last.
            int y = x;
            for (int i = static_cast<int>(path.size()) - 2; i >= 0; --i) y = res.g[path[i]].apply(y);
            fh[x - 1] = leaf_fns[v][y - 1];
        }
        if (strict ? !is_strictly_increasing(fh) : !is_nondecreasing(fh))
            throw std::logic_error("make_seg_rep produced a non-monotone tail");
        res.f_hat[v] = std::move(fh);
    }
    return res;
}

}  // namespace optdisc
