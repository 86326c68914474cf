// Situations, alternation, canonical views, blocks, epochs and the
// alternating-lines gadget.

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "optdisc/errors.hpp"
#include "optdisc/reduction.hpp"

namespace optdisc {

namespace {

int cls_of(const Instance& inst, std::size_t i) { return i < inst.w1.size() ? 1 : 2; }

// The apx gap on the inside of line p: the gap containing p for opt lines,
// the adjacent gap for the two sentinels.
int inner_gap(const std::vector<Line>& L, int p) {
    int g = -1;
    for (int i = 0; i <= p && i < static_cast<int>(L.size()) - 1; ++i)
        if (L[i].apx) ++g;
    return g;
}

ApxPair apx_of(const LineSystem& ls) {
    ApxPair a;
    for (const auto& l : ls.x)
        if (l.apx) a.xs.push_back(l.coord);
    for (const auto& l : ls.y)
        if (l.apx) a.ys.push_back(l.coord);
    return a;
}

int cell_type(const CellTypeMap& d, int axis, int along, int across) {
    return axis == 0 ? d.at(along, across) : d.at(across, along);
}

int cell_id(const LineSystem& ls, int axis, int along, int across) {
    return axis == 0 ? ls.cell_id(along, across) : ls.cell_id(across, along);
}

struct Keyed {
    long long y, x;
    int cls;
};

// Class ties at equal y are adjacent after sorting by (y, x).
PointsAlternation reduce_sorted(const std::vector<Keyed>& pts) {
    PointsAlternation r;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0 && pts[i].y == pts[i - 1].y && pts[i].cls != pts[i - 1].cls) r.infinite = true;
        if (r.reduced.empty() || r.reduced.back() != pts[i].cls) r.reduced.push_back(pts[i].cls);
    }
    return r;
}

std::vector<int> alternating(int r) {
    std::vector<int> t;
    for (int i = 0; i < r; ++i) {
        t.push_back(1);
        t.push_back(2);
    }
    return t;
}

bool right_of(const ViewPoint& a, const ViewPoint& b) { return a.x > b.x || (a.x == b.x && a.y > b.y); }

PointsAlternation view_alternation(const SituationView& v, long long x1, long long x2) {
    std::vector<Keyed> sel;
    for (const auto& p : v.pts)
        if (x1 < p.x && p.x < x2) sel.push_back({p.y, p.x, p.cls});
    return reduce_sorted(sel);
}

// Runs of class cls in the strip between x1 and x2, bottom to top.
std::vector<std::vector<int>> runs_of_class(const SituationView& v, long long x1, long long x2, int cls) {
    std::vector<std::vector<int>> out;
    int prev = 0;
    for (int i = 0; i < static_cast<int>(v.pts.size()); ++i) {
        const auto& p = v.pts[i];
        if (!(x1 < p.x && p.x < x2)) continue;
        if (p.cls == cls) {
            if (prev != cls) out.emplace_back();
            out.back().push_back(i);
        }
        prev = p.cls;
    }
    return out;
}

std::vector<int> order_desc(const SituationView& v, const std::vector<int>& leaders) {
    std::vector<int> pi(leaders.size());
    std::iota(pi.begin(), pi.end(), 0);
    std::sort(pi.begin(), pi.end(),
              [&](int a, int b) { return right_of(v.pts[leaders[a]], v.pts[leaders[b]]); });
    return pi;
}

ViewLine make_line(const std::vector<Line>& L, int idx, const std::vector<int>& var_of, bool neg) {
    ViewLine vl;
    vl.line = idx;
    vl.reversed = neg;
    if (L[idx].apx) {
        vl.values = {neg ? -L[idx].coord : L[idx].coord};
    } else {
        vl.var = var_of[idx];
        for (long long c : L[idx].domain) vl.values.push_back(neg ? -c : c);
        std::sort(vl.values.begin(), vl.values.end());
    }
    return vl;
}

[[noreturn]] void violation(const std::string& what) { throw StructureViolation(what); }

}  // namespace

// ------------------------------------------------------------ situations

PointsAlternation alternation_of_points(const Instance& inst, int axis, long long a1, long long a2, long long c1,
                                        long long c2) {
    auto all = inst.all();
    std::vector<Keyed> sel;
    for (std::size_t i = 0; i < all.size(); ++i) {
        long long along = axis == 0 ? all[i].x : all[i].y, across = axis == 0 ? all[i].y : all[i].x;
        if (a1 < along && along < a2 && c1 < across && across < c2) sel.push_back({across, along, cls_of(inst, i)});
    }
    std::sort(sel.begin(), sel.end(), [](const Keyed& a, const Keyed& b) { return std::tie(a.y, a.x) < std::tie(b.y, b.x); });
    return reduce_sorted(sel);
}

bool is_subsequence(const std::vector<int>& small, const std::vector<int>& big) {
    std::size_t j = 0;
    for (int v : big)
        if (j < small.size() && small[j] == v) ++j;
    return j == small.size();
}

SituationList situation_list(const LineSystem& ls, const CellTypeMap& delta, const Instance& inst) {
    SituationList out;
    const auto classes = apx_classes(inst, apx_of(ls));
    for (int axis = 0; axis < 2; ++axis) {
        const auto& L = ls.axis(axis);
        const auto& O = ls.axis(1 - axis);
        const int last = static_cast<int>(L.size()) - 1;
        std::vector<int> P{0};
        for (int i = 1; i < last; ++i)
            if (!L[i].apx) P.push_back(i);
        P.push_back(last);
        std::vector<int> A;
        for (int j = 0; j < static_cast<int>(O.size()); ++j)
            if (O[j].apx) A.push_back(j);
        for (std::size_t t = 0; t + 1 < P.size(); ++t) {
            const int p1 = P[t], p2 = P[t + 1];
            if (p1 == 0 && p2 == last) continue;
            bool between = false;
            for (int q = p1 + 1; q < p2; ++q) between = between || L[q].apx;
            if (!between) continue;
            for (std::size_t u = 0; u + 1 < A.size(); ++u) {
                Situation s;
                s.axis = axis, s.p1 = p1, s.p2 = p2, s.l1 = A[u], s.l2 = A[u + 1];
                for (int l = s.l1; l < s.l2; ++l) {
                    int ty = 0;
                    for (int c = p1; c < p2; ++c) {
                        int v = cell_type(delta, axis, c, l);
                        if (v == 0) continue;
                        if (ty != 0 && ty != v) {
                            out.rejected = true;
                            out.reason = "area with both classes";
                            return out;
                        }
                        ty = v;
                    }
                    s.lprime.push_back(l);
                    s.seq.push_back(ty);
                    if (ty != 0 && (s.reduced.empty() || s.reduced.back() != ty)) {
                        s.reduced.push_back(ty);
                        s.alt_lines.push_back(l);
                    }
                }
                const int a = s.alternation();
                if (a >= 3 && a % 2 == 1) {
                    out.rejected = true;
                    out.reason = "odd alternation";
                    return out;
                }
                if (a >= 4) {
                    const int g1 = inner_gap(L, p1), g2 = inner_gap(L, p2), h = static_cast<int>(u);
                    const int c1 = axis == 0 ? classes[g1][h] : classes[h][g1];
                    const int c2 = axis == 0 ? classes[g2][h] : classes[h][g2];
                    if (c1 == 0 || c2 == 0 || c1 == c2) {
                        out.rejected = true;
                        out.reason = "end cells of a high-alternation situation";
                        return out;
                    }
                }
                out.items.push_back(std::move(s));
            }
        }
    }
    return out;
}

FitProfile fit_profile(const Instance& inst, const LineSystem& ls, const Situation& s,
                       const std::vector<long long>& v1, const std::vector<long long>& v2) {
    const auto& O = ls.axis(1 - s.axis);
    const long long c1 = O[s.l1].coord, c2 = O[s.l2].coord;
    auto all = inst.all();
    std::vector<Keyed> strip;
    for (std::size_t i = 0; i < all.size(); ++i) {
        long long along = s.axis == 0 ? all[i].x : all[i].y, across = s.axis == 0 ? all[i].y : all[i].x;
        if (c1 < across && across < c2) strip.push_back({across, along, cls_of(inst, i)});
    }
    std::sort(strip.begin(), strip.end(),
              [](const Keyed& a, const Keyed& b) { return std::tie(a.y, a.x) < std::tie(b.y, b.x); });
    FitProfile fp;
    fp.v1 = v1, fp.v2 = v2;
    fp.fit.assign(v1.size(), std::vector<char>(v2.size(), 0));
    fp.too_small = fp.fit;
    std::vector<Keyed> sel;
    for (std::size_t a = 0; a < v1.size(); ++a)
        for (std::size_t b = 0; b < v2.size(); ++b) {
            sel.clear();
            for (const auto& p : strip)
                if (v1[a] < p.x && p.x < v2[b]) sel.push_back(p);
            auto r = reduce_sorted(sel);
            bool fits = !r.infinite && r.reduced == s.reduced;
            fp.fit[a][b] = fits;
            fp.too_small[a][b] = !fits && !r.infinite && is_subsequence(r.reduced, s.reduced);
        }
    return fp;
}

std::vector<ClauseRelation> alternation_constraint(const FitProfile& fp) {
    const int m1 = static_cast<int>(fp.v1.size()), m2 = static_cast<int>(fp.v2.size());
    std::vector<std::pair<int, int>> small, large;
    for (int a = 0; a < m1; ++a)
        for (int b = 0; b < m2; ++b) {
            if (fp.fit[a][b]) continue;
            if (fp.too_small[a][b])
                small.push_back({a, b + 2});  // idx1 <= a or idx2 >= b+2
            else
                large.push_back({a + 2, b});  // idx1 >= a+2 or idx2 <= b
        }
    std::vector<ClauseRelation> out{clause_relation(ClauseKind::LeGe, small, m1, m2),
                                    clause_relation(ClauseKind::GeLe, large, m1, m2)};
    for (int a = 1; a <= m1; ++a)
        for (int b = 1; b <= m2; ++b)
            if ((out[0].holds(a, b) && out[1].holds(a, b)) != static_cast<bool>(fp.fit[a - 1][b - 1]))
                throw std::logic_error("alternation constraint differs from the fit relation");
    return out;
}

// ------------------------------------------------------------ views

ViewTransform canonical_transform(const LineSystem& ls, const CellTypeMap& delta, const Instance& inst,
                                  const Situation& s) {
    (void)delta;
    ViewTransform t;
    t.transpose = s.axis == 1;
    t.mirror = s.p1 == 0;
    const auto& L = ls.axis(s.axis);
    const auto& O = ls.axis(1 - s.axis);
    const auto classes = apx_classes(inst, apx_of(ls));
    const int g = inner_gap(L, t.mirror ? s.p2 : s.p1);
    int h = -1;
    for (int j = 0; j <= s.l1; ++j)
        if (O[j].apx) ++h;
    const int c = s.axis == 0 ? classes[g][h] : classes[h][g];
    t.swap = c != 1;
    int first = s.reduced.empty() ? 1 : s.reduced.front();
    if (t.swap) first = 3 - first;
    t.reflect = first != 1;
    return t;
}

SituationView make_view(const Instance& inst, const LineSystem& ls, const CellTypeMap& delta, const Situation& s,
                        const std::vector<int>& var_of_x, const std::vector<int>& var_of_y, bool rotated) {
    ViewTransform t = canonical_transform(ls, delta, inst, s);
    if (rotated) {
        t.mirror = !t.mirror;
        t.reflect = !t.reflect;
        t.swap = !t.swap;
    }
    const auto& L = ls.axis(s.axis);
    const auto& O = ls.axis(1 - s.axis);
    const auto& varL = s.axis == 0 ? var_of_x : var_of_y;
    const auto& varO = s.axis == 0 ? var_of_y : var_of_x;
    SituationView v;
    const long long c1 = O[s.l1].coord, c2 = O[s.l2].coord;
    auto all = inst.all();
    for (std::size_t i = 0; i < all.size(); ++i) {
        long long along = s.axis == 0 ? all[i].x : all[i].y, across = s.axis == 0 ? all[i].y : all[i].x;
        if (!(c1 < across && across < c2)) continue;
        int c = cls_of(inst, i);
        v.pts.push_back({t.mirror ? -along : along, t.reflect ? -across : across, t.swap ? 3 - c : c,
                         static_cast<int>(i)});
    }
    std::sort(v.pts.begin(), v.pts.end(),
              [](const ViewPoint& a, const ViewPoint& b) { return std::tie(a.y, a.x) < std::tie(b.y, b.x); });
    v.p1 = make_line(L, t.mirror ? s.p2 : s.p1, varL, t.mirror);
    v.p2 = make_line(L, t.mirror ? s.p1 : s.p2, varL, t.mirror);
    v.y_lo = t.reflect ? -c2 : c1;
    v.y_hi = t.reflect ? -c1 : c2;

    const int n = s.l2 - s.l1;
    std::vector<int> reduced, lines;
    for (int tv = 0; tv < n; ++tv) {
        const int to = t.reflect ? n - 1 - tv : tv;
        const int lower = t.reflect ? s.l1 + to + 1 : s.l1 + to;
        int ty = s.seq[to];
        if (ty != 0 && t.swap) ty = 3 - ty;
        if (ty != 0 && (reduced.empty() || reduced.back() != ty)) {
            reduced.push_back(ty);
            lines.push_back(lower);
        }
    }
    lines.push_back(t.reflect ? s.l1 : s.l2);
    v.r = static_cast<int>(reduced.size()) / 2;
    v.target = alternating(v.r);
    if (reduced != v.target) throw std::logic_error("situation view is not canonical");
    for (int l : lines) v.lambda.push_back(make_line(O, l, varO, t.reflect));

    const int red = t.swap ? 2 : 1;
    for (int i = 0; i < v.r; ++i) {
        const int lo = std::min(v.lambda[2 * i].line, v.lambda[2 * i + 1].line);
        const int hi = std::max(v.lambda[2 * i].line, v.lambda[2 * i + 1].line);
        std::vector<int> cells;
        for (int c = s.p1; c < s.p2; ++c)
            for (int row = lo; row < hi; ++row)
                if (cell_type(delta, s.axis, c, row) == red) cells.push_back(cell_id(ls, s.axis, c, row));
        v.band_cells.push_back(cells);
    }
    return v;
}

bool fits_view(const SituationView& v, long long x1, long long x2) {
    auto r = view_alternation(v, x1, x2);
    return !r.infinite && r.reduced == v.target;
}

std::optional<BlockView> blocks_and_leaders(const SituationView& v, int a, const std::vector<char>& alive1,
                                            const std::vector<char>& alive2) {
    if (!alive1[a]) return std::nullopt;
    const long long x1 = v.p1.values[a];
    BlockView bv;
    for (int b = 0; b < static_cast<int>(v.p2.values.size()); ++b)
        if (alive2[b] && fits_view(v, x1, v.p2.values[b])) {
            bv.partner = b;
            break;
        }
    if (bv.partner < 0) return std::nullopt;
    bv.blocks = runs_of_class(v, x1, v.p2.values[bv.partner], 1);
    for (const auto& blk : bv.blocks) {
        int best = blk.front();
        for (int i : blk)
            if (right_of(v.pts[i], v.pts[best])) best = i;
        bv.leaders.push_back(best);
    }
    return bv;
}

std::vector<SituationGuess> situation_guesses(const SituationView& red, const SituationView& blue) {
    const int r = red.r;
    std::vector<int> perm(r);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::vector<int>> perms;
    do perms.push_back(perm);
    while (std::next_permutation(perm.begin(), perm.end()));
    auto tuples = [&](const std::vector<std::vector<int>>& bands) {
        std::vector<std::vector<int>> out{{}};
        for (const auto& band : bands) {
            std::vector<std::vector<int>> next;
            for (const auto& pre : out)
                for (int c : band) {
                    auto t = pre;
                    t.push_back(c);
                    next.push_back(t);
                }
            out = next;
        }
        return out;
    };
    // Blue block i of the red view is block r-1-i of the rotated view.
    std::vector<std::vector<int>> blue_bands(blue.band_cells.rbegin(), blue.band_cells.rend());
    auto reds = tuples(red.band_cells), blues = tuples(blue_bands);
    std::vector<SituationGuess> out;
    for (const auto& p1 : perms)
        for (const auto& c1 : reds)
            for (const auto& p2 : perms)
                for (const auto& c2 : blues) out.push_back({p1, p2, c1, c2});
    return out;
}

std::vector<char> extremal_order_filter(const SituationView& v, const std::vector<char>& alive1,
                                        const std::vector<char>& alive2, const std::vector<int>& pi,
                                        const std::vector<int>& cells, const std::vector<int>& cell_of_point) {
    std::vector<char> keep(alive1.size(), 0);
    for (int a = 0; a < static_cast<int>(alive1.size()); ++a) {
        auto bv = blocks_and_leaders(v, a, alive1, alive2);
        if (!bv || static_cast<int>(bv->leaders.size()) != v.r) continue;
        bool ok = order_desc(v, bv->leaders) == pi;
        for (int i = 0; ok && i < v.r; ++i) ok = cell_of_point[v.pts[bv->leaders[i]].id] == cells[i];
        keep[a] = ok;
    }
    return keep;
}

// ------------------------------------------------------------ block tree and epochs

BlockTree build_block_tree(const std::vector<int>& pi1, const std::vector<int>& pi2) {
    const int r = static_cast<int>(pi1.size());
    std::vector<int> rank1(r), rank2(r);
    for (int t = 0; t < r; ++t) rank1[pi1[t]] = t, rank2[pi2[t]] = t;
    BlockTree T;
    T.root = pi1[0];
    T.parent.assign(r, -1);
    for (int i = 0; i < r; ++i) {
        if (i == T.root) continue;
        int i1 = -1, i2 = -1;
        for (int j = i - 1; j >= 0 && i1 < 0; --j)
            if (rank1[j] < rank1[i]) i1 = j;
        for (int j = i + 1; j < r && i2 < 0; ++j)
            if (rank1[j] < rank1[i]) i2 = j;
        if (i1 < 0 || i2 < 0) {
            T.parent[i] = i1 >= 0 ? i1 : i2;
            continue;
        }
        int left1 = r, left2 = r;
        for (int j = i1; j < i; ++j) left1 = std::min(left1, rank2[j]);
        for (int j = i; j < i2; ++j) left2 = std::min(left2, rank2[j]);
        if (left1 == left2) throw std::logic_error("block tree tie");
        T.parent[i] = left1 > left2 ? i1 : i2;
    }
    return T;
}

EpochStructure epoch_structure(const SituationView& v, const std::vector<char>& alive1,
                               const std::vector<char>& alive2) {
    EpochStructure es;
    const int r = v.r;
    std::vector<BlockView> views;
    for (int a = 0; a < static_cast<int>(alive1.size()); ++a) {
        if (!alive1[a]) continue;
        auto bv = blocks_and_leaders(v, a, alive1, alive2);
        if (!bv) violation("p1 value without a fitting partner");
        if (static_cast<int>(bv->blocks.size()) != r) violation("wrong number of red blocks");
        es.x1.push_back(v.p1.values[a]);
        views.push_back(*bv);
    }
    es.m = static_cast<int>(views.size());
    if (es.m == 0) violation("empty domain");
    es.pi1 = order_desc(v, views[0].leaders);
    for (const auto& bv : views)
        if (order_desc(v, bv.leaders) != es.pi1) violation("red leader order not constant");

    // Blue leaders, keyed by p2 values, taken at the last fitting p1 value.
    bool have_pi2 = false;
    for (int b = 0; b < static_cast<int>(alive2.size()); ++b) {
        if (!alive2[b]) continue;
        const long long x2 = v.p2.values[b];
        int partner = -1;
        for (int a = static_cast<int>(alive1.size()) - 1; a >= 0 && partner < 0; --a)
            if (alive1[a] && fits_view(v, v.p1.values[a], x2)) partner = a;
        if (partner < 0) violation("p2 value without a fitting partner");
        auto blue = runs_of_class(v, v.p1.values[partner], x2, 2);
        if (static_cast<int>(blue.size()) != r) violation("wrong number of blue blocks");
        std::vector<int> leaders;
        for (const auto& blk : blue) {
            int best = blk.front();
            for (int i : blk)
                if (right_of(v.pts[best], v.pts[i])) best = i;
            leaders.push_back(best);
        }
        auto desc = order_desc(v, leaders);
        std::vector<int> asc(desc.rbegin(), desc.rend());
        if (have_pi2 && asc != es.pi2) violation("blue leader order not constant");
        es.pi2 = asc;
        have_pi2 = true;
    }
    if (!have_pi2) violation("empty p2 domain");
    es.tree = build_block_tree(es.pi1, es.pi2);

    es.top.assign(r, Table(es.m));
    es.bottom.assign(r, Table(es.m));
    std::map<int, int> role;  // point -> block it leads
    for (int j = 0; j < r; ++j) {
        std::vector<int> key(es.m);
        for (int a = 0; a < es.m; ++a) {
            const auto& blk = views[a].blocks[j];
            key[a] = views[a].leaders[j];
            long long hi = v.pts[blk.front()].y, lo = hi;
            for (int i : blk) hi = std::max(hi, v.pts[i].y), lo = std::min(lo, v.pts[i].y);
            es.top[j][a] = static_cast<int>(hi);
            es.bottom[j][a] = static_cast<int>(lo);
            auto [it, fresh] = role.insert({key[a], j});
            if (!fresh && it->second != j) violation("point leads two blocks");
        }
        es.epochs.push_back(SegmentPartition::runs_of(key));
    }
    if (es.epochs[es.tree.root].segments() != 1) violation("root block has several epochs");
    for (int j = 0; j < r; ++j)
        if (j != es.tree.root && !es.epochs[j].refines(es.epochs[es.tree.parent[j]]))
            violation("epochs do not refine the parent's");

    // Blocks at larger p1 values nest into blocks at smaller ones.
    for (int a = 0; a + 1 < es.m; ++a) {
        std::map<int, int> block_of;
        for (int j = 0; j < r; ++j)
            for (int i : views[a].blocks[j]) block_of[i] = j;
        for (int j = 0; j < r; ++j) {
            int host = -1;
            for (int i : views[a + 1].blocks[j]) {
                auto it = block_of.find(i);
                if (it == block_of.end() || (host >= 0 && it->second != host)) violation("blocks do not nest");
                host = it->second;
            }
        }
    }

    // Epoch extents within a parent epoch are disjoint and monotone.
    std::vector<std::vector<int>> kids(r);
    for (int j = 0; j < r; ++j)
        if (j != es.tree.root) kids[es.tree.parent[j]].push_back(j);
    std::vector<std::vector<int>> subtree(r);
    std::function<void(int, std::vector<int>&)> collect = [&](int j, std::vector<int>& acc) {
        acc.push_back(j);
        for (int c : kids[j]) collect(c, acc);
    };
    for (int j = 0; j < r; ++j) collect(j, subtree[j]);
    for (int j = 0; j < r; ++j) {
        if (j == es.tree.root) continue;
        const int q = es.tree.parent[j];
        const bool inc = j < q;
        const auto& P = es.epochs[q];
        const auto& E = es.epochs[j];
        for (int s = 0; s < P.segments(); ++s) {
            long long prev_lo = 0, prev_hi = 0;
            bool first = true;
            for (int e = 0; e < E.segments(); ++e) {
                if (E.begin(e) < P.begin(s) || E.end(e) > P.end(s)) continue;
                long long lo = LLONG_MAX, hi = LLONG_MIN;
                for (int a = E.begin(e); a <= E.end(e); ++a)
                    for (int d : subtree[j]) {
                        lo = std::min<long long>(lo, es.bottom[d][a - 1]);
                        hi = std::max<long long>(hi, es.top[d][a - 1]);
                    }
                if (!first && (inc ? !(prev_hi < lo) : !(hi < prev_lo))) violation("epoch extents not monotone");
                prev_lo = lo, prev_hi = hi, first = false;
            }
        }
    }
    return es;
}

// ------------------------------------------------------------ gadget

Gadget alternating_lines_gadget(const EpochStructure& es) {
    const int r = static_cast<int>(es.epochs.size());
    const int m = es.m;
    PartitionTree t;
    t.m = m;
    t.parent.assign(3 * r, -1);
    t.partition.resize(3 * r);
    t.type.assign(3 * r, NodeType::Inc);
    std::vector<Table> fns(3 * r);
    for (int j = 0; j < r; ++j) {
        t.parent[j] = es.tree.parent[j];
        t.partition[j] = j == es.tree.root ? SegmentPartition::whole(m) : es.epochs[j];
        if (j != es.tree.root) t.type[j] = j < es.tree.parent[j] ? NodeType::Inc : NodeType::Dec;
        t.parent[r + j] = j;
        t.partition[r + j] = SegmentPartition::singletons(m);
        t.type[r + j] = NodeType::Dec;
        fns[r + j] = es.top[j];
        t.parent[2 * r + j] = j;
        t.partition[2 * r + j] = SegmentPartition::singletons(m);
        t.type[2 * r + j] = NodeType::Inc;
        fns[2 * r + j] = es.bottom[j];
    }
    try {
        t.validate();
        check_leaf_family(t, fns, false);
    } catch (const std::invalid_argument& e) {
        violation(std::string("leaf family: ") + e.what());
    }
    const SegRepResult sr = make_seg_rep(t, fns, false);

    // The representation applies the leaf's reversion first. Conjugating each
    // reversion by the product of its ancestors' reversions gives the same maps
    // applied root first, so values can be propagated down a shared tree.
    Gadget g;
    g.m = m;
    g.root = es.tree.root;
    g.parent = t.parent;
    g.edge.assign(3 * r, SegmentReversion::identity(m));
    std::vector<Table> anc(3 * r);  // product of strict ancestors' g, excluding the root
    Table id(m);
    std::iota(id.begin(), id.end(), 1);
    std::function<void(int)> walk = [&](int w) {
        for (int c = 0; c < 3 * r; ++c) {
            if (t.parent[c] != w) continue;
            if (w == g.root) {
                anc[c] = id;
            } else {
                anc[c].assign(m, 0);
                for (int x = 1; x <= m; ++x) anc[c][x - 1] = anc[w][sr.g[w].apply(x) - 1];
            }
            walk(c);
        }
    };
    walk(g.root);
    for (int w = 0; w < 3 * r; ++w) {
        if (w == g.root) continue;
        Table inv(m);
        for (int x = 1; x <= m; ++x) inv[anc[w][x - 1] - 1] = x;
        Table h(m);
        for (int x = 1; x <= m; ++x) h[x - 1] = anc[w][sr.g[w].apply(inv[x - 1]) - 1];
        auto rev = SegmentReversion::from_permutation(h);
        if (!rev) throw std::logic_error("conjugated reversion is not a segment reversion");
        g.edge[w] = *rev;
    }
    for (int j = 0; j < r; ++j) {
        g.up_node.push_back(r + j);
        g.down_node.push_back(2 * r + j);
        g.up_tail.push_back(sr.f_hat[r + j]);
        g.down_tail.push_back(sr.f_hat[2 * r + j]);
    }
    // Check the tree reproduces every leaf function.
    for (int leaf = r; leaf < 3 * r; ++leaf) {
        auto path = t.root_path(leaf);
        for (int x = 1; x <= m; ++x) {
            int c = x;
            for (auto it = path.rbegin(); it != path.rend(); ++it)
                if (*it != g.root) c = g.edge[*it].apply(c);
            if (sr.f_hat[leaf][c - 1] != fns[leaf][x - 1]) throw std::logic_error("gadget tree mismatch");
        }
    }
    return g;
}

}  // namespace optdisc
