// Per-branch driver: domain filtering, guesses for high-alternation
// situations, emission of the forest CSP and back-mapping of its solutions.

#include <algorithm>
#include <array>
#include <atomic>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "optdisc/errors.hpp"
#include "optdisc/reduction.hpp"

namespace optdisc {

namespace {

using Matrix = std::vector<std::vector<char>>;
using Alive = std::vector<std::vector<char>>;

struct LineRef {
    int axis = 0, line = 0;
};

struct Binary {
    int u = 0, v = 0;
    Matrix ok;
};

struct Context {
    const Instance& inst;
    const LineSystem& ls;
    const CellTypeMap& delta;
    std::vector<Point> pts;
    std::vector<int> cls;
    std::array<std::vector<int>, 2> var_of;
    std::vector<LineRef> line_of;
    std::vector<std::vector<long long>> vals;

    Context(const Instance& i, const LineSystem& l, const CellTypeMap& d) : inst(i), ls(l), delta(d) {
        pts = inst.all();
        for (std::size_t p = 0; p < pts.size(); ++p) cls.push_back(p < inst.w1.size() ? 1 : 2);
        for (int axis = 0; axis < 2; ++axis) {
            const auto& L = ls.axis(axis);
            var_of[axis].assign(L.size(), -1);
            for (int i = 0; i < static_cast<int>(L.size()); ++i)
                if (!L[i].apx) {
                    var_of[axis][i] = static_cast<int>(line_of.size());
                    line_of.push_back({axis, i});
                    vals.push_back(L[i].domain);
                }
        }
    }
    int var(LineRef r) const { return var_of[r.axis][r.line]; }
    int num_vars() const { return static_cast<int>(line_of.size()); }
    std::vector<long long> values(LineRef r) const {
        int v = var(r);
        return v >= 0 ? vals[v] : std::vector<long long>{ls.axis(r.axis)[r.line].coord};
    }
};

struct Filters {
    std::vector<Binary> bins;
    Alive alive;
    bool dead = false;
    std::string reason;
};

void add_matrix(const Context& cx, Filters& f, LineRef a, LineRef b, const Matrix& m, const char* why) {
    const int va = cx.var(a), vb = cx.var(b);
    if (va >= 0 && vb >= 0) {
        bool all = true;
        for (const auto& row : m)
            for (char c : row) all = all && c;
        if (!all) f.bins.push_back({va, vb, m});
    } else if (va >= 0) {
        for (std::size_t i = 0; i < m.size(); ++i) f.alive[va][i] = f.alive[va][i] && m[i][0];
    } else if (vb >= 0) {
        for (std::size_t j = 0; j < m[0].size(); ++j) f.alive[vb][j] = f.alive[vb][j] && m[0][j];
    } else if (!m[0][0] && !f.dead) {
        f.dead = true;
        f.reason = why;
    }
}

bool arc_consistency(const std::vector<Binary>& bins, Alive& alive) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& b : bins) {
            auto& au = alive[b.u];
            auto& av = alive[b.v];
            for (std::size_t i = 0; i < au.size(); ++i) {
                if (!au[i]) continue;
                bool sup = false;
                for (std::size_t j = 0; j < av.size() && !sup; ++j) sup = av[j] && b.ok[i][j];
                if (!sup) au[i] = 0, changed = true;
            }
            for (std::size_t j = 0; j < av.size(); ++j) {
                if (!av[j]) continue;
                bool sup = false;
                for (std::size_t i = 0; i < au.size() && !sup; ++i) sup = au[i] && b.ok[i][j];
                if (!sup) av[j] = 0, changed = true;
            }
        }
    }
    for (const auto& a : alive)
        if (std::find(a.begin(), a.end(), 1) == a.end()) return false;
    return true;
}

std::vector<long long> alive_values(const std::vector<long long>& vals, const std::vector<char>& alive) {
    std::vector<long long> out;
    for (std::size_t i = 0; i < vals.size(); ++i)
        if (alive[i]) out.push_back(vals[i]);
    return out;
}

int count_le(const std::vector<long long>& v, long long x) {
    return static_cast<int>(std::upper_bound(v.begin(), v.end(), x) - v.begin());
}
int count_lt(const std::vector<long long>& v, long long x) {
    return static_cast<int>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
}

// ---- corners

struct Corner {
    int px1, px2, ly1, ly2;  // line indices; x lines then y lines
};

bool region_empty(const Context& cx, long long x1, long long x2, long long y1, long long y2) {
    for (const auto& p : cx.pts)
        if (x1 < p.x && p.x < x2 && y1 < p.y && p.y < y2) return false;
    return true;
}

std::array<LineRef, 4> borders(const Corner& c) {
    return {LineRef{0, c.px1}, LineRef{0, c.px2}, LineRef{1, c.ly1}, LineRef{1, c.ly2}};
}

std::vector<Corner> empty_corners(const Context& cx) {
    const auto& ls = cx.ls;
    std::vector<int> ax, ay;
    for (int i = 0; i < static_cast<int>(ls.x.size()); ++i)
        if (ls.x[i].apx) ax.push_back(i);
    for (int j = 0; j < static_cast<int>(ls.y.size()); ++j)
        if (ls.y[j].apx) ay.push_back(j);
    std::vector<Corner> all;
    for (std::size_t gx = 0; gx + 1 < ax.size(); ++gx)
        for (std::size_t gy = 0; gy + 1 < ay.size(); ++gy)
            for (int p1 = ax[gx]; p1 < ax[gx + 1]; ++p1)
                for (int p2 = p1 + 1; p2 <= ax[gx + 1]; ++p2)
                    for (int l1 = ay[gy]; l1 < ay[gy + 1]; ++l1)
                        for (int l2 = l1 + 1; l2 <= ay[gy + 1]; ++l2) {
                            int opt = !ls.x[p1].apx + !ls.x[p2].apx + !ls.y[l1].apx + !ls.y[l2].apx;
                            if (opt > 2) continue;
                            bool zero = true;
                            for (int i = p1; i < p2 && zero; ++i)
                                for (int j = l1; j < l2 && zero; ++j) zero = cx.delta.at(i, j) == 0;
                            if (zero) all.push_back({p1, p2, l1, l2});
                        }
    // Between two opt lines of one axis only the maximal far line is needed.
    auto dominated = [&](const Corner& c) {
        for (const auto& d : all) {
            if (!ls.x[c.px1].apx || !ls.x[c.px2].apx) {
                if (!ls.x[c.px1].apx && !ls.x[c.px2].apx && d.px1 == c.px1 && d.ly1 == c.ly1 && d.ly2 == c.ly2 &&
                    d.px2 > c.px2 && !ls.x[d.px2].apx)
                    return true;
            }
            if (!ls.y[c.ly1].apx && !ls.y[c.ly2].apx && d.ly1 == c.ly1 && d.px1 == c.px1 && d.px2 == c.px2 &&
                d.ly2 > c.ly2 && !ls.y[d.ly2].apx)
                return true;
        }
        return false;
    };
    std::vector<Corner> out;
    for (const auto& c : all)
        if (!dominated(c)) out.push_back(c);
    return out;
}

// Emptiness over the values of the (at most two) opt borders of a corner.
Matrix corner_matrix(const Context& cx, const Corner& c, const std::vector<LineRef>& opt,
                     const std::vector<std::vector<long long>>& vals) {
    const auto b = borders(c);
    auto coord = [&](int t, const std::vector<long long>& assign) {
        for (std::size_t o = 0; o < opt.size(); ++o)
            if (opt[o].axis == b[t].axis && opt[o].line == b[t].line) return assign[o];
        return cx.ls.axis(b[t].axis)[b[t].line].coord;
    };
    const std::size_t n0 = opt.size() > 0 ? vals[0].size() : 1, n1 = opt.size() > 1 ? vals[1].size() : 1;
    Matrix m(n0, std::vector<char>(n1, 0));
    std::vector<long long> assign(opt.size());
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j) {
            if (opt.size() > 0) assign[0] = vals[0][i];
            if (opt.size() > 1) assign[1] = vals[1][j];
            m[i][j] = region_empty(cx, coord(0, assign), coord(1, assign), coord(2, assign), coord(3, assign));
        }
    return m;
}

std::vector<std::pair<int, LineRef>> opt_borders(const Context& cx, const Corner& c) {
    std::vector<std::pair<int, LineRef>> out;
    auto b = borders(c);
    for (int t = 0; t < 4; ++t)
        if (cx.var(b[t]) >= 0) out.push_back({t, b[t]});
    return out;
}

// ---- views of high-alternation situations

struct HighView {
    int sit = 0;
    SituationView v;
    LineRef p1, p2;
    std::vector<std::optional<BlockView>> blocks;  // per view index, full domains
    std::vector<std::vector<int>> order;           // leader order per view index
};

int orig_index(const ViewLine& l, int j) {
    const int m = static_cast<int>(l.values.size());
    return l.reversed ? m - 1 - j : j;
}

std::vector<char> view_alive(const Context& cx, const ViewLine& l, LineRef r, const Alive& alive) {
    const int v = cx.var(r);
    if (v < 0) return {1};
    std::vector<char> out(l.values.size());
    for (int j = 0; j < static_cast<int>(out.size()); ++j) out[j] = alive[v][orig_index(l, j)];
    return out;
}

std::vector<int> leader_order(const SituationView& v, const std::vector<int>& leaders) {
    std::vector<int> pi(leaders.size());
    std::iota(pi.begin(), pi.end(), 0);
    std::sort(pi.begin(), pi.end(), [&](int a, int b) {
        const auto &p = v.pts[leaders[a]], &q = v.pts[leaders[b]];
        return p.x > q.x || (p.x == q.x && p.y > q.y);
    });
    return pi;
}

std::uint64_t branch_hash(const Layout& layout, const CellTypeMap& d, const ApxPair& apx) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](long long v) { h = (h ^ static_cast<std::uint64_t>(v)) * 1099511628211ULL; };
    for (int v : layout.x) mix(v);
    mix(-1);
    for (int v : layout.y) mix(v);
    for (auto v : d.t) mix(v);
    for (auto v : apx.xs) mix(v);
    for (auto v : apx.ys) mix(v);
    return h;
}

class BranchSolver {
public:
    BranchSolver(const Instance& inst, const ApxPair& apx, const Layout& layout, const LineSystem& ls,
                 const CellTypeMap& delta, int k, const ReductionOptions& opt, ReductionStats* stats)
        : cx_(inst, ls, delta), apx_(apx), layout_(layout), k_(k), opt_(opt), stats_(stats) {}

    std::optional<Separation> run();

private:
    bool setup();
    std::vector<std::vector<char>> side_masks(std::size_t side, const Alive& alive, const std::vector<int>* phi);
    std::optional<Separation> choose(std::size_t side, Alive alive, const std::vector<int>* phi);
    std::optional<Separation> finalize(Alive alive);
    std::optional<Separation> emit(const Alive& alive, const std::vector<EpochStructure>& es);
    void trace(const nlohmann::json& extra);
    void reject(const std::string& why);

    Context cx_;
    const ApxPair& apx_;
    const Layout& layout_;
    int k_;
    const ReductionOptions& opt_;
    ReductionStats* stats_;
    SituationList sl_;
    Filters f_;
    std::vector<Corner> corners_;
    std::vector<int> high_;  // indices into sl_.items with alternation >= 4
    std::vector<HighView> views_;  // two per high situation: red then blue
};

void BranchSolver::trace(const nlohmann::json& extra) {
    if (!opt_.trace) return;
    nlohmann::json j;
    j["apx"] = {{"x", apx_.xs}, {"y", apx_.ys}};
    j["layout"] = {{"x", layout_.x}, {"y", layout_.y}};
    j["situations"] = sl_.items.size();
    int alt = 0;
    for (const auto& s : sl_.items) alt = std::max(alt, s.alternation());
    j["max_alternation"] = alt;
    j.update(extra);
#pragma omp critical(optdisc_trace)
    *opt_.trace << j.dump() << '\n';
}

void BranchSolver::reject(const std::string& why) {
    if (stats_) ++stats_->rejected;
    trace({{"status", "rejected"}, {"reason", why}});
}

bool BranchSolver::setup() {
    const auto& ls = cx_.ls;
    sl_ = situation_list(ls, cx_.delta, cx_.inst);
    if (sl_.rejected) {
        reject(sl_.reason);
        return false;
    }
    for (const auto& s : sl_.items)
        if (stats_) stats_->max_alternation = std::max(stats_->max_alternation, s.alternation());
    f_.alive.resize(cx_.num_vars());
    for (int v = 0; v < cx_.num_vars(); ++v) f_.alive[v].assign(cx_.vals[v].size(), 1);

    // Monotonicity inside each gap.
    for (int axis = 0; axis < 2; ++axis) {
        const auto& L = ls.axis(axis);
        for (int i = 0; i + 1 < static_cast<int>(L.size()); ++i) {
            if (L[i].apx || L[i + 1].apx) continue;
            const auto &a = L[i].domain, &b = L[i + 1].domain;
            Matrix m(a.size(), std::vector<char>(b.size()));
            for (std::size_t x = 0; x < a.size(); ++x)
                for (std::size_t y = 0; y < b.size(); ++y) m[x][y] = a[x] < b[y];
            add_matrix(cx_, f_, {axis, i}, {axis, i + 1}, m, "monotonicity");
        }
    }

    corners_ = empty_corners(cx_);
    for (const auto& c : corners_) {
        auto ob = opt_borders(cx_, c);
        std::vector<LineRef> refs;
        std::vector<std::vector<long long>> vals;
        for (auto& [t, r] : ob) refs.push_back(r), vals.push_back(cx_.values(r));
        Matrix m = corner_matrix(cx_, c, refs, vals);
        // Missing sides are the x sentinel, which add_matrix treats as a single value.
        LineRef a = refs.size() > 0 ? refs[0] : LineRef{0, 0};
        LineRef b = refs.size() > 1 ? refs[1] : LineRef{0, 0};
        add_matrix(cx_, f_, a, b, m, "nonempty corner");
    }

    for (int si = 0; si < static_cast<int>(sl_.items.size()); ++si) {
        const auto& s = sl_.items[si];
        LineRef p1{s.axis, s.p1}, p2{s.axis, s.p2};
        auto fp = fit_profile(cx_.inst, ls, s, cx_.values(p1), cx_.values(p2));
        add_matrix(cx_, f_, p1, p2, fp.fit, "no fitting pair");
        if (s.alternation() >= 4) high_.push_back(si);
    }
    if (f_.dead) {
        reject(f_.reason);
        return false;
    }

    // Views and the geometric block predicates of the alternating lines.
    for (int si : high_) {
        const auto& s = sl_.items[si];
        for (int rot = 0; rot < 2; ++rot) {
            HighView hv;
            hv.sit = si;
            hv.v = make_view(cx_.inst, ls, cx_.delta, s, cx_.var_of[0], cx_.var_of[1], rot == 1);
            hv.p1 = {s.axis, hv.v.p1.line};
            hv.p2 = {s.axis, hv.v.p2.line};
            const int m1 = static_cast<int>(hv.v.p1.values.size());
            std::vector<char> all1(m1, 1), all2(hv.v.p2.values.size(), 1);
            for (int a = 0; a < m1; ++a) {
                hv.blocks.push_back(blocks_and_leaders(hv.v, a, all1, all2));
                hv.order.push_back(hv.blocks.back() ? leader_order(hv.v, hv.blocks.back()->leaders)
                                                    : std::vector<int>{});
            }
            for (int i = 0; i < hv.v.r; ++i)
                for (int side = 0; side < 2; ++side) {
                    if (side == 0 && i == 0) continue;  // below the first block: nothing to bound
                    const ViewLine& lam = hv.v.lambda[side == 1 ? 2 * i + 1 : 2 * i];
                    LineRef lr{1 - s.axis, lam.line};
                    const int ml = static_cast<int>(lam.values.size());
                    Matrix m(m1, std::vector<char>(ml, 0));
                    for (int oa = 0; oa < m1; ++oa) {
                        const auto& bv = hv.blocks[orig_index(hv.v.p1, oa)];
                        if (!bv) continue;
                        long long hi = LLONG_MIN, lo = LLONG_MAX;
                        for (int q : bv->blocks[i]) hi = std::max(hi, hv.v.pts[q].y), lo = std::min(lo, hv.v.pts[q].y);
                        for (int ob = 0; ob < ml; ++ob) {
                            const long long y = lam.values[orig_index(lam, ob)];
                            m[oa][ob] = side == 1 ? y > hi : y < lo;
                        }
                    }
                    add_matrix(cx_, f_, hv.p1, lr, m, "alternating line crosses a block");
                }
            views_.push_back(std::move(hv));
        }
    }
    if (f_.dead) {
        reject(f_.reason);
        return false;
    }
    if (!arc_consistency(f_.bins, f_.alive)) {
        reject("empty domain after filtering");
        return false;
    }
    return true;
}

// Keep masks (original index order of the view's p1 variable) for one side.
std::vector<std::vector<char>> BranchSolver::side_masks(std::size_t side, const Alive& alive,
                                                        const std::vector<int>* phi) {
    const auto& hv = views_[side];
    const int var = cx_.var(hv.p1);
    const int m1 = static_cast<int>(hv.v.p1.values.size());
    std::map<std::vector<int>, std::vector<char>> groups;
    for (int oa = 0; oa < m1; ++oa) {
        if (!alive[var][oa]) continue;
        const int a = orig_index(hv.v.p1, oa);
        const auto& bv = hv.blocks[a];
        if (!bv) continue;
        std::vector<int> key = hv.order[a];
        if (phi) {
            bool admissible = true;
            for (int i = 0; i < hv.v.r; ++i) {
                const int c = (*phi)[hv.v.pts[bv->leaders[i]].id];
                const auto& band = hv.v.band_cells[i];
                admissible = admissible && std::find(band.begin(), band.end(), c) != band.end();
                key.push_back(c);
            }
            if (!admissible) continue;
        }
        auto& g = groups[key];
        if (g.empty()) g.assign(m1, 0);
        g[oa] = 1;
    }
    std::vector<std::vector<char>> out;
    for (auto& [key, g] : groups) {
        if (phi) {
            out.push_back(g);
            continue;
        }
        // Points leading different blocks within one order class: pick one role each.
        std::map<int, std::set<int>> roles;
        for (int oa = 0; oa < m1; ++oa)
            if (g[oa]) {
                const auto& bv = *hv.blocks[orig_index(hv.v.p1, oa)];
                for (int i = 0; i < hv.v.r; ++i) roles[bv.leaders[i]].insert(i);
            }
        std::vector<std::pair<int, std::vector<int>>> conflicts;
        long long combos = 1;
        for (auto& [q, rs] : roles)
            if (rs.size() > 1) {
                conflicts.push_back({q, std::vector<int>(rs.begin(), rs.end())});
                combos *= static_cast<long long>(rs.size());
            }
        if (conflicts.empty() || combos > 64) {
            out.push_back(g);
            continue;
        }
        std::vector<std::size_t> pick(conflicts.size(), 0);
        while (true) {
            std::map<int, int> chosen;
            for (std::size_t c = 0; c < conflicts.size(); ++c) chosen[conflicts[c].first] = conflicts[c].second[pick[c]];
            std::vector<char> mask(m1, 0);
            bool any = false;
            for (int oa = 0; oa < m1; ++oa) {
                if (!g[oa]) continue;
                const auto& bv = *hv.blocks[orig_index(hv.v.p1, oa)];
                bool ok = true;
                for (int i = 0; i < hv.v.r && ok; ++i) {
                    auto it = chosen.find(bv.leaders[i]);
                    ok = it == chosen.end() || it->second == i;
                }
                mask[oa] = ok;
                any = any || ok;
            }
            if (any) out.push_back(mask);
            std::size_t c = 0;
            while (c < pick.size() && ++pick[c] == conflicts[c].second.size()) pick[c++] = 0;
            if (c == pick.size()) break;
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::optional<Separation> BranchSolver::choose(std::size_t side, Alive alive, const std::vector<int>* phi) {
    while (side < views_.size() && cx_.var(views_[side].p1) < 0) ++side;
    if (side == views_.size()) return finalize(std::move(alive));
    const int var = cx_.var(views_[side].p1);
    for (const auto& mask : side_masks(side, alive, phi)) {
        Alive next = alive;
        for (std::size_t i = 0; i < mask.size(); ++i) next[var][i] = next[var][i] && mask[i];
        if (!arc_consistency(f_.bins, next)) {
            if (stats_) ++stats_->rejected;
            continue;
        }
        if (auto r = choose(side + 1, std::move(next), phi)) return r;
    }
    return std::nullopt;
}

std::optional<Separation> BranchSolver::finalize(Alive alive) {
    std::vector<EpochStructure> es;
    for (const auto& hv : views_) {
        auto a1 = view_alive(cx_, hv.v.p1, hv.p1, alive);
        auto a2 = view_alive(cx_, hv.v.p2, hv.p2, alive);
        try {
            es.push_back(epoch_structure(hv.v, a1, a2));
        } catch (const StructureViolation& e) {
            if (stats_) ++stats_->structure_violations;
            // Split a domain in halves; the halves cover every value.
            int var = -1;
            for (LineRef r : {hv.p1, hv.p2}) {
                int v = cx_.var(r);
                if (var < 0 && v >= 0 && std::count(alive[v].begin(), alive[v].end(), 1) > 1) var = v;
            }
            if (var < 0) {
                reject(std::string("structure: ") + e.what());
                return std::nullopt;
            }
            std::vector<int> idx;
            for (int i = 0; i < static_cast<int>(alive[var].size()); ++i)
                if (alive[var][i]) idx.push_back(i);
            const std::size_t half = idx.size() / 2;
            for (int part = 0; part < 2; ++part) {
                Alive next = alive;
                for (std::size_t t = 0; t < idx.size(); ++t)
                    if ((t < half) != (part == 0)) next[var][idx[t]] = 0;
                if (!arc_consistency(f_.bins, next)) continue;
                if (auto r = finalize(std::move(next))) return r;
            }
            return std::nullopt;
        }
    }
    return emit(alive, es);
}

class Emitter {
public:
    Emitter(const Context& cx, const Alive& alive) : cx_(cx) {
        for (int v = 0; v < cx.num_vars(); ++v) {
            vals_.push_back(alive_values(cx.vals[v], alive[v]));
            const int m = static_cast<int>(vals_.back().size());
            root_.push_back(inst.add_tree(m));
            inst.set_values(root_.back(), vals_.back());
            clone_.push_back(-1);
        }
    }
    int m(int v) const { return static_cast<int>(vals_[v].size()); }
    const std::vector<long long>& vals(int v) const { return vals_[v]; }
    int root(int v) const { return root_[v]; }
    int bind(int v, bool reversed) {
        if (!reversed) return root_[v];
        if (clone_[v] < 0) clone_[v] = inst.add_child(root_[v], SegmentReversion::full(m(v)));
        return clone_[v];
    }

    ForestCspInstance inst;

private:
    const Context& cx_;
    std::vector<std::vector<long long>> vals_;
    std::vector<int> root_, clone_;
};

std::optional<Separation> BranchSolver::emit(const Alive& alive, const std::vector<EpochStructure>& es) {
    const auto& ls = cx_.ls;
    Emitter em(cx_, alive);

    for (int axis = 0; axis < 2; ++axis) {
        const auto& L = ls.axis(axis);
        for (int i = 0; i + 1 < static_cast<int>(L.size()); ++i) {
            if (L[i].apx || L[i + 1].apx) continue;
            const int u = cx_.var({axis, i}), v = cx_.var({axis, i + 1});
            auto lt = less_than_relation(em.vals(u), em.vals(v));
            for (int a = 1; a <= em.m(u); ++a)
                for (int b = 1; b <= em.m(v); ++b)
                    if (lt.holds(a, b) != (em.vals(u)[a - 1] < em.vals(v)[b - 1]))
                        throw std::logic_error("monotonicity relation mismatch");
            em.inst.add_constraint(em.root(u), em.bind(v, true), lt.rel);
        }
    }

    // Corner constraints, merged per variable pair and clause kind.
    struct Group {
        std::vector<std::pair<int, int>> clauses;
        std::vector<Corner> corners;
    };
    std::map<std::tuple<int, int, int>, Group> groups;
    for (const auto& c : corners_) {
        auto ob = opt_borders(cx_, c);
        if (ob.size() != 2) continue;
        const int u = cx_.var(ob[0].second), v = cx_.var(ob[1].second);
        const bool lower_u = ob[0].first % 2 == 0, lower_v = ob[1].first % 2 == 0;
        const auto kind = lower_u ? (lower_v ? ClauseKind::GeGe : ClauseKind::GeLe)
                                  : (lower_v ? ClauseKind::LeGe : ClauseKind::LeLe);
        auto& g = groups[{u, v, static_cast<int>(kind)}];
        g.corners.push_back(c);
        const auto b = borders(c);
        for (const auto& p : cx_.pts) {
            bool inside = true;
            for (int t = 0; t < 4 && inside; ++t) {
                if (cx_.var(b[t]) >= 0) continue;
                const long long coord = ls.axis(b[t].axis)[b[t].line].coord;
                const long long pc = b[t].axis == 0 ? p.x : p.y;
                inside = t % 2 == 0 ? coord < pc : pc < coord;
            }
            if (!inside) continue;
            auto threshold = [&](int var, int t) {
                const long long pc = b[t].axis == 0 ? p.x : p.y;
                return t % 2 == 0 ? 1 + count_le(em.vals(var), pc) : count_lt(em.vals(var), pc);
            };
            g.clauses.push_back({threshold(u, ob[0].first), threshold(v, ob[1].first)});
        }
    }
    for (auto& [key, g] : groups) {
        const auto [u, v, kind] = key;
        auto cr = clause_relation(static_cast<ClauseKind>(kind), g.clauses, em.m(u), em.m(v));
        for (int a = 1; a <= em.m(u); ++a)
            for (int b = 1; b <= em.m(v); ++b) {
                bool empty = true;
                for (const auto& c : g.corners) {
                    auto ob = opt_borders(cx_, c);
                    auto mm = corner_matrix(cx_, c, {ob[0].second, ob[1].second},
                                            {{em.vals(u)[a - 1]}, {em.vals(v)[b - 1]}});
                    empty = empty && mm[0][0];
                }
                if (cr.holds(a, b) != empty) throw std::logic_error("corner relation mismatch");
            }
        em.inst.add_constraint(em.bind(u, !cr.g1.is_identity()), em.bind(v, !cr.g2.is_identity()), cr.rel);
    }

    // Alternation constraints.
    for (int si : high_) {
        const auto& s = sl_.items[si];
        const int u = cx_.var({s.axis, s.p1}), v = cx_.var({s.axis, s.p2});
        if (u < 0 || v < 0) continue;
        auto fp = fit_profile(cx_.inst, ls, s, em.vals(u), em.vals(v));
        for (const auto& cr : alternation_constraint(fp))
            em.inst.add_constraint(em.bind(u, !cr.g1.is_identity()), em.bind(v, !cr.g2.is_identity()), cr.rel);
    }

    // Alternating-lines gadgets.
    for (std::size_t w = 0; w < views_.size(); ++w) {
        const auto& hv = views_[w];
        const int pv = cx_.var(hv.p1);
        if (pv < 0) continue;
        const auto& e = es[w];
        const Gadget g = alternating_lines_gadget(e);
        if (stats_) ++stats_->gadgets;
        if (opt_.on_gadget) {
            const auto a1 = view_alive(cx_, hv.v.p1, hv.p1, alive);
            const auto a2 = view_alive(cx_, hv.v.p2, hv.p2, alive);
            opt_.on_gadget(GadgetRecord{hv.v, a1, a2, e, g});
        }
        const int m = g.m;
        std::vector<int> node_var(g.parent.size(), -1);
        node_var[g.root] = em.bind(pv, hv.v.p1.reversed);
        std::vector<std::vector<int>> kids(g.parent.size());
        for (int n = 0; n < static_cast<int>(g.parent.size()); ++n)
            if (g.parent[n] >= 0) kids[g.parent[n]].push_back(n);
        std::function<void(int)> hang = [&](int n) {
            for (int c : kids[n]) {
                node_var[c] = g.edge[c].is_identity() ? node_var[n] : em.inst.add_child(node_var[n], g.edge[c]);
                hang(c);
            }
        };
        hang(g.root);
        // Value of node n when the view index of p1 is a.
        auto node_value = [&](int n, int a) {
            std::vector<int> path;
            for (int x = n; x != g.root; x = g.parent[x]) path.push_back(x);
            int c = a;
            for (auto it = path.rbegin(); it != path.rend(); ++it) c = g.edge[*it].apply(c);
            return c;
        };
        const int r = hv.v.r;
        for (int i = 0; i < r; ++i)
            for (int side = 0; side < 2; ++side) {
                if (side == 0 && i == 0) continue;
                const ViewLine& lam = hv.v.lambda[side == 1 ? 2 * i + 1 : 2 * i];
                const int lv = cx_.var({1 - sl_.items[hv.sit].axis, lam.line});
                if (lv < 0) continue;
                std::vector<long long> V;
                for (long long y : em.vals(lv)) V.push_back(lam.reversed ? -y : y);
                std::sort(V.begin(), V.end());
                const int ml = static_cast<int>(V.size());
                std::vector<int> fr(m);
                int u_var, l_var;
                if (side == 1) {
                    for (int c = 1; c <= m; ++c) fr[c - 1] = ml - count_le(V, g.up_tail[i][c - 1]);
                    u_var = node_var[g.up_node[i]];
                    l_var = em.bind(lv, !lam.reversed);
                } else {
                    for (int c2 = 1; c2 <= m; ++c2) fr[c2 - 1] = count_lt(V, g.down_tail[i][m - c2]);
                    u_var = em.inst.add_child(node_var[g.down_node[i]], SegmentReversion::full(m));
                    l_var = em.bind(lv, lam.reversed);
                }
                DownwardClosedRelation rel(m, ml, fr);
                // Membership equals the geometric predicate on every pair.
                for (int a = 1; a <= m; ++a)
                    for (int b = 1; b <= ml; ++b) {
                        const int idx_view = lam.reversed ? ml + 1 - b : b;  // b indexes the root
                        const long long y = V[idx_view - 1];
                        bool want = side == 1 ? y > e.top[i][a - 1] : y < e.bottom[i][a - 1];
                        bool got;
                        if (side == 1) {
                            const int c = node_value(g.up_node[i], a);
                            got = rel.contains(c, ml + 1 - idx_view);
                        } else {
                            const int c = node_value(g.down_node[i], a);
                            got = rel.contains(m + 1 - c, idx_view);
                        }
                        if (want != got) throw std::logic_error("alternating-lines constraint mismatch");
                    }
                em.inst.add_constraint(u_var, l_var, rel);
            }
    }

    const int size = em.inst.apparent_size();
    if (stats_) {
        ++stats_->csp_instances;
        stats_->max_apparent_size = std::max(stats_->max_apparent_size, size);
    }
    if (size > apparent_size_bound(k_))
        throw std::logic_error("apparent size " + std::to_string(size) + " above the bound for k=" +
                               std::to_string(k_));
    SolveStats ss;
    auto sol = solve(em.inst, &ss);
    nlohmann::json rec = {{"status", sol ? "sat" : "unsat"},
                          {"csp",
                           {{"variables", em.inst.num_variables()},
                            {"trees", em.inst.num_trees()},
                            {"constraints", em.inst.num_constraints()},
                            {"apparent_size", size},
                            {"search_nodes", ss.nodes}}}};
    trace(rec);
    if (!sol) return std::nullopt;
    Separation sep;
    for (int v = 0; v < cx_.num_vars(); ++v) {
        const long long c = em.vals(v)[(*sol)[em.root(v)] - 1];
        (cx_.line_of[v].axis == 0 ? sep.xs : sep.ys).push_back(c);
    }
    sep.normalize_order();
    if (!verify_separation(cx_.inst, sep).ok)
        throw CompletenessViolation("CSP solution does not separate the instance");
    return sep;
}

std::optional<Separation> BranchSolver::run() {
    if (!setup()) return std::nullopt;
    if (views_.empty()) return finalize(f_.alive);
    if (opt_.mode == ColorMode::Exhaustive) return choose(0, f_.alive, nullptr);

    int r = 1;
    for (const auto& hv : views_) r = std::max(r, hv.v.r);
    int trials = opt_.trials;
    if (trials <= 0) {
        int lg = 0;
        while ((1 << lg) < r) ++lg;
        trials = static_cast<int>(std::min<long long>(256, 64LL << std::min(20, r * lg)));
    }
    // Candidate cells of every point: cells of its apx-supercell carrying its class.
    const auto& ls = cx_.ls;
    std::vector<std::vector<int>> cand(cx_.pts.size());
    for (std::size_t q = 0; q < cx_.pts.size(); ++q) {
        const auto& p = cx_.pts[q];
        int gx0 = 0, gx1 = 0, gy0 = 0, gy1 = 0;
        for (int i = 0; i < static_cast<int>(ls.x.size()); ++i)
            if (ls.x[i].apx && ls.x[i].coord < p.x) gx0 = i;
        for (gx1 = gx0 + 1; !ls.x[gx1].apx; ++gx1) {}
        for (int j = 0; j < static_cast<int>(ls.y.size()); ++j)
            if (ls.y[j].apx && ls.y[j].coord < p.y) gy0 = j;
        for (gy1 = gy0 + 1; !ls.y[gy1].apx; ++gy1) {}
        for (int i = gx0; i < gx1; ++i)
            for (int j = gy0; j < gy1; ++j)
                if (cx_.delta.at(i, j) == cx_.cls[q]) cand[q].push_back(ls.cell_id(i, j));
        if (cand[q].empty()) cand[q].push_back(ls.cell_id(gx0, gy0));
    }
    std::mt19937_64 rng(opt_.seed ^ branch_hash(layout_, cx_.delta, apx_));
    for (int t = 0; t < trials; ++t) {
        std::vector<int> phi(cx_.pts.size());
        for (std::size_t q = 0; q < phi.size(); ++q)
            phi[q] = cand[q][std::uniform_int_distribution<std::size_t>(0, cand[q].size() - 1)(rng)];
        if (auto s = choose(0, f_.alive, &phi)) return s;
    }
    return std::nullopt;
}

}  // namespace

std::optional<Separation> process_layout(const Instance& inst, const ApxPair& apx, const Layout& layout, int k,
                                         const ReductionOptions& opt, ReductionStats* stats) {
    if (stats) ++stats->layouts;
    LineSystem ls = initial_domains(skeleton(apx, layout, top_line(inst)));
    trim_domains(ls, inst);
    for (const auto& axis : {ls.x, ls.y})
        for (const auto& l : axis)
            if (!l.apx && l.domain.empty()) {
                if (stats) ++stats->rejected;
                return std::nullopt;
            }
    std::optional<Separation> found;
    for (const auto& delta : cell_type_maps(ls, inst, true)) {
        if (stats) ++stats->cell_maps;
        BranchSolver b(inst, apx, layout, ls, delta, k, opt, stats);
        auto s = b.run();
        if (s && !opt.exhaust) return s;
        if (s && !found) found = std::move(s);
    }
    return found;
}

namespace {

void merge(ReductionStats& into, const ReductionStats& s) {
    into.apx_sets += s.apx_sets;
    into.layouts += s.layouts;
    into.cell_maps += s.cell_maps;
    into.csp_instances += s.csp_instances;
    into.rejected += s.rejected;
    into.max_apparent_size = std::max(into.max_apparent_size, s.max_apparent_size);
    into.max_alternation = std::max(into.max_alternation, s.max_alternation);
    into.structure_violations += s.structure_violations;
    into.gadgets += s.gadgets;
}

}  // namespace

std::optional<Separation> compress_branches(const Instance& inst, const ApxPair& apx, int k,
                                            const ReductionOptions& opt, ReductionStats* stats, int jobs) {
    struct Task {
        std::size_t apx;
        Layout layout;
    };
    const auto pairs = branch_A(inst, apx, std::max(0, k - 1));
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < pairs.size(); ++i)
        for (auto& l : feasible_layouts(inst, pairs[i], apx, k)) tasks.push_back({i, std::move(l)});
    ReductionStats local;
    local.apx_sets = static_cast<long long>(pairs.size());
    std::optional<Separation> best;

    if (jobs <= 1) {
        for (const auto& t : tasks) {
            best = process_layout(inst, pairs[t.apx], t.layout, k, opt, &local);
            if (best) break;
        }
    } else {
        const long long n = static_cast<long long>(tasks.size());
        std::atomic<long long> found{n};
        std::vector<std::optional<Separation>> results(tasks.size());
        std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
        for (long long i = 0; i < n; ++i) {
            if (i > found.load()) continue;
            ReductionStats s;
            try {
                results[i] = process_layout(inst, pairs[tasks[i].apx], tasks[i].layout, k, opt, &s);
            } catch (...) {
#pragma omp critical(optdisc_error)
                if (!error) error = std::current_exception();
            }
            if (results[i]) {
                long long cur = found.load();
                while (i < cur && !found.compare_exchange_weak(cur, i)) {}
            }
#pragma omp critical(optdisc_stats)
            merge(local, s);
        }
        if (error) std::rethrow_exception(error);
        if (found.load() < n) best = results[found.load()];
    }
    if (stats) merge(*stats, local);
    return best;
}

}  // namespace optdisc
