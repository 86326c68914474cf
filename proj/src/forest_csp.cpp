#include "optdisc/forest_csp.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "optdisc/errors.hpp"

namespace optdisc {

// ---------------------------------------------------------------- instance

int ForestCspInstance::add_tree(int n) {
    if (n < 0) throw std::invalid_argument("negative domain size");
    domain_size.push_back(n);
    tree_of.push_back(static_cast<int>(domain_size.size()) - 1);
    values.emplace_back();
    return static_cast<int>(tree_of.size()) - 1;
}

int ForestCspInstance::add_child(int parent, SegmentReversion g) {
    int t = tree_of.at(parent);
    if (t < 0) throw std::invalid_argument("parent variable removed");
    if (g.m() != domain_size[t]) throw std::invalid_argument("edge reversion on wrong domain");
    tree_of.push_back(t);
    values.emplace_back();
    int child = static_cast<int>(tree_of.size()) - 1;
    edges.push_back({parent, child, std::move(g)});
    return child;
}

void ForestCspInstance::add_constraint(int u, int v, DownwardClosedRelation rel) {
    if (rel.m1() != domain_size.at(tree_of.at(u)) || rel.m2() != domain_size.at(tree_of.at(v)))
        throw std::invalid_argument("constraint relation on wrong domains");
    constraints.push_back({u, v, std::move(rel)});
}

void ForestCspInstance::set_values(int var, std::vector<long long> vals) {
    if (static_cast<int>(vals.size()) != domain_size.at(tree_of.at(var)))
        throw std::invalid_argument("value table length must equal the domain size");
    values.at(var) = std::move(vals);
}

int ForestCspInstance::num_variables() const {
    return static_cast<int>(std::count_if(tree_of.begin(), tree_of.end(), [](int t) { return t >= 0; }));
}

int ForestCspInstance::num_trees() const {
    return static_cast<int>(std::count_if(domain_size.begin(), domain_size.end(), [](int d) { return d >= 0; }));
}

int ForestCspInstance::anchor(int t) const {
    for (int v = 0; v < num_variable_slots(); ++v)
        if (tree_of[v] == t) return v;
    return -1;
}

std::vector<int> ForestCspInstance::tree_variables(int t) const {
    std::vector<int> out;
    for (int v = 0; v < num_variable_slots(); ++v)
        if (tree_of[v] == t) out.push_back(v);
    return out;
}

namespace {

std::vector<std::vector<int>> adjacency(const ForestCspInstance& I) {
    std::vector<std::vector<int>> adj(I.num_variable_slots());
    for (int e = 0; e < static_cast<int>(I.edges.size()); ++e) {
        adj[I.edges[e].u].push_back(e);
        adj[I.edges[e].v].push_back(e);
    }
    return adj;
}

// perm[y][a-1] = value of y when the anchor of y's tree takes value a.
std::vector<Table> tree_perms(const ForestCspInstance& I, int t, const std::vector<std::vector<int>>& adj) {
    std::vector<Table> perm(I.num_variable_slots());
    int root = I.anchor(t);
    if (root < 0) return perm;
    const int n = I.domain(t);
    perm[root].resize(n);
    std::iota(perm[root].begin(), perm[root].end(), 1);
    std::queue<int> q;
    q.push(root);
    std::vector<char> seen(I.num_variable_slots(), 0);
    seen[root] = 1;
    while (!q.empty()) {
        int y = q.front();
        q.pop();
        for (int e : adj[y]) {
            const auto& E = I.edges[e];
            int z = E.u == y ? E.v : E.u;
            if (seen[z]) continue;
            seen[z] = 1;
            perm[z].resize(n);
            for (int a = 0; a < n; ++a) perm[z][a] = E.g.apply(perm[y][a]);
            q.push(z);
        }
    }
    return perm;
}

Table inverse(const Table& p) {
    Table inv(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) inv[p[i] - 1] = static_cast<int>(i) + 1;
    return inv;
}

using Lift = std::function<Assignment(const Assignment&)>;

Assignment identity_lift(const Assignment& a) { return a; }

// Restricts tree t to anchor values with keep[a-1]. Returns the new instance
// and writes a lift from its assignments back to those of I.
ForestCspInstance restrict_anchor(const ForestCspInstance& I, int t, const std::vector<bool>& keep,
                                  Lift* lift) {
    const int n = I.domain(t);
    auto adj = adjacency(I);
    auto perm = tree_perms(I, t, adj);
    int kept = static_cast<int>(std::count(keep.begin(), keep.end(), true));
    ForestCspInstance J = I;
    J.domain_size[t] = kept;
    // alpha[y][i-1] = old value at y of new value i; rank[y][old-1] = new or 0.
    std::vector<Table> alpha(I.num_variable_slots()), rank(I.num_variable_slots());
    for (int y : I.tree_variables(t)) {
        Table vals;
        for (int a = 1; a <= n; ++a)
            if (keep[a - 1]) vals.push_back(perm[y][a - 1]);
        std::sort(vals.begin(), vals.end());
        rank[y].assign(n, 0);
        for (int i = 0; i < kept; ++i) rank[y][vals[i] - 1] = i + 1;
        alpha[y] = std::move(vals);
        if (!I.values[y].empty()) {
            std::vector<long long> nv(kept);
            for (int i = 0; i < kept; ++i) nv[i] = I.values[y][alpha[y][i] - 1];
            J.values[y] = std::move(nv);
        }
    }
    for (auto& E : J.edges) {
        if (I.tree(E.u) != t) continue;
        Table g(kept);
        for (int i = 1; i <= kept; ++i) g[i - 1] = rank[E.v][E.g.apply(alpha[E.u][i - 1]) - 1];
        auto r = SegmentReversion::from_permutation(g);
        if (!r) throw std::logic_error("forbidding values broke a segment reversion");
        E.g = *r;
    }
    for (auto& C : J.constraints) {
        bool su = I.tree(C.u) == t, sv = I.tree(C.v) == t;
        if (!su && !sv) continue;
        const auto& fr = C.rel.frontier();
        int m1 = su ? kept : C.rel.m1();
        int m2 = sv ? kept : C.rel.m2();
        std::vector<int> nf(m1);
        for (int i = 1; i <= m1; ++i) {
            int old_row = su ? alpha[C.u][i - 1] : i;
            int F = fr[old_row - 1];
            if (sv) {
                // number of kept values at v that are <= F
                int cnt = 0;
                for (int b = 1; b <= F; ++b) cnt += rank[C.v][b - 1] > 0;
                F = cnt;
            }
            nf[i - 1] = F;
        }
        C.rel = DownwardClosedRelation(m1, m2, std::move(nf));
    }
    if (lift) {
        *lift = [alpha = std::move(alpha)](const Assignment& c) {
            Assignment a = c;
            for (std::size_t y = 0; y < alpha.size(); ++y)
                if (!alpha[y].empty() && c[y] > 0) a[y] = alpha[y][c[y] - 1];
            return a;
        };
    }
    return J;
}

Lift compose(Lift outer, Lift inner) {
    // inner maps the deepest assignment one level up, outer the next.
    return [outer = std::move(outer), inner = std::move(inner)](const Assignment& c) { return outer(inner(c)); };
}

// keep sets are expressed at anchors; trees with all values kept are skipped.
ForestCspInstance restrict_many(const ForestCspInstance& I, const std::vector<std::vector<bool>>& keep,
                                Lift* lift) {
    ForestCspInstance J = I;
    Lift total = identity_lift;
    for (int t = 0; t < static_cast<int>(keep.size()); ++t) {
        if (keep[t].empty() || J.domain(t) < 0) continue;
        if (std::all_of(keep[t].begin(), keep[t].end(), [](bool b) { return b; })) continue;
        Lift l;
        J = restrict_anchor(J, t, keep[t], &l);
        total = compose(total, l);
    }
    if (lift) *lift = total;
    return J;
}

std::vector<bool> anchor_keep_from_var(const ForestCspInstance& I, int y, const std::vector<bool>& keep_y) {
    auto adj = adjacency(I);
    int t = I.tree(y);
    auto perm = tree_perms(I, t, adj);
    std::vector<bool> k(I.domain(t));
    for (int a = 1; a <= I.domain(t); ++a) k[a - 1] = keep_y[perm[y][a - 1] - 1];
    return k;
}

}  // namespace

void ForestCspInstance::validate() const {
    if (values.size() != tree_of.size()) throw std::logic_error("value table slots disagree");
    std::vector<int> nvars(domain_size.size(), 0), nedges(domain_size.size(), 0);
    for (int v = 0; v < num_variable_slots(); ++v) {
        if (tree_of[v] < 0) continue;
        if (tree_of[v] >= static_cast<int>(domain_size.size()) || domain_size[tree_of[v]] < 0)
            throw std::logic_error("variable in a removed tree");
        ++nvars[tree_of[v]];
        if (!values[v].empty() && static_cast<int>(values[v].size()) != domain_size[tree_of[v]])
            throw std::logic_error("value table length mismatch");
    }
    for (const auto& E : edges) {
        if (!alive(E.u) || !alive(E.v) || tree_of[E.u] != tree_of[E.v])
            throw std::logic_error("edge endpoints must be live and in one tree");
        if (E.g.m() != domain_size[tree_of[E.u]]) throw std::logic_error("edge reversion on wrong domain");
        ++nedges[tree_of[E.u]];
    }
    for (int t = 0; t < static_cast<int>(domain_size.size()); ++t) {
        if (domain_size[t] < 0) continue;
        if (nvars[t] == 0 || nedges[t] != nvars[t] - 1) throw std::logic_error("tree is not a tree");
        auto adj = adjacency(*this);
        auto perm = tree_perms(*this, t, adj);
        for (int v : tree_variables(t))
            if (perm[v].empty() && domain_size[t] > 0) throw std::logic_error("tree is disconnected");
    }
    for (const auto& C : constraints) {
        if (!alive(C.u) || !alive(C.v)) throw std::logic_error("constraint on removed variable");
        if (C.rel.m1() != domain_size[tree_of[C.u]] || C.rel.m2() != domain_size[tree_of[C.v]])
            throw std::logic_error("constraint relation on wrong domains");
    }
}

int propagate(const ForestCspInstance& I, int y, int a, int y2) {
    if (!I.alive(y) || !I.alive(y2) || I.tree(y) != I.tree(y2)) throw DifferentTrees("propagate across trees");
    if (a < 1 || a > I.domain(I.tree(y))) throw OutOfDomain("propagate: value outside domain");
    if (y == y2) return a;
    auto adj = adjacency(I);
    auto perm = tree_perms(I, I.tree(y), adj);
    int anchor_val = inverse(perm[y])[a - 1];
    return perm[y2][anchor_val - 1];
}

ForestCspInstance forbid_value(const ForestCspInstance& I, int y, int a) {
    std::vector<bool> keep(I.domain(I.tree(y)), true);
    keep.at(a - 1) = false;
    return restrict_domain(I, y, keep);
}

ForestCspInstance restrict_domain(const ForestCspInstance& I, int y, const std::vector<bool>& keep) {
    if (static_cast<int>(keep.size()) != I.domain(I.tree(y))) throw std::invalid_argument("keep set size mismatch");
    return restrict_anchor(I, I.tree(y), anchor_keep_from_var(I, y, keep), nullptr);
}

// ---------------------------------------------------------------- preprocessing

namespace {

struct PreOut {
    PreprocessStatus status;
    ForestCspInstance inst;
    Lift lift;
};

PreOut preprocess_impl(const ForestCspInstance& I0) {
    ForestCspInstance I = I0;
    Lift total = identity_lift;
    const int size0 = I.apparent_size();
    for (;;) {
        if (I.num_variables() == 0) return {PreprocessStatus::TriviallySat, I, total};
        for (int t = 0; t < static_cast<int>(I.domain_size.size()); ++t)
            if (I.domain_size[t] == 0) return {PreprocessStatus::Unsat, I, total};
        bool changed = false;
        // Intra-tree constraints: enumerate the n_T tree assignments.
        for (std::size_t c = 0; c < I.constraints.size(); ++c) {
            const auto& C = I.constraints[c];
            int t = I.tree(C.u);
            if (I.tree(C.v) != t) continue;
            auto adj = adjacency(I);
            auto perm = tree_perms(I, t, adj);
            std::vector<bool> keep(I.domain(t));
            for (int a = 1; a <= I.domain(t); ++a)
                keep[a - 1] = C.rel.contains(perm[C.u][a - 1], perm[C.v][a - 1]);
            I.constraints.erase(I.constraints.begin() + static_cast<long>(c));
            if (!std::all_of(keep.begin(), keep.end(), [](bool b) { return b; })) {
                Lift l;
                I = restrict_anchor(I, t, keep, &l);
                total = compose(total, l);
            }
            changed = true;
            break;
        }
        if (changed) continue;
        // Every value needs a partner through every constraint.
        std::vector<std::vector<bool>> keep(I.domain_size.size());
        auto adj = adjacency(I);
        std::vector<std::vector<Table>> perms(I.domain_size.size());
        auto perm_of = [&](int t) -> const std::vector<Table>& {
            if (perms[t].empty()) perms[t] = tree_perms(I, t, adj);
            return perms[t];
        };
        bool any = false;
        for (const auto& C : I.constraints) {
            const auto& fr = C.rel.frontier();
            int tu = I.tree(C.u), tv = I.tree(C.v);
            const auto& pu = perm_of(tu)[C.u];
            const auto& pv = perm_of(tv)[C.v];
            if (keep[tu].empty()) keep[tu].assign(I.domain(tu), true);
            if (keep[tv].empty()) keep[tv].assign(I.domain(tv), true);
            int maxf = fr.empty() ? 0 : fr[0];
            for (int a = 1; a <= I.domain(tu); ++a)
                if (fr[pu[a - 1] - 1] == 0 && keep[tu][a - 1]) keep[tu][a - 1] = false, any = true;
            for (int a = 1; a <= I.domain(tv); ++a)
                if (pv[a - 1] > maxf && keep[tv][a - 1]) keep[tv][a - 1] = false, any = true;
        }
        if (!any) break;
        Lift l;
        I = restrict_many(I, keep, &l);
        total = compose(total, l);
    }
    assert(I.apparent_size() <= size0);
    (void)size0;
    return {PreprocessStatus::Preprocessed, I, total};
}

// ---------------------------------------------------------------- branching operations

void delete_tree(ForestCspInstance& J, int t) {
    for (auto& tt : J.tree_of)
        if (tt == t) tt = -1;
    J.domain_size[t] = -1;
    J.edges.erase(std::remove_if(J.edges.begin(), J.edges.end(),
                                 [&](const ForestEdge& E) { return !J.alive(E.u); }),
                  J.edges.end());
    J.constraints.erase(std::remove_if(J.constraints.begin(), J.constraints.end(),
                                       [&](const ForestConstraint& C) { return !J.alive(C.u) || !J.alive(C.v); }),
                        J.constraints.end());
}

// Branch on the anchor: the anchor of t takes value 1.
ForestCspInstance step_fix_first(const ForestCspInstance& I, int t, Lift* lift) {
    auto adj = adjacency(I);
    auto perm = tree_perms(I, t, adj);
    std::vector<std::vector<Table>> perms(I.domain_size.size());
    std::vector<std::vector<bool>> keep(I.domain_size.size());
    for (const auto& C : I.constraints) {
        bool su = I.tree(C.u) == t, sv = I.tree(C.v) == t;
        if (su == sv) continue;  // intra-tree constraints do not exist after preprocessing
        int other = su ? C.v : C.u;
        int to = I.tree(other);
        if (perms[to].empty()) perms[to] = tree_perms(I, to, adj);
        if (keep[to].empty()) keep[to].assign(I.domain(to), true);
        int val = su ? perm[C.u][0] : perm[C.v][0];
        for (int a = 1; a <= I.domain(to); ++a) {
            int w = perms[to][other][a - 1];
            bool ok = su ? C.rel.contains(val, w) : C.rel.contains(w, val);
            if (!ok) keep[to][a - 1] = false;
        }
    }
    ForestCspInstance J = I;
    std::vector<std::pair<int, int>> fixed;
    for (int y : I.tree_variables(t)) fixed.emplace_back(y, perm[y][0]);
    delete_tree(J, t);
    Lift l;
    J = restrict_many(J, keep, &l);
    *lift = [l, fixed](const Assignment& c) {
        Assignment a = l(c);
        for (auto [y, v] : fixed) a[y] = v;
        return a;
    };
    return J;
}

// Contracts edge e whose reversion is the identity.
ForestCspInstance contract_identity_edge(const ForestCspInstance& I, int e, Lift* lift) {
    const auto& E = I.edges[e];
    if (!E.g.is_identity()) throw std::logic_error("contracting a non-identity edge");
    int keep = std::min(E.u, E.v), drop = std::max(E.u, E.v);
    ForestCspInstance J = I;
    J.edges.erase(J.edges.begin() + e);
    for (auto& F : J.edges) {
        if (F.u == drop) F.u = keep;
        if (F.v == drop) F.v = keep;
    }
    for (auto& C : J.constraints) {
        if (C.u == drop) C.u = keep;
        if (C.v == drop) C.v = keep;
    }
    J.tree_of[drop] = -1;
    J.values[drop].clear();
    *lift = [keep, drop](const Assignment& c) {
        Assignment a = c;
        a[drop] = c[keep];
        return a;
    };
    return J;
}

// Branch on an endpoint: phi(u) is a left (or right) endpoint of a segment of g_e.
ForestCspInstance step_endpoint(const ForestCspInstance& I, int e, bool left, Lift* lift) {
    const auto& E = I.edges[e];
    const auto& P = E.g.partition();
    std::vector<bool> keep_u(E.g.m(), false);
    for (int i = 0; i < P.segments(); ++i) keep_u[(left ? P.begin(i) : P.end(i)) - 1] = true;
    int t = I.tree(E.u);
    Lift l1, l2;
    ForestCspInstance J = restrict_anchor(I, t, anchor_keep_from_var(I, E.u, keep_u), &l1);
    J = contract_identity_edge(J, e, &l2);
    *lift = compose(l1, l2);
    return J;
}

// Branch on a constraint: constraint gamma between t and another tree is the one
// that pins t's anchor away from value 1.
ForestCspInstance step_merge(const ForestCspInstance& I, int t, int gamma, Lift* lift) {
    const auto& G = I.constraints[gamma];
    bool t_first = I.tree(G.u) == t;
    int y1 = t_first ? G.u : G.v;
    int y2 = t_first ? G.v : G.u;
    int s = I.tree(y2);
    const int nS = I.domain(s);
    // R oriented as D_T x D_S; f'(a) = max{b : (b, a) in R}.
    DownwardClosedRelation R = t_first ? G.rel : G.rel.transpose();
    DownwardClosedRelation RT = R.transpose();
    Table fpp(nS);  // f'' = f' composed with the full reversal of D_S
    for (int a = 1; a <= nS; ++a) {
        int v = RT.frontier_at(nS + 1 - a);
        if (v < 1) throw std::logic_error("merge step requires a preprocessed instance");
        fpp[a - 1] = v;
    }
    auto adj = adjacency(I);
    std::vector<Table> f(I.num_variable_slots());
    ForestCspInstance J = I;
    f[y1] = fpp;
    std::queue<int> q;
    q.push(y1);
    while (!q.empty()) {
        int y = q.front();
        q.pop();
        for (int e : adj[y]) {
            int z = I.edges[e].u == y ? I.edges[e].v : I.edges[e].u;
            if (!f[z].empty()) continue;
            auto sw = seg_swap(f[y], I.edges[e].g);
            f[z] = std::move(sw.f_prime);
            J.edges[e].g = std::move(sw.g_prime);
            q.push(z);
        }
    }
    for (int y : I.tree_variables(t)) {
        J.tree_of[y] = s;
        if (!I.values[y].empty()) {
            std::vector<long long> nv(nS);
            for (int a = 1; a <= nS; ++a) nv[a - 1] = I.values[y][f[y][a - 1] - 1];
            J.values[y] = std::move(nv);
        }
    }
    J.domain_size[t] = -1;
    J.edges.push_back({y2, y1, SegmentReversion::full(nS)});
    J.constraints.erase(J.constraints.begin() + gamma);
    for (auto& C : J.constraints) {
        bool su = I.tree(C.u) == t, sv = I.tree(C.v) == t;
        if (su) C.rel = dc_compose(f[C.u], C.rel);
        if (sv) C.rel = dc_compose(f[C.v], C.rel.transpose()).transpose();
    }
    std::vector<std::pair<int, Table>> maps;
    for (int y : I.tree_variables(t)) maps.emplace_back(y, f[y]);
    *lift = [maps](const Assignment& c) {
        Assignment a = c;
        for (const auto& [y, fy] : maps) a[y] = fy[c[y] - 1];
        return a;
    };
    return J;
}

struct Solver {
    SolveStats* stats;

    std::optional<Assignment> child(const ForestCspInstance& parent, const ForestCspInstance& c, const Lift& l,
                                    int depth) {
        if (c.apparent_size() >= parent.apparent_size())
            throw std::logic_error("apparent size did not decrease along a recursion edge");
        auto r = rec(c, depth + 1);
        if (!r) return std::nullopt;
        return l(*r);
    }

    std::optional<Assignment> rec(const ForestCspInstance& I0, int depth) {
        if (stats) {
            ++stats->nodes;
            stats->max_depth = std::max(stats->max_depth, depth);
        }
        auto pre = preprocess_impl(I0);
        if (pre.status == PreprocessStatus::Unsat) return std::nullopt;
        if (pre.status == PreprocessStatus::TriviallySat) return pre.lift(Assignment(I0.num_variable_slots(), 0));
        const ForestCspInstance& I = pre.inst;
        auto up = [&](std::optional<Assignment> r) -> std::optional<Assignment> {
            if (!r) return std::nullopt;
            return pre.lift(*r);
        };
        const int ntrees = static_cast<int>(I.domain_size.size());
        std::vector<int> incident(ntrees, 0);
        for (const auto& C : I.constraints) {
            ++incident[I.tree(C.u)];
            ++incident[I.tree(C.v)];
        }
        // Exact reductions: a tree with one value or without constraints is
        // decided by setting its anchor to 1; identity edges contract.
        for (int t = 0; t < ntrees; ++t) {
            if (I.domain(t) < 0) continue;
            if (I.domain(t) == 1 || incident[t] == 0) {
                Lift l;
                auto J = step_fix_first(I, t, &l);
                return up(child(I, J, l, depth));
            }
        }
        for (int e = 0; e < static_cast<int>(I.edges.size()); ++e) {
            if (I.edges[e].g.is_identity()) {
                Lift l;
                auto J = contract_identity_edge(I, e, &l);
                return up(child(I, J, l, depth));
            }
        }
        // Step 1.
        for (int t = 0; t < ntrees; ++t) {
            if (I.domain(t) < 0) continue;
            Lift l;
            auto J = step_fix_first(I, t, &l);
            if (auto r = child(I, J, l, depth)) return up(r);
        }
        // Step 2. Left at u and right at v coincide, so two branches per edge.
        for (int e = 0; e < static_cast<int>(I.edges.size()); ++e) {
            for (bool left : {true, false}) {
                Lift l;
                auto J = step_endpoint(I, e, left, &l);
                if (auto r = child(I, J, l, depth)) return up(r);
            }
        }
        // Step 3 on the tree with the fewest incident constraints.
        int best = -1;
        for (int t = 0; t < ntrees; ++t)
            if (I.domain(t) >= 0 && incident[t] > 0 && (best < 0 || incident[t] < incident[best])) best = t;
        if (best < 0) return std::nullopt;
        for (int c = 0; c < static_cast<int>(I.constraints.size()); ++c) {
            const auto& C = I.constraints[c];
            if (I.tree(C.u) != best && I.tree(C.v) != best) continue;
            Lift l;
            auto J = step_merge(I, best, c, &l);
            if (auto r = child(I, J, l, depth)) return up(r);
        }
        return std::nullopt;
    }
};

}  // namespace

PreprocessResult preprocess(const ForestCspInstance& inst) {
    auto r = preprocess_impl(inst);
    return {r.status, std::move(r.inst)};
}

std::optional<Assignment> solve(const ForestCspInstance& inst, SolveStats* stats) {
    inst.validate();
    Solver s{stats};
    auto r = s.rec(inst, 0);
    if (r) {
        auto v = verify_assignment(inst, *r);
        if (!v.ok) throw std::logic_error("forest CSP solver returned an invalid assignment: " + v.message);
    }
    return r;
}

Verdict verify_assignment(const ForestCspInstance& I, const Assignment& a) {
    if (static_cast<int>(a.size()) != I.num_variable_slots()) return {false, "assignment has wrong length"};
    for (int y = 0; y < I.num_variable_slots(); ++y) {
        if (!I.alive(y)) continue;
        if (a[y] < 1 || a[y] > I.domain(I.tree(y))) return {false, "variable " + std::to_string(y) + " out of domain"};
    }
    for (std::size_t e = 0; e < I.edges.size(); ++e) {
        const auto& E = I.edges[e];
        if (E.g.apply(a[E.u]) != a[E.v]) return {false, "edge " + std::to_string(e) + " violated"};
    }
    for (std::size_t c = 0; c < I.constraints.size(); ++c) {
        const auto& C = I.constraints[c];
        if (!C.rel.contains(a[C.u], a[C.v])) return {false, "constraint " + std::to_string(c) + " violated"};
    }
    return {};
}

std::string debug_dump(const ForestCspInstance& I) {
    std::ostringstream os;
    os << "forest-csp trees " << I.num_trees() << " variables " << I.num_variables() << " constraints "
       << I.num_constraints() << "\n";
    for (int t = 0; t < static_cast<int>(I.domain_size.size()); ++t)
        if (I.domain_size[t] >= 0) os << "tree " << t << " domain " << I.domain_size[t] << "\n";
    for (int v = 0; v < I.num_variable_slots(); ++v)
        if (I.alive(v)) os << "var " << v << " tree " << I.tree_of[v] << "\n";
    for (const auto& E : I.edges) {
        os << "edge " << E.u << " " << E.v << " boundaries";
        for (int b : E.g.boundaries()) os << " " << b;
        os << "\n";
    }
    for (const auto& C : I.constraints) {
        os << "constraint " << C.u << " " << C.v << " frontier";
        for (int f : C.rel.frontier()) os << " " << f;
        os << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------- auxiliary instances

int AuxiliaryCspInstance::add_variable(int domain, std::vector<long long> vals) {
    if (!vals.empty() && static_cast<int>(vals.size()) != domain)
        throw std::invalid_argument("value table length must equal the domain size");
    domain_size.push_back(domain);
    values.push_back(std::move(vals));
    return num_variables() - 1;
}

int AuxiliaryCspInstance::total_depth() const {
    int p = 0;
    for (const auto& C : constraints) p += static_cast<int>(C.rep1.size() + C.rep2.size());
    return p;
}

bool AuxiliaryCspInstance::satisfied_by(const std::vector<int>& a) const {
    for (const auto& C : constraints) {
        int x = a[C.x1], y = a[C.x2];
        for (const auto& g : C.rep1) x = g.apply(x);
        for (const auto& g : C.rep2) y = g.apply(y);
        if (!C.rel.contains(x, y)) return false;
    }
    return true;
}

FromAuxResult from_auxiliary(const AuxiliaryCspInstance& aux) {
    FromAuxResult out;
    for (int i = 0; i < aux.num_variables(); ++i) {
        int v = out.inst.add_tree(aux.domain_size[i]);
        if (!aux.values[i].empty()) out.inst.set_values(v, aux.values[i]);
        out.var_of.push_back(v);
    }
    for (const auto& C : aux.constraints) {
        int a = out.var_of[C.x1], b = out.var_of[C.x2];
        for (const auto& g : C.rep1) a = out.inst.add_child(a, g);
        for (const auto& g : C.rep2) b = out.inst.add_child(b, g);
        out.inst.add_constraint(a, b, C.rel);
    }
    return out;
}

}  // namespace optdisc
