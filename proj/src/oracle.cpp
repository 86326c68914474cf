#include "optdisc/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>

#include <omp.h>

#include "optdisc/errors.hpp"

namespace optdisc {

namespace {

std::vector<long long> gaps(std::vector<long long> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    std::vector<long long> out;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        if (v[i + 1] - v[i] < 2) throw std::invalid_argument("coordinates too close for integer candidate lines");
        out.push_back((v[i] + v[i + 1]) / 2);
    }
    return out;
}

using Mask = std::vector<std::uint64_t>;

struct Search {
    std::vector<long long> lines;  // x candidates then y candidates
    int nx = 0;
    std::vector<Mask> cover;       // per line, the W1-W2 pairs it separates
    Mask full;
    std::size_t words = 0;

    explicit Search(const Instance& inst) {
        auto c = candidate_lines(inst);
        lines = c.xs;
        nx = static_cast<int>(c.xs.size());
        lines.insert(lines.end(), c.ys.begin(), c.ys.end());
        const std::size_t pairs = inst.w1.size() * inst.w2.size();
        words = (pairs + 63) / 64;
        full.assign(words, 0);
        for (std::size_t p = 0; p < pairs; ++p) full[p / 64] |= std::uint64_t(1) << (p % 64);
        cover.assign(lines.size(), Mask(words, 0));
        for (std::size_t l = 0; l < lines.size(); ++l) {
            bool is_x = static_cast<int>(l) < nx;
            std::size_t p = 0;
            for (const auto& a : inst.w1)
                for (const auto& b : inst.w2) {
                    long long u = is_x ? a.x : a.y, v = is_x ? b.x : b.y;
                    if (std::min(u, v) < lines[l] && lines[l] < std::max(u, v))
                        cover[l][p / 64] |= std::uint64_t(1) << (p % 64);
                    ++p;
                }
        }
    }

    bool covers(const Mask& m) const { return m == full; }

    // Lexicographically first size-s subset whose smallest element is first.
    bool dfs(int start, int left, Mask& acc, std::vector<int>& chosen) const {
        if (left == 0) return covers(acc);
        const int L = static_cast<int>(lines.size());
        for (int l = start; l + left <= L; ++l) {
            Mask next = acc;
            for (std::size_t w = 0; w < words; ++w) next[w] |= cover[l][w];
            chosen.push_back(l);
            if (dfs(l + 1, left - 1, next, chosen)) {
                acc = next;
                return true;
            }
            chosen.pop_back();
        }
        return false;
    }

    std::optional<std::vector<int>> first_with_head(int head, int s) const {
        Mask acc = cover[head];
        std::vector<int> chosen{head};
        if (dfs(head + 1, s - 1, acc, chosen)) return chosen;
        return std::nullopt;
    }

    Separation to_sep(const std::vector<int>& chosen) const {
        Separation sep;
        for (int l : chosen) (l < nx ? sep.xs : sep.ys).push_back(lines[l]);
        sep.normalize_order();
        return sep;
    }
};

int max_size(const Search& s, std::optional<int> bound) {
    int L = static_cast<int>(s.lines.size());
    return bound ? std::min(*bound, L) : L;
}

}  // namespace

CandidateLines candidate_lines(const Instance& inst) {
    std::vector<long long> xs, ys;
    for (const auto& p : inst.all()) {
        xs.push_back(p.x);
        ys.push_back(p.y);
    }
    CandidateLines c;
    c.xs = gaps(xs);
    c.ys = gaps(ys);
    if (!xs.empty()) {
        c.outer_x_low = *std::min_element(xs.begin(), xs.end()) - 1;
        c.outer_x_high = *std::max_element(xs.begin(), xs.end()) + 1;
        c.outer_y_low = *std::min_element(ys.begin(), ys.end()) - 1;
        c.outer_y_high = *std::max_element(ys.begin(), ys.end()) + 1;
    }
    return c;
}

Separation min_separation_bruteforce(const Instance& inst, std::optional<int> upper_bound) {
    Search s(inst);
    if (s.covers(Mask(s.words, 0)) || s.words == 0) return {};
    const int top = max_size(s, upper_bound);
    const int L = static_cast<int>(s.lines.size());
    for (int size = 1; size <= top; ++size)
        for (int head = 0; head + size <= L; ++head)
            if (auto r = s.first_with_head(head, size)) return s.to_sep(*r);
    throw BoundExceeded("no separation within the bound");
}

Separation min_separation_bruteforce_parallel(const Instance& inst, std::optional<int> upper_bound) {
    Search s(inst);
    if (s.words == 0) return {};
    const int top = max_size(s, upper_bound);
    const int L = static_cast<int>(s.lines.size());
    for (int size = 1; size <= top; ++size) {
        std::vector<std::optional<std::vector<int>>> found(L);
        int best = std::numeric_limits<int>::max();
#pragma omp parallel for schedule(dynamic, 1) reduction(min : best)
        for (int head = 0; head <= L - size; ++head) {
            found[head] = s.first_with_head(head, size);
            if (found[head]) best = std::min(best, head);
        }
        if (best != std::numeric_limits<int>::max()) return s.to_sep(*found[best]);
    }
    throw BoundExceeded("no separation within the bound");
}

int min_separation_size_mod3(const Instance& inst) {
    if (inst.w1.empty() || inst.w2.empty()) return 0;
    long long lo_x = std::numeric_limits<long long>::max(), hi_x = 0, lo_y = lo_x, hi_y = 0;
    for (const auto& p : inst.all()) {
        lo_x = std::min(lo_x, p.x), hi_x = std::max(hi_x, p.x);
        lo_y = std::min(lo_y, p.y), hi_y = std::max(hi_y, p.y);
    }
    std::vector<std::pair<bool, long long>> lines;
    for (long long v = lo_x + 2; v < hi_x; v += 3) lines.push_back({true, v});
    for (long long v = lo_y + 2; v < hi_y; v += 3) lines.push_back({false, v});
    const int L = static_cast<int>(lines.size());
    if (L > 30) throw TooLarge("mod-3 oracle limited to 30 candidate lines");
    int best = std::numeric_limits<int>::max();
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << L); ++mask) {
        int pc = __builtin_popcountll(mask);
        if (pc >= best) continue;
        Separation sep;
        for (int l = 0; l < L; ++l)
            if (mask >> l & 1) (lines[l].first ? sep.xs : sep.ys).push_back(lines[l].second);
        if (verify_separation(inst, sep).ok) best = pc;
    }
    return best;
}

std::vector<Assignment> forest_csp_enumerate(const ForestCspInstance& inst, std::size_t cap) {
    std::vector<int> trees;
    double product = 1;
    for (int t = 0; t < static_cast<int>(inst.domain_size.size()); ++t) {
        if (inst.domain_size[t] < 0) continue;
        trees.push_back(t);
        product *= std::max(inst.domain_size[t], 0);
    }
    if (product > 1e6) throw TooLarge("forest CSP enumeration over 10^6 assignments");
    std::vector<Assignment> out;
    for (int t : trees)
        if (inst.domain_size[t] == 0) return out;
    // Variable order per tree: parent before child, with the edge used to reach it.
    const int V = inst.num_variable_slots();
    std::vector<std::vector<std::pair<int, int>>> adj(V);
    for (int e = 0; e < static_cast<int>(inst.edges.size()); ++e) {
        adj[inst.edges[e].u].push_back({inst.edges[e].v, e});
        adj[inst.edges[e].v].push_back({inst.edges[e].u, e});
    }
    std::vector<int> root(trees.size(), -1);
    std::vector<std::pair<int, int>> order;  // (variable, edge from its parent or -1)
    std::vector<int> reached_from(V, -2);
    for (std::size_t i = 0; i < trees.size(); ++i) {
        for (int v = 0; v < V; ++v)
            if (inst.tree_of[v] == trees[i]) {
                root[i] = v;
                break;
            }
        std::queue<int> q;
        q.push(root[i]);
        reached_from[root[i]] = -1;
        order.push_back({root[i], -1});
        while (!q.empty()) {
            int y = q.front();
            q.pop();
            for (auto [z, e] : adj[y]) {
                if (reached_from[z] != -2) continue;
                reached_from[z] = e;
                order.push_back({z, e});
                q.push(z);
            }
        }
    }
    std::vector<int> digit(trees.size(), 1);
    for (;;) {
        Assignment a(V, 0);
        std::size_t ti = 0;
        for (auto [v, e] : order) {
            if (e < 0) {
                a[v] = digit[ti++];
            } else {
                const auto& E = inst.edges[e];
                int from = E.u == v ? E.v : E.u;
                a[v] = E.g.apply(a[from]);
            }
        }
        bool ok = true;
        for (const auto& C : inst.constraints)
            if (!C.rel.contains(a[C.u], a[C.v])) {
                ok = false;
                break;
            }
        if (ok) {
            out.push_back(a);
            if (out.size() >= cap) return out;
        }
        std::size_t i = 0;
        while (i < trees.size() && digit[i] == inst.domain_size[trees[i]]) digit[i++] = 1;
        if (i == trees.size()) break;
        ++digit[i];
    }
    return out;
}

}  // namespace optdisc
