// Acceptance run: one PASS/FAIL line per headline criterion. Exit status is
// the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "optdisc/forest_csp.hpp"
#include "optdisc/geometry.hpp"
#include "optdisc/oracle.hpp"
#include "optdisc/pipeline.hpp"
#include "optdisc/reduction.hpp"
#include "optdisc/segrev.hpp"
#include "planted_strips.hpp"
#include "random_structures.hpp"

using namespace optdisc;

namespace {

// Pinned quantities.
constexpr int kOracleInstances = 500;
constexpr int kOraclePoints = 10;
constexpr int kOracleSide = 10;
constexpr double kOracleBudgetSeconds = 600.0;
constexpr int kForestInstances = 1000;
constexpr int kSegTrials = 10000;
constexpr int kMinHarvest = 200;
constexpr int kHarvestBlocks = 2;     // r of the planted strips
constexpr int kHarvestSeeds = 56;
constexpr int kScalingPoints = 40;
constexpr int kScalingRuns = 6;
constexpr double kScalingBudgetSeconds = 60.0;
constexpr int kSizeConstant = 32;     // C in apparent size <= C k^2

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
    std::printf("%s  %-24s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

template <class... A>
std::string fmt(const char* f, A... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

// Every separation any pipeline mode returns goes through here.
struct OutputLedger {
    long long checked = 0, failed = 0;
    void check(const Instance& inst, const Separation& s) {
        ++checked;
        if (!verify_separation(inst, s).ok) ++failed;
    }
} outputs;

// Largest apparent size seen, relative to k^2.
struct SizeLedger {
    double worst = 0;
    int worst_size = 0, worst_k = 0;
    long long runs = 0;
    void add(const ReductionStats& st, int k) {
        if (st.max_apparent_size == 0) return;
        ++runs;
        const int kk = std::max(k, 1);
        const double ratio = static_cast<double>(st.max_apparent_size) / (kk * kk);
        if (ratio > worst) worst = ratio, worst_size = st.max_apparent_size, worst_k = kk;
    }
} sizes;

// ------------------------------------------------------------ oracle equivalence

void oracle_equivalence() {
    int matched = 0;
    const auto t0 = Clock::now();
    for (int seed = 1; seed <= kOracleInstances; ++seed) {
        auto inst = normalize(generate_random(seed, kOraclePoints, kOracleSide)).inst;
        ReductionStats st;
        SolveOptions o;
        o.reduction.mode = ColorMode::Exhaustive;
        auto s = solve_min(inst, o, &st);
        outputs.check(inst, s);
        sizes.add(st, s.size());
        if (s.size() == min_separation_bruteforce(inst).size()) ++matched;
        else std::printf("      oracle mismatch at seed %d\n", seed);
    }
    const double dt = seconds_since(t0);
    report(matched == kOracleInstances && dt <= kOracleBudgetSeconds, "oracle_equivalence",
           fmt("%d/%d optimum sizes match brute force, %.1f s (limit %.0f s)", matched, kOracleInstances, dt,
               kOracleBudgetSeconds));
}

// ------------------------------------------------------------ forest CSP

void forest_csp_correctness() {
    std::mt19937_64 rng(20240601);
    int agree = 0, sat = 0, bad_assign = 0;
    for (int t = 0; t < kForestInstances; ++t) {
        auto inst = testing_support::random_forest_csp(rng, 4, 6, 8, 5);
        const bool expect = !forest_csp_enumerate(inst, 1).empty();
        auto r = solve(inst);
        if (static_cast<bool>(r) == expect) ++agree;
        if (r) {
            ++sat;
            if (!verify_assignment(inst, *r).ok) ++bad_assign;
        }
    }
    report(agree == kForestInstances && bad_assign == 0, "forest_csp_solver",
           fmt("%d/%d verdicts match enumeration (%d sat), %d bad assignments", agree, kForestInstances, sat,
               bad_assign));
}

// ------------------------------------------------------------ segment machinery

void segment_identities() {
    std::mt19937_64 rng(777);
    long long inv_fail = 0, swap_fail = 0, dc_fail = 0, rep_fail = 0;
    for (int t = 0; t < kSegTrials; ++t) {
        const int m = 1 + t % 16;
        auto g = testing_support::random_reversion(rng, m);
        for (int x = 1; x <= m; ++x)
            if (g.apply(g.apply(x)) != x) ++inv_fail;
    }
    for (int t = 0; t < kSegTrials; ++t) {
        const int m1 = 1 + t % 12, m2 = 1 + (t / 12) % 12;
        auto f = testing_support::random_nondecreasing(rng, m1, m2);
        auto g = testing_support::random_reversion(rng, m2);
        auto r = seg_swap(f, g);
        bool ok = is_nondecreasing(r.f_prime);
        for (int x = 1; x <= m1 && ok; ++x) ok = g.apply(f[x - 1]) == r.f_prime[r.g_prime.apply(x) - 1];
        if (!ok) ++swap_fail;
    }
    for (int t = 0; t < kSegTrials; ++t) {
        const int m1 = 1 + t % 10, m2 = 1 + (t / 10) % 10, m3 = 1 + (t / 100) % 10;
        auto f = testing_support::random_nondecreasing(rng, m1, m2);
        auto rel = testing_support::random_relation(rng, m2, m3);
        auto c = dc_compose(f, rel);
        bool ok = true;
        for (int a = 1; a < m1 && ok; ++a) ok = c.frontier_at(a) >= c.frontier_at(a + 1);
        for (int x = 1; x <= m1 && ok; ++x)
            for (int y = 1; y <= m3 && ok; ++y) ok = c.contains(x, y) == rel.contains(f[x - 1], y);
        if (!ok) ++dc_fail;
    }
    for (int t = 0; t < kSegTrials; ++t) {
        auto fam = testing_support::random_leaf_family(rng, 1 + t % 10, 1 + t % 4, true);
        auto r = make_seg_rep(fam.tree, fam.fns, true);
        bool ok = true;
        for (int v = 0; v < fam.tree.size() && ok; ++v) {
            if (!fam.tree.is_leaf(v) || fam.tree.parent[v] < 0) continue;
            ok = is_strictly_increasing(r.f_hat[v]);
            auto ch = r.chain(fam.tree, v);
            for (int x = 1; x <= fam.tree.m && ok; ++x) {
                int y = x;
                for (const auto& h : ch) y = h.apply(y);
                ok = fam.fns[v][x - 1] == r.f_hat[v][y - 1];
            }
        }
        if (!ok) ++rep_fail;
    }
    report(inv_fail + swap_fail + dc_fail + rep_fail == 0, "segment_identities",
           fmt("%d trials each; failures: involution %lld, seg_swap %lld, dc_compose %lld, make_seg_rep %lld",
               kSegTrials, inv_fail, swap_fail, dc_fail, rep_fail));
}

// ------------------------------------------------------------ harvested situations

struct Harvested {
    int seed = 0;
    SituationView view;
    std::vector<char> alive1, alive2;
    BlockTree tree;
};

std::vector<Harvested> harvest(long long* structure_violations, double* seconds) {
    std::vector<Harvested> out;
    const auto t0 = Clock::now();
    for (int seed = 1; seed <= kHarvestSeeds; ++seed) {
        auto ps = testing_support::planted_strip(seed, kHarvestBlocks, 2 + seed % 3);
        ReductionOptions opt;
        opt.exhaust = true;
        opt.on_gadget = [&](const GadgetRecord& rec) {
            out.push_back({seed, rec.view, rec.alive1, rec.alive2, rec.epochs.tree});
        };
        ReductionStats st;
        auto s = process_layout(ps.inst, ps.apx, ps.layout, ps.k, opt, &st);
        if (s) outputs.check(ps.inst, *s);
        sizes.add(st, ps.k);
        *structure_violations += st.structure_violations;
    }
    *seconds = seconds_since(t0);
    return out;
}

// Fit recomputed from the view points: the points strictly between x1 and x2,
// ordered by y, reduce to (12)^r with no class tie at equal y.
bool fits(const SituationView& v, long long x1, long long x2) {
    std::vector<ViewPoint> sel;
    for (const auto& p : v.pts)
        if (x1 < p.x && p.x < x2) sel.push_back(p);
    std::sort(sel.begin(), sel.end(), [](const ViewPoint& a, const ViewPoint& b) {
        return std::tie(a.y, a.x) < std::tie(b.y, b.x);
    });
    std::vector<int> red;
    for (std::size_t i = 0; i < sel.size(); ++i) {
        if (i > 0 && sel[i].y == sel[i - 1].y && sel[i].cls != sel[i - 1].cls) return false;
        if (red.empty() || red.back() != sel[i].cls) red.push_back(sel[i].cls);
    }
    return red == v.target;
}

struct AltCounts {
    long long pairs = 0, mismatch = 0, gaps = 0, nonmono = 0;
};

// Fitting set of each value is contiguous in the other domain; its end points
// are nondecreasing. Checked over the full view domains.
void check_alternation(const SituationView& v, AltCounts& c) {
    const auto& V1 = v.p1.values;
    const auto& V2 = v.p2.values;
    std::vector<std::vector<char>> F(V1.size(), std::vector<char>(V2.size()));
    for (std::size_t a = 0; a < V1.size(); ++a)
        for (std::size_t b = 0; b < V2.size(); ++b) {
            F[a][b] = fits(v, V1[a], V2[b]);
            if (static_cast<bool>(F[a][b]) != fits_view(v, V1[a], V2[b])) ++c.mismatch;
            ++c.pairs;
        }
    auto scan = [&](std::size_t outer, std::size_t inner, auto at) {
        long long prev_lo = -1, prev_hi = -1;
        for (std::size_t a = 0; a < outer; ++a) {
            long long lo = -1, hi = -1;
            for (std::size_t b = 0; b < inner; ++b)
                if (at(a, b)) {
                    if (lo < 0) lo = b;
                    else if (hi != static_cast<long long>(b) - 1) ++c.gaps;
                    hi = b;
                }
            if (lo < 0) continue;
            if (prev_lo >= 0 && (lo < prev_lo || hi < prev_hi)) ++c.nonmono;
            prev_lo = lo, prev_hi = hi;
        }
    };
    scan(V1.size(), V2.size(), [&](std::size_t a, std::size_t b) { return F[a][b] != 0; });
    scan(V2.size(), V1.size(), [&](std::size_t b, std::size_t a) { return F[a][b] != 0; });
}

struct BlockCounts {
    long long values = 0, bad_blocks = 0, shared_leaders = 0, unnested = 0, extent_order = 0, epochs = 0, chains = 0;
};

// Red blocks at x1, computed at the smallest alive x2 that fits.
std::optional<std::vector<std::vector<int>>> red_blocks(const Harvested& h, long long x1) {
    const auto& v = h.view;
    for (std::size_t b = 0; b < v.p2.values.size(); ++b) {
        if (!h.alive2[b] || !fits(v, x1, v.p2.values[b])) continue;
        const long long x2 = v.p2.values[b];
        std::vector<int> idx;
        for (int i = 0; i < static_cast<int>(v.pts.size()); ++i)
            if (x1 < v.pts[i].x && v.pts[i].x < x2) idx.push_back(i);
        std::sort(idx.begin(), idx.end(), [&](int a, int c) {
            return std::tie(v.pts[a].y, v.pts[a].x) < std::tie(v.pts[c].y, v.pts[c].x);
        });
        std::vector<std::vector<int>> blocks;
        int prev = 0;
        for (int i : idx) {
            if (v.pts[i].cls == 1) {
                if (prev != 1) blocks.emplace_back();
                blocks.back().push_back(i);
            }
            prev = v.pts[i].cls;
        }
        return blocks;
    }
    return std::nullopt;
}

void check_blocks(const Harvested& h, BlockCounts& c) {
    const auto& v = h.view;
    const int r = v.r;
    std::vector<std::vector<std::vector<int>>> B;  // per alive x1, ascending
    std::vector<std::vector<int>> lead;
    for (std::size_t a = 0; a < v.p1.values.size(); ++a) {
        if (!h.alive1[a]) continue;
        ++c.values;
        auto blocks = red_blocks(h, v.p1.values[a]);
        if (!blocks || static_cast<int>(blocks->size()) != r) {
            ++c.bad_blocks;
            return;
        }
        std::vector<int> l;
        for (const auto& blk : *blocks) {
            int best = blk.front();
            for (int i : blk)
                if (std::tie(v.pts[i].x, v.pts[i].y) > std::tie(v.pts[best].x, v.pts[best].y)) best = i;
            l.push_back(best);
        }
        B.push_back(*blocks);
        lead.push_back(l);
    }
    const int m = static_cast<int>(B.size());

    // Leaders are never shared between block indices.
    std::map<int, int> led;
    for (int a = 0; a < m; ++a)
        for (int j = 0; j < r; ++j) {
            auto [it, fresh] = led.insert({lead[a][j], j});
            if (!fresh && it->second != j) ++c.shared_leaders;
        }

    // Every block at a larger x1 lies inside one block at a smaller x1.
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) {
            std::map<int, int> where;
            for (int j = 0; j < r; ++j)
                for (int i : B[a][j]) where[i] = j;
            for (int j = 0; j < r; ++j) {
                std::set<int> hosts;
                for (int i : B[b][j]) {
                    auto it = where.find(i);
                    hosts.insert(it == where.end() ? -1 : it->second);
                }
                if (hosts.size() != 1 || *hosts.begin() < 0) ++c.unnested;
            }
        }

    // Epochs: maximal runs of a constant leader. Within an epoch of the
    // parent, the y extents of the child's subtree over its epochs are
    // disjoint and, right to left, descend when the child sits below the
    // parent and ascend when it sits above.
    std::vector<std::vector<std::pair<int, int>>> ep(r);
    for (int j = 0; j < r; ++j)
        for (int a = 0; a < m; ++a) {
            if (a == 0 || lead[a][j] != lead[a - 1][j]) ep[j].push_back({a, a});
            else ep[j].back().second = a;
        }
    for (int j = 0; j < r; ++j) c.epochs += ep[j].size();
    std::vector<std::vector<int>> sub(r);
    for (int j = 0; j < r; ++j)
        for (int d = j; d >= 0; d = h.tree.parent[d]) sub[d].push_back(j);
    auto extent = [&](int j, std::pair<int, int> e) {
        long long lo = LLONG_MAX, hi = LLONG_MIN;
        for (int a = e.first; a <= e.second; ++a)
            for (int d : sub[j])
                for (int i : B[a][d]) lo = std::min(lo, v.pts[i].y), hi = std::max(hi, v.pts[i].y);
        return std::pair{lo, hi};
    };
    for (int j = 0; j < r; ++j) {
        const int q = h.tree.parent[j];
        if (q < 0) continue;
        for (const auto& pe : ep[q]) {
            std::vector<std::pair<long long, long long>> seq;
            for (auto it = ep[j].rbegin(); it != ep[j].rend(); ++it) {
                const bool inside = it->first >= pe.first && it->second <= pe.second;
                const bool outside = it->second < pe.first || it->first > pe.second;
                if (!inside && !outside) ++c.extent_order;  // child epoch straddles a parent epoch
                if (inside) seq.push_back(extent(j, *it));
            }
            if (seq.size() > 1) ++c.chains;
            for (std::size_t i = 1; i < seq.size(); ++i) {
                const bool ok = j < q ? seq[i].second < seq[i - 1].first : seq[i].first > seq[i - 1].second;
                if (!ok) ++c.extent_order;
            }
        }
    }
}

void harvested_structure() {
    long long sv = 0;
    double dt = 0;
    auto recs = harvest(&sv, &dt);
    std::set<std::tuple<int, int, int, int, int, std::vector<char>, std::vector<char>>> distinct;
    for (const auto& h : recs)
        distinct.insert({h.seed, h.view.p1.line, h.view.p2.line, h.view.lambda.front().line,
                         h.view.lambda.back().line, h.alive1, h.alive2});
    const int n = static_cast<int>(distinct.size());

    AltCounts ac;
    BlockCounts cc;
    for (const auto& h : recs) {
        check_alternation(h.view, ac);
        check_blocks(h, cc);
    }
    std::printf("      harvest: %zu gadget records, %d distinct situations, %.1f s, %lld structure violations\n",
                recs.size(), n, dt, sv);
    const long long alt_bad = ac.mismatch + ac.gaps + ac.nonmono;
    report(n >= kMinHarvest && alt_bad == 0 && sv == 0, "alternation_structure",
           fmt("%d situations (need %d), %lld pairs; fit mismatches %lld, gaps %lld, non-monotone ends %lld",
               n, kMinHarvest, ac.pairs, ac.mismatch, ac.gaps, ac.nonmono));
    const long long block_bad = cc.bad_blocks + cc.shared_leaders + cc.unnested + cc.extent_order;
    // cc.chains counts parent epochs holding several child epochs, where the
    // monotone-extent check has something to test.
    report(n >= kMinHarvest && block_bad == 0 && sv == 0 && cc.chains > 0, "block_epoch_structure",
           fmt("%lld p1 values, %lld epochs, %lld parent chains; bad block counts %lld, shared leaders %lld, "
               "unnested blocks %lld, extent order %lld",
               cc.values, cc.epochs, cc.chains, cc.bad_blocks, cc.shared_leaders, cc.unnested, cc.extent_order));
}

// ------------------------------------------------------------ figure

// One apx cell of reds and blues alternating up a column, plus two reds to
// the right level with the blues. The optimum has three horizontal lines and
// one vertical line p; right of p the band between the second and third
// horizontal lines is empty while the bands below and above it are not.
void empty_band_figure() {
    Instance raw;
    raw.w1 = {{1, 10, 1}, {1, 30, 1}, {6, 20, 1}, {6, 40, 1}};
    raw.w2 = {{1, 20, 2}, {1, 40, 2}};
    auto inst = normalize(raw).inst;

    auto striped_ok = [&](const Separation& s) {
        if (s.xs.size() != 1 || s.ys.size() != 3) return false;
        auto ys = s.ys;
        std::sort(ys.begin(), ys.end());
        auto count = [&](long long lo, long long hi) {
            int c = 0;
            for (const auto& p : inst.all())
                if (p.x > s.xs[0] && lo < p.y && p.y < hi) ++c;
            return c;
        };
        return count(ys[1], ys[2]) == 0 && count(ys[0], ys[1]) > 0 && count(ys[2], LLONG_MAX) > 0;
    };

    // Every optimal separation over the candidate lines.
    const int opt = min_separation_bruteforce(inst).size();
    auto cand = candidate_lines(inst);
    const int nx = cand.xs.size(), total = nx + cand.ys.size();
    int optimal = 0, optimal_striped = 0;
    for (int mask = 0; mask < (1 << total); ++mask) {
        if (__builtin_popcount(mask) != opt) continue;
        Separation s;
        for (int i = 0; i < total; ++i)
            if (mask >> i & 1) (i < nx ? s.xs.push_back(cand.xs[i]) : s.ys.push_back(cand.ys[i - nx]));
        if (!verify_separation(inst, s).ok) continue;
        ++optimal;
        if (striped_ok(s)) ++optimal_striped;
    }

    bool solved_ok = true;
    for (auto mode : {ColorMode::Exhaustive, ColorMode::Randomized}) {
        SolveOptions o;
        o.reduction.mode = mode;
        ReductionStats st;
        auto s = solve_min(inst, o, &st);
        outputs.check(inst, s);
        sizes.add(st, s.size());
        solved_ok = solved_ok && s.size() == opt && striped_ok(s);
    }
    report(solved_ok && optimal > 0 && optimal == optimal_striped, "empty_band_figure",
           fmt("optimum %d (brute force), %d optimal separations, %d leave the band right of p empty; solver "
               "agrees: %s",
               opt, optimal, optimal_striped, solved_ok ? "yes" : "no"));
}

// ------------------------------------------------------------ scaling

void scaling() {
    // Planted grids with four lines and exactly kScalingPoints points.
    const int shapes[3][2] = {{3, 1}, {1, 3}, {4, 0}};
    double worst = 0;
    int solved = 0, max_opt = 0, runs = 0;
    for (std::uint64_t seed = 100; runs < kScalingRuns; ++seed) {
        const auto [kx, ky] = shapes[runs % 3];
        const int cells = (kx + 1) * (ky + 1);
        auto raw = generate_planted(seed, kx, ky, kScalingPoints / cells);
        if (raw.n() != kScalingPoints) continue;
        ++runs;
        auto inst = normalize(raw).inst;
        SolveOptions o;
        o.reduction.mode = ColorMode::Randomized;
        o.reduction.seed = seed;
        ReductionStats st;
        const auto t0 = Clock::now();
        auto s = solve_min(inst, o, &st);
        const double dt = seconds_since(t0);
        outputs.check(inst, s);
        sizes.add(st, s.size());
        worst = std::max(worst, dt);
        max_opt = std::max(max_opt, s.size());
        if (s.size() <= kx + ky && dt < kScalingBudgetSeconds) ++solved;
    }
    report(solved == kScalingRuns, "scaling_n40",
           fmt("%d/%d planted n=%d runs (k <= 4, randomized) under %.0f s; slowest %.2f s, largest optimum %d",
               solved, kScalingRuns, kScalingPoints, kScalingBudgetSeconds, worst, max_opt));
}

}  // namespace

int main() {
    oracle_equivalence();
    forest_csp_correctness();
    segment_identities();
    harvested_structure();
    empty_band_figure();
    scaling();
    report(outputs.checked > 0 && outputs.failed == 0, "verified_outputs",
           fmt("%lld separations from every mode re-checked, %lld invalid", outputs.checked, outputs.failed));
    report(sizes.runs > 0 && sizes.worst <= kSizeConstant, "apparent_size_bound",
           fmt("max apparent size / k^2 = %.2f (size %d at k=%d) over %lld runs, C = %d", sizes.worst,
               sizes.worst_size, sizes.worst_k, sizes.runs, kSizeConstant));
    return failures;
}
