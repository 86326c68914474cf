// Branching phases: apx augmentation, layouts, line domains, cell types
// and color codings.

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "optdisc/errors.hpp"
#include "optdisc/reduction.hpp"

namespace optdisc {

namespace {

long long mod3(long long v) { return ((v % 3) + 3) % 3; }

std::pair<long long, long long> coord_range(const std::vector<Point>& pts, int axis) {
    long long lo = LLONG_MAX, hi = LLONG_MIN;
    for (const auto& p : pts) {
        long long c = axis == 0 ? p.x : p.y;
        lo = std::min(lo, c), hi = std::max(hi, c);
    }
    return {lo, hi};
}

// Index of the gap of sorted apx coordinates containing c.
int gap_of(const std::vector<long long>& apx, long long c) {
    return static_cast<int>(std::upper_bound(apx.begin(), apx.end(), c) - apx.begin()) - 1;
}

}  // namespace

int Layout::total() const {
    return std::accumulate(x.begin(), x.end(), 0) + std::accumulate(y.begin(), y.end(), 0);
}

long long top_line(const Instance& inst) {
    long long m = 3;
    for (const auto& p : inst.all()) m = std::max({m, p.x, p.y});
    return m + 1;
}

ApxPair apx_from_separation(const Instance& inst, const std::vector<long long>& xs,
                            const std::vector<long long>& ys) {
    const auto pts = inst.all();
    const long long top = top_line(inst);
    ApxPair out;
    for (int axis = 0; axis < 2; ++axis) {
        const auto& src = axis == 0 ? xs : ys;
        auto& dst = axis == 0 ? out.xs : out.ys;
        auto [lo, hi] = coord_range(pts, axis);
        dst = {1, top};
        for (long long v : src) {
            if (mod3(v) == 0) throw InvalidApprox("line on a point coordinate: " + std::to_string(v));
            if (mod3(v) == 2) --v;
            if (!pts.empty() && lo < v && v < hi) dst.push_back(v);
        }
        std::sort(dst.begin(), dst.end());
        dst.erase(std::unique(dst.begin(), dst.end()), dst.end());
    }
    std::vector<long long> ix(out.xs.begin() + 1, out.xs.end() - 1), iy(out.ys.begin() + 1, out.ys.end() - 1);
    if (!verify_separation(inst, Separation{ix, iy}).ok) throw InvalidApprox("lines do not separate the instance");
    return out;
}

std::vector<std::vector<int>> apx_classes(const Instance& inst, const ApxPair& apx) {
    const int gx = static_cast<int>(apx.xs.size()) - 1, gy = static_cast<int>(apx.ys.size()) - 1;
    std::vector<std::vector<int>> cls(gx, std::vector<int>(gy, 0));
    auto mark = [&](const std::vector<Point>& pts, int c) {
        for (const auto& p : pts) {
            int& v = cls[gap_of(apx.xs, p.x)][gap_of(apx.ys, p.y)];
            if (v != 0 && v != c) throw InvalidApprox("apx-supercell with both classes");
            v = c;
        }
    };
    mark(inst.w1, 1);
    mark(inst.w2, 2);
    return cls;
}

// ---------------------------------------------------------------- apx augmentation

std::vector<ApxPair> branch_A(const Instance& inst, const ApxPair& base, int depth) {
    const auto pts = inst.all();
    std::vector<ApxPair> out{base};
    if (pts.empty()) return out;
    const auto rx = coord_range(pts, 0), ry = coord_range(pts, 1);
    std::set<std::pair<std::vector<long long>, std::vector<long long>>> seen{{base.xs, base.ys}};
    std::vector<ApxPair> frontier{base};
    for (int d = 0; d < depth && !frontier.empty(); ++d) {
        std::vector<ApxPair> next;
        for (const auto& a : frontier) {
            std::map<std::pair<int, int>, std::vector<Point>> cells;
            for (const auto& p : pts) cells[{gap_of(a.xs, p.x), gap_of(a.ys, p.y)}].push_back(p);
            for (const auto& [key, cp] : cells)
                for (const auto& e : extremal_points(cp).distinct())
                    for (int axis = 0; axis < 2; ++axis) {
                        const long long c = axis == 0 ? e.x : e.y;
                        if (c == (axis == 0 ? rx.second : ry.second)) continue;
                        ApxPair b = a;
                        auto& line = axis == 0 ? b.xs : b.ys;
                        if (std::binary_search(line.begin(), line.end(), c + 1)) continue;
                        line.insert(std::upper_bound(line.begin(), line.end(), c + 1), c + 1);
                        if (seen.insert({b.xs, b.ys}).second) {
                            out.push_back(b);
                            next.push_back(b);
                        }
                    }
        }
        frontier = std::move(next);
    }
    return out;
}

// ---------------------------------------------------------------- layouts and line domains

std::vector<Layout> layouts(const ApxPair& apx, int k) {
    const int gx = static_cast<int>(apx.xs.size()) - 1, gy = static_cast<int>(apx.ys.size()) - 1;
    const int g = gx + gy;
    std::vector<Layout> out;
    std::vector<int> cur(g, 0);
    for (int total = 0; total <= k; ++total) {
        // Compositions of total into g parts, lexicographically.
        std::function<void(int, int)> rec = [&](int i, int left) {
            if (i == g - 1 || g == 0) {
                if (g == 0) {
                    if (left == 0) out.push_back({});
                    return;
                }
                cur[i] = left;
                Layout l;
                l.x.assign(cur.begin(), cur.begin() + gx);
                l.y.assign(cur.begin() + gx, cur.end());
                out.push_back(l);
                return;
            }
            for (int v = left; v >= 0; --v) {
                cur[i] = v;
                rec(i + 1, left - v);
            }
        };
        rec(0, total);
    }
    return out;
}

std::vector<Layout> feasible_layouts(const Instance& inst, const ApxPair& apx, const ApxPair& original, int k) {
    const auto pts = inst.all();
    std::array<std::vector<int>, 2> cap;
    for (int axis = 0; axis < 2; ++axis) {
        const auto& a = axis == 0 ? apx.xs : apx.ys;
        auto [lo, hi] = pts.empty() ? std::pair<long long, long long>{0, 0} : coord_range(pts, axis);
        for (std::size_t g = 0; g + 1 < a.size(); ++g) {
            int c = 0;
            for (long long v = a[g] + 1; v < a[g + 1]; v += 3)
                if (lo < v && v < hi) ++c;
            cap[axis].push_back(c);
        }
    }
    std::vector<Layout> out;
    for (auto& l : layouts(apx, k)) {
        bool ok = true;
        for (int axis = 0; axis < 2 && ok; ++axis) {
            const auto& cnt = axis == 0 ? l.x : l.y;
            const auto& a = axis == 0 ? apx.xs : apx.ys;
            const auto& o = axis == 0 ? original.xs : original.ys;
            for (std::size_t g = 0; g < cnt.size() && ok; ++g) ok = cnt[g] <= cap[axis][g];
            for (std::size_t i = 0; i < a.size() && ok; ++i) {
                if (std::binary_search(o.begin(), o.end(), a[i])) continue;
                // Inserted line i: opt lines on both sides before the nearest original lines.
                int left = 0, right = 0;
                for (int g = static_cast<int>(i) - 1; g >= 0; --g) {
                    left += cnt[g];
                    if (std::binary_search(o.begin(), o.end(), a[g])) break;
                }
                for (std::size_t g = i; g + 1 < a.size(); ++g) {
                    right += cnt[g];
                    if (std::binary_search(o.begin(), o.end(), a[g + 1])) break;
                }
                ok = left > 0 && right > 0;
            }
        }
        if (ok) out.push_back(std::move(l));
    }
    return out;
}

LineSystem skeleton(const ApxPair& apx, const Layout& layout, long long top) {
    LineSystem ls;
    ls.top = top;
    for (int axis = 0; axis < 2; ++axis) {
        const auto& a = axis == 0 ? apx.xs : apx.ys;
        const auto& cnt = axis == 0 ? layout.x : layout.y;
        auto& L = ls.axis(axis);
        for (std::size_t g = 0; g + 1 < a.size(); ++g) {
            L.push_back({true, a[g], {}});
            for (int t = 0; t < cnt[g]; ++t) L.push_back({false, 0, {}});
        }
        L.push_back({true, a.back(), {}});
    }
    return ls;
}

LineSystem initial_domains(LineSystem ls) {
    for (int axis = 0; axis < 2; ++axis) {
        auto& L = ls.axis(axis);
        long long prev = 0;
        for (std::size_t i = 0; i < L.size(); ++i) {
            if (L[i].apx) {
                prev = L[i].coord;
                continue;
            }
            std::size_t j = i;
            while (!L[j].apx) ++j;
            L[i].domain.clear();
            for (long long v = prev + 1; v < L[j].coord; v += 3) L[i].domain.push_back(v);
        }
    }
    return ls;
}

void trim_domains(LineSystem& ls, const Instance& inst) {
    const auto pts = inst.all();
    for (int axis = 0; axis < 2; ++axis) {
        auto [lo, hi] = pts.empty() ? std::pair<long long, long long>{0, 0} : coord_range(pts, axis);
        for (auto& l : ls.axis(axis)) {
            if (l.apx) continue;
            std::erase_if(l.domain, [&](long long v) { return !(lo < v && v < hi); });
        }
    }
}

// ---------------------------------------------------------------- cell types

namespace {

struct GapInfo {
    int first = 0, count = 0;  // line index of the apx line opening the gap; opt lines in it
};

std::vector<GapInfo> gaps_of(const std::vector<Line>& L) {
    std::vector<GapInfo> out;
    for (int i = 0; i + 1 < static_cast<int>(L.size()); ++i)
        if (L[i].apx) {
            GapInfo g{i, 0};
            for (int j = i + 1; !L[j].apx; ++j) ++g.count;
            out.push_back(g);
        }
    return out;
}

// Increasing tuples of values for the opt lines of a gap.
std::vector<std::vector<long long>> gap_tuples(const std::vector<Line>& L, const GapInfo& g) {
    std::vector<std::vector<long long>> out;
    std::vector<long long> cur;
    std::function<void(int)> rec = [&](int t) {
        if (t == g.count) {
            out.push_back(cur);
            return;
        }
        for (long long v : L[g.first + 1 + t].domain) {
            if (!cur.empty() && v <= cur.back()) continue;
            cur.push_back(v);
            rec(t + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

int rank_in(const std::vector<long long>& tuple, long long c) {
    return static_cast<int>(std::lower_bound(tuple.begin(), tuple.end(), c) - tuple.begin());
}

constexpr long long kRealizableProduct = 4096;

}  // namespace

std::vector<CellTypeMap> cell_type_maps(const LineSystem& ls, const Instance& inst, bool realizable) {
    ApxPair apx;
    for (const auto& l : ls.x)
        if (l.apx) apx.xs.push_back(l.coord);
    for (const auto& l : ls.y)
        if (l.apx) apx.ys.push_back(l.coord);
    const auto classes = apx_classes(inst, apx);
    const auto gx = gaps_of(ls.x), gy = gaps_of(ls.y);
    const int nx = ls.cells_x(), ny = ls.cells_y();

    // Opt-supercell coordinates of every cell column / row.
    std::vector<int> ox(nx), oy(ny);
    for (int i = 0, c = 0; i < nx; ++i) {
        if (i > 0 && !ls.x[i].apx) ++c;
        ox[i] = c;
    }
    for (int j = 0, c = 0; j < ny; ++j) {
        if (j > 0 && !ls.y[j].apx) ++c;
        oy[j] = c;
    }
    const int sx = ox.back() + 1, sy = oy.back() + 1;

    std::vector<std::vector<std::vector<long long>>> tx, ty;
    for (const auto& g : gx) tx.push_back(gap_tuples(ls.x, g));
    for (const auto& g : gy) ty.push_back(gap_tuples(ls.y, g));
    for (const auto& t : tx)
        if (t.empty()) return {};
    for (const auto& t : ty)
        if (t.empty()) return {};

    std::map<std::pair<int, int>, std::vector<Point>> sc_points;
    for (const auto& p : inst.all()) sc_points[{gap_of(apx.xs, p.x), gap_of(apx.ys, p.y)}].push_back(p);

    struct Super {
        int a, b, cls;
    };
    std::vector<Super> order;
    for (int a = 0; a < static_cast<int>(gx.size()); ++a)
        for (int b = 0; b < static_cast<int>(gy.size()); ++b)
            if (classes[a][b] != 0) order.push_back({a, b, classes[a][b]});

    CellTypeMap cur;
    cur.nx = nx, cur.ny = ny;
    cur.t.assign(static_cast<std::size_t>(nx * ny), 0);
    std::vector<int> opt_cls(static_cast<std::size_t>(sx * sy), 0);
    std::vector<int> opt_cnt(static_cast<std::size_t>(sx * sy), 0);
    std::vector<std::vector<char>> ax(tx.size()), ay(ty.size());
    for (std::size_t a = 0; a < tx.size(); ++a) ax[a].assign(tx[a].size(), 1);
    for (std::size_t b = 0; b < ty.size(); ++b) ay[b].assign(ty[b].size(), 1);

    std::vector<CellTypeMap> out;
    std::function<void(std::size_t)> rec = [&](std::size_t s) {
        if (s == order.size()) {
            out.push_back(cur);
            return;
        }
        const auto [a, b, c] = order[s];
        const int w = gx[a].count + 1, h = gy[b].count + 1;
        if (w * h > 63) throw std::logic_error("supercell with too many cells");
        // pattern -> compatible tuple indices on each side
        std::map<std::uint64_t, std::pair<std::vector<char>, std::vector<char>>> patterns;
        long long alive_x = std::count(ax[a].begin(), ax[a].end(), 1);
        long long alive_y = std::count(ay[b].begin(), ay[b].end(), 1);
        const bool exact = realizable && alive_x * alive_y <= kRealizableProduct;
        if (exact) {
            const auto& pts = sc_points[{a, b}];
            for (std::size_t u = 0; u < tx[a].size(); ++u) {
                if (!ax[a][u]) continue;
                for (std::size_t v = 0; v < ty[b].size(); ++v) {
                    if (!ay[b][v]) continue;
                    std::uint64_t mask = 0;
                    for (const auto& p : pts)
                        mask |= std::uint64_t{1} << (rank_in(tx[a][u], p.x) * h + rank_in(ty[b][v], p.y));
                    auto& e = patterns[mask];
                    if (e.first.empty()) e.first.assign(tx[a].size(), 0), e.second.assign(ty[b].size(), 0);
                    e.first[u] = 1, e.second[v] = 1;
                }
            }
        } else {
            for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << (w * h)); ++mask)
                patterns[mask] = {ax[a], ay[b]};
        }
        for (const auto& [mask, compat] : patterns) {
            // Apply the pattern, checking opt-supercell purity.
            std::vector<int> touched;
            bool ok = true;
            for (int u = 0; u < w && ok; ++u)
                for (int v = 0; v < h && ok; ++v) {
                    const int i = gx[a].first + u, j = gy[b].first + v;
                    const std::size_t o = static_cast<std::size_t>(ox[i] * sy + oy[j]);
                    if (!((mask >> (u * h + v)) & 1)) continue;
                    if (opt_cls[o] != 0 && opt_cls[o] != c) {
                        ok = false;
                        break;
                    }
                    opt_cls[o] = c;
                    ++opt_cnt[o];
                    touched.push_back(static_cast<int>(o));
                    cur.t[static_cast<std::size_t>(i * ny + j)] = static_cast<std::uint8_t>(c);
                }
            if (ok) {
                auto sx_save = ax[a], sy_save = ay[b];
                for (std::size_t u = 0; u < ax[a].size(); ++u) ax[a][u] = ax[a][u] && compat.first[u];
                for (std::size_t v = 0; v < ay[b].size(); ++v) ay[b][v] = ay[b][v] && compat.second[v];
                rec(s + 1);
                ax[a] = sx_save, ay[b] = sy_save;
            }
            for (int o : touched)
                if (--opt_cnt[o] == 0) opt_cls[o] = 0;
            for (int u = 0; u < w; ++u)
                for (int v = 0; v < h; ++v)
                    cur.t[static_cast<std::size_t>((gx[a].first + u) * ny + gy[b].first + v)] = 0;
        }
    };
    rec(0);
    return out;
}

// ---------------------------------------------------------------- color coding

std::vector<ColorCoding> color_codings(const Instance& inst, int num_cells, ColorMode mode, int trials,
                                       std::uint64_t seed, long long cap) {
    const int n = inst.n();
    std::vector<ColorCoding> out;
    if (num_cells <= 0) throw std::invalid_argument("color coding over no cells");
    if (mode == ColorMode::Randomized) {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> d(0, num_cells - 1);
        for (int t = 0; t < trials; ++t) {
            ColorCoding c;
            c.cell_of.resize(n);
            for (auto& v : c.cell_of) v = d(rng);
            out.push_back(std::move(c));
        }
        return out;
    }
    // F1: identity when n fits the range r^2, else (a x mod p) mod r^2.
    const long long r = 4LL * num_cells, range = r * r;
    std::vector<std::vector<long long>> f1;
    if (n <= range) {
        std::vector<long long> id(n);
        std::iota(id.begin(), id.end(), 0);
        f1.push_back(id);
    } else {
        long long p = n + 1;
        auto prime = [](long long q) {
            for (long long d = 2; d * d <= q; ++d)
                if (q % d == 0) return false;
            return q >= 2;
        };
        while (!prime(p)) ++p;
        for (long long a = 1; a < p; ++a) {
            std::vector<long long> h(n);
            for (int x = 0; x < n; ++x) h[x] = (a * (x + 1) % p) % range;
            f1.push_back(h);
        }
    }
    // F2: every map from the image of F1 to the cells.
    long long total = 0;
    for (const auto& h : f1) {
        std::set<long long> img(h.begin(), h.end());
        long long cnt = 1;
        for (std::size_t i = 0; i < img.size(); ++i) {
            cnt *= num_cells;
            if (cnt > cap) throw ExhaustiveTooLarge("splitter family exceeds the exhaustive cap");
        }
        total += cnt;
        if (total > cap) throw ExhaustiveTooLarge("splitter family exceeds the exhaustive cap");
    }
    for (const auto& h : f1) {
        std::vector<long long> img(h.begin(), h.end());
        std::sort(img.begin(), img.end());
        img.erase(std::unique(img.begin(), img.end()), img.end());
        std::vector<int> digits(img.size(), 0);
        while (true) {
            ColorCoding c;
            c.cell_of.resize(n);
            for (int x = 0; x < n; ++x)
                c.cell_of[x] = digits[std::lower_bound(img.begin(), img.end(), h[x]) - img.begin()];
            out.push_back(std::move(c));
            std::size_t i = 0;
            while (i < digits.size() && ++digits[i] == num_cells) digits[i++] = 0;
            if (i == digits.size()) break;
        }
    }
    return out;
}

int apparent_size_bound(int k) {
    const int kk = std::max(k, 1);
    return 32 * kk * kk;
}

}  // namespace optdisc
