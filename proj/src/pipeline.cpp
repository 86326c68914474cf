#include "optdisc/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

#include "optdisc/errors.hpp"

namespace optdisc {

namespace {

void insert_sorted(std::vector<long long>& v, long long x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it == v.end() || *it != x) v.insert(it, x);
}

Separation checked(const Instance& inst, Separation sep) {
    sep.normalize_order();
    if (!verify_separation(inst, sep).ok) throw CompletenessViolation("pipeline produced a non-separation");
    return sep;
}

}  // namespace

Separation augment_separation(const Separation& sep, const Point& p) {
    Separation out = sep;
    out.normalize_order();
    insert_sorted(out.xs, p.x - 1);
    insert_sorted(out.xs, p.x + 1);
    insert_sorted(out.ys, p.y - 1);
    insert_sorted(out.ys, p.y + 1);
    return out;
}

std::optional<Separation> compress(const Instance& inst, const Separation& start, int k, const SolveOptions& opt,
                                   ReductionStats* stats) {
    if (!verify_separation(inst, start).ok) throw InvalidApprox("starting lines do not separate the instance");
    if (k < 0) return std::nullopt;
    if (start.size() <= k) return checked(inst, start);
    const ApxPair apx = apx_from_separation(inst, start.xs, start.ys);
    auto sep = compress_branches(inst, apx, k, opt.reduction, stats, opt.jobs);
    if (!sep) return std::nullopt;
    if (sep->size() > k) throw CompletenessViolation("compression returned too many lines");
    return checked(inst, *sep);
}

std::optional<Separation> iterative_compression(const Instance& inst, int k, const SolveOptions& opt,
                                                ReductionStats* stats) {
    if (k < 0) return std::nullopt;
    Instance prefix;
    Separation cur;
    const auto pts = inst.all();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        (i < inst.w1.size() ? prefix.w1 : prefix.w2).push_back(pts[i]);
        if (verify_separation(prefix, cur).ok) continue;
        auto next = compress(prefix, augment_separation(cur, pts[i]), k, opt, stats);
        if (!next) return std::nullopt;
        cur = *next;
    }
    return checked(inst, cur);
}

std::optional<Separation> decide(const Instance& inst, int k, const SolveOptions& opt, ReductionStats* stats) {
    return iterative_compression(inst, k, opt, stats);
}

Separation solve_min(const Instance& inst, const SolveOptions& opt, ReductionStats* stats) {
    for (int k = 0;; ++k)
        if (auto s = iterative_compression(inst, k, opt, stats)) return *s;
}

}  // namespace optdisc
