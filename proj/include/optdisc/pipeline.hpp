#pragma once

// End-to-end driver: iterative compression around the per-branch reduction,
// and the minimization loop.

#include <optional>

#include "optdisc/geometry.hpp"
#include "optdisc/reduction.hpp"

namespace optdisc {

struct SolveOptions {
    ReductionOptions reduction;
    int jobs = 1;  // OpenMP threads for the branch fan-out; 1 runs the serial path
};

// Adds x-1, x+1, y-1, y+1 around p (p has coordinates = 0 mod 3).
Separation augment_separation(const Separation& sep, const Point& p);

// A separation of inst with at most k lines, given the separation (X0, Y0).
// Throws InvalidApprox when (X0, Y0) does not separate inst.
std::optional<Separation> compress(const Instance& inst, const Separation& start, int k,
                                   const SolveOptions& opt = {}, ReductionStats* stats = nullptr);

// Inserts the points of inst one at a time (w1 first), keeping a separation of
// the prefix with at most k lines.
std::optional<Separation> iterative_compression(const Instance& inst, int k, const SolveOptions& opt = {},
                                                ReductionStats* stats = nullptr);

// Same as iterative_compression; named for the decision problem.
std::optional<Separation> decide(const Instance& inst, int k, const SolveOptions& opt = {},
                                 ReductionStats* stats = nullptr);

// Minimum separation: the first k = 0, 1, ... that succeeds.
Separation solve_min(const Instance& inst, const SolveOptions& opt = {}, ReductionStats* stats = nullptr);

}  // namespace optdisc
