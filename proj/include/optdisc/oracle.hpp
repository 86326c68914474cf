#pragma once

// Brute-force ground truth for separations and forest CSPs.

#include <optional>
#include <vector>

#include "optdisc/forest_csp.hpp"
#include "optdisc/geometry.hpp"

namespace optdisc {

struct CandidateLines {
    // Integer line positions, one per gap between consecutive distinct
    // coordinates: floor of the midpoint. outer_* lie outside all points and
    // never separate anything, so the search skips them.
    std::vector<long long> xs, ys;
    long long outer_x_low = 0, outer_x_high = 0, outer_y_low = 0, outer_y_high = 0;
};

// Requires consecutive distinct coordinates to differ by at least 2 (true for
// normalized instances).
CandidateLines candidate_lines(const Instance& inst);

// Minimum separation by iterative deepening over subset size, lexicographically
// smallest among minimum subsets (x candidates ordered before y candidates).
// Throws BoundExceeded if upper_bound is given and the optimum exceeds it.
Separation min_separation_bruteforce(const Instance& inst, std::optional<int> upper_bound = std::nullopt);
// Same search with each subset-size level split across OpenMP threads.
Separation min_separation_bruteforce_parallel(const Instance& inst, std::optional<int> upper_bound = std::nullopt);

// Secondary oracle on normalized instances: candidates are all positions
// congruent to 2 mod 3 between the extreme coordinates.
int min_separation_size_mod3(const Instance& normalized);

// All satisfying assignments, at most cap of them. Throws TooLarge when the
// product of tree domain sizes exceeds 10^6.
std::vector<Assignment> forest_csp_enumerate(const ForestCspInstance& inst, std::size_t cap);

}  // namespace optdisc
