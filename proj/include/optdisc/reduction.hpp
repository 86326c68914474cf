#pragma once

// Branching and constraint construction for one compression step: given a
// separation (X0, Y0) of a normalized instance and a budget k, enumerate the
// branches (apx augmentation, layout, cell types, colorings, situation
// guesses) and turn each surviving branch into a forest CSP whose solutions
// map back to separations with at most k lines.
//
// Coordinates follow the normalized grid: points sit on multiples of 3, apx
// lines on values = 1 (mod 3), candidate opt lines on values = 2 (mod 3).

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "optdisc/forest_csp.hpp"
#include "optdisc/geometry.hpp"
#include "optdisc/segrev.hpp"

namespace optdisc {

enum class ColorMode { Exhaustive, Randomized };

struct ReductionStats {
    long long apx_sets = 0;
    long long layouts = 0;
    long long cell_maps = 0;
    long long csp_instances = 0;
    long long rejected = 0;
    int max_apparent_size = 0;
    int max_alternation = 0;
    long long structure_violations = 0;
    long long gadgets = 0;  // alternating-lines gadgets hung on emitted instances
};

struct SituationView;
struct EpochStructure;
struct Gadget;

// What a gadget was built from: the view, the alive p1 / p2 masks in view
// order, and the verified block and epoch structure.
struct GadgetRecord {
    const SituationView& view;
    const std::vector<char>& alive1;
    const std::vector<char>& alive2;
    const EpochStructure& epochs;
    const Gadget& gadget;
};

struct ReductionOptions {
    ColorMode mode = ColorMode::Exhaustive;
    int trials = 0;  // randomized mode; 0 means the default count
    std::uint64_t seed = 1;
    long long exhaustive_cap = 1 << 16;  // literal splitter family only
    // One JSON object per line for every branch reaching the situation stage.
    std::ostream* trace = nullptr;
    // Keep going through the cell type maps of a layout after a success.
    bool exhaust = false;
    // Called for every gadget before it is emitted, concurrently when jobs > 1.
    std::function<void(const GadgetRecord&)> on_gadget;
};

// ---- Apx augmentation

struct ApxPair {
    std::vector<long long> xs, ys;  // sorted, = 1 mod 3, with 1 and top present
    bool operator==(const ApxPair&) const = default;
};

// Sentinel top line: one above the largest coordinate (3n+1 when both axes
// use all n ranks).
long long top_line(const Instance& inst);

// Apx lines from an arbitrary separation: values = 2 mod 3 move down by one,
// lines outside the point range are dropped and the sentinels are added.
// Throws InvalidApprox on values = 0 mod 3.
ApxPair apx_from_separation(const Instance& inst, const std::vector<long long>& xs,
                            const std::vector<long long>& ys);

// All pairs reachable by at most depth insertions of x+1 / y+1 for an extremal
// point of a nonempty apx-supercell, the input pair first, without duplicates.
// Insertions at the extreme coordinates of an axis are skipped: they can only
// be justified by a line outside the point range.
std::vector<ApxPair> branch_A(const Instance& inst, const ApxPair& base, int depth);

// ---- Layouts and line domains

struct Layout {
    std::vector<int> x, y;  // number of opt lines per apx gap
    int total() const;
};

// Every composition of kx into the x-gaps and ky into the y-gaps, kx+ky <= k.
std::vector<Layout> layouts(const ApxPair& apx, int k);
// Subset of layouts that fit the gap capacities and give every line inserted
// by augmentation (present in apx, absent from original) an opt line on both sides
// before the nearest original line.
std::vector<Layout> feasible_layouts(const Instance& inst, const ApxPair& apx, const ApxPair& original, int k);

struct Line {
    bool apx = true;
    long long coord = 0;              // apx lines
    std::vector<long long> domain;    // opt lines, ascending
};

struct LineSystem {
    std::vector<Line> x, y;
    long long top = 0;
    const std::vector<Line>& axis(int a) const { return a == 0 ? x : y; }
    std::vector<Line>& axis(int a) { return a == 0 ? x : y; }
    int cells_x() const { return static_cast<int>(x.size()) - 1; }
    int cells_y() const { return static_cast<int>(y.size()) - 1; }
    int num_cells() const { return cells_x() * cells_y(); }
    int cell_id(int i, int j) const { return i * cells_y() + j; }
};

LineSystem skeleton(const ApxPair& apx, const Layout& layout, long long top);
// D_l = values = 2 mod 3 strictly between the neighbouring apx coordinates.
LineSystem initial_domains(LineSystem ls);
// Drops domain values outside the open range spanned by the point coordinates
// (such lines separate nothing, so inclusion-minimal solutions avoid them).
void trim_domains(LineSystem& ls, const Instance& inst);

// ---- Cell types

struct CellTypeMap {
    int nx = 0, ny = 0;
    std::vector<std::uint8_t> t;  // t[i*ny + j]
    int at(int i, int j) const { return t[static_cast<std::size_t>(i * ny + j)]; }
};

// Class of every apx-supercell (0 empty, 1, 2), indexed [gx][gy].
std::vector<std::vector<int>> apx_classes(const Instance& inst, const ApxPair& apx);

// Every map consistent with apx classes, opt-supercell purity and the
// nonempty-apx-supercell rule. With realizable = true only patterns that some
// placement of the opt lines of each supercell produces are generated, and
// the placements are kept consistent along shared gaps.
std::vector<CellTypeMap> cell_type_maps(const LineSystem& ls, const Instance& inst, bool realizable = false);

// ---- Color coding

struct ColorCoding {
    std::vector<int> cell_of;  // per point of inst.all()
};

// Randomized: trials seeded uniform maps. Exhaustive: the composed splitter
// family, throws ExhaustiveTooLarge when it exceeds cap.
std::vector<ColorCoding> color_codings(const Instance& inst, int num_cells, ColorMode mode, int trials,
                                       std::uint64_t seed, long long cap);

// ---- Situations

struct Situation {
    int axis = 0;         // axis of p1, p2 (0: vertical lines)
    int p1 = 0, p2 = 0;   // line indices on that axis
    int l1 = 0, l2 = 0;   // consecutive apx lines on the other axis
    std::vector<int> lprime;   // L'_sigma: l1 then opt lines between, ascending
    std::vector<int> seq;      // delta(area(l)) for l in lprime
    std::vector<int> alt_lines;  // lines of the reduced sequence
    std::vector<int> reduced;    // reduced sequence
    int alternation() const { return static_cast<int>(reduced.size()); }
};

struct SituationList {
    std::vector<Situation> items;
    bool rejected = false;
    std::string reason;
};

SituationList situation_list(const LineSystem& ls, const CellTypeMap& delta, const Instance& inst);

struct PointsAlternation {
    bool infinite = false;
    std::vector<int> reduced;
    int length() const { return infinite ? -1 : static_cast<int>(reduced.size()); }
};

// Alternation of the points with along strictly inside (a1, a2) and across
// strictly inside (c1, c2). axis 0 means along = x.
PointsAlternation alternation_of_points(const Instance& inst, int axis, long long a1, long long a2, long long c1,
                                        long long c2);

bool is_subsequence(const std::vector<int>& small, const std::vector<int>& big);

struct FitProfile {
    // fit[a][b]: value a of p1 with value b of p2 (0-based, ascending values).
    std::vector<std::vector<char>> fit;
    std::vector<std::vector<char>> too_small;  // type (a) among non-fitting
    std::vector<long long> v1, v2;
};

FitProfile fit_profile(const Instance& inst, const LineSystem& ls, const Situation& s,
                       const std::vector<long long>& v1, const std::vector<long long>& v2);

// Two clause relations whose conjunction admits exactly the fitting pairs.
std::vector<ClauseRelation> alternation_constraint(const FitProfile& fp);

// ---- Canonical views of a situation

struct ViewPoint {
    long long x = 0, y = 0;
    int cls = 1;
    int id = 0;  // index into inst.all()
};

struct ViewLine {
    int line = -1;        // index on its axis in the line system
    int var = -1;         // opt variable, -1 for apx lines
    bool reversed = false;  // view index order is the reverse of the original
    std::vector<long long> values;  // view coordinates, ascending
};

struct SituationView {
    std::vector<ViewPoint> pts;  // strictly between the two apx lines
    ViewLine p1, p2;
    long long y_lo = 0, y_hi = 0;
    std::vector<ViewLine> lambda;  // 2r+1 lines bounding the 2r blocks
    int r = 0;
    std::vector<int> target;       // (12)^r
    // Original abstract cell ids allowed as leader cells for red block i.
    std::vector<std::vector<int>> band_cells;
};

struct ViewTransform {
    bool transpose = false, mirror = false, swap = false, reflect = false;
};

// Canonical view of a situation of alternation >= 4 (red = class 1 on the
// left, reduced sequence (12)^r), and the view rotated by 180 degrees with
// classes swapped, whose red blocks are the blue blocks of the first.
SituationView make_view(const Instance& inst, const LineSystem& ls, const CellTypeMap& delta, const Situation& s,
                        const std::vector<int>& var_of_x, const std::vector<int>& var_of_y, bool rotated);
ViewTransform canonical_transform(const LineSystem& ls, const CellTypeMap& delta, const Instance& inst,
                                  const Situation& s);

struct BlockView {
    std::vector<std::vector<int>> blocks;  // red blocks bottom-to-top, point indices into view.pts
    std::vector<int> leaders;              // rightmost of each block
    int partner = -1;                      // view index of the p2 value used
};

// Red blocks at view index a of p1, computed at the first fitting alive p2
// value. alive masks are in view order. nullopt if no p2 value fits.
std::optional<BlockView> blocks_and_leaders(const SituationView& v, int a, const std::vector<char>& alive1,
                                            const std::vector<char>& alive2);
bool fits_view(const SituationView& v, long long x1, long long x2);

struct SituationGuess {
    std::vector<int> pi1, pi2;        // 0-based block indices, pi[0] rightmost / leftmost
    std::vector<int> cell1, cell2;    // leader cell per block
};

// Full enumeration of permutations and admissible cells (blue cells from the
// rotated view).
std::vector<SituationGuess> situation_guesses(const SituationView& red, const SituationView& blue);

// Keeps x1 whose leaders are ordered by pi (rightmost first) and whose leader
// of block i is mapped to cells[i]. Returns the filtered view-order mask.
std::vector<char> extremal_order_filter(const SituationView& v, const std::vector<char>& alive1,
                                        const std::vector<char>& alive2, const std::vector<int>& pi,
                                        const std::vector<int>& cells, const std::vector<int>& cell_of_point);

struct BlockTree {
    int root = 0;
    std::vector<int> parent;  // -1 at the root
};

BlockTree build_block_tree(const std::vector<int>& pi1, const std::vector<int>& pi2);

struct EpochStructure {
    BlockTree tree;
    int m = 0;                            // alive p1 values (view order)
    std::vector<long long> x1;            // their view coordinates
    std::vector<SegmentPartition> epochs;  // per block
    std::vector<Table> top, bottom;        // f_up, f_down per block, view y
    std::vector<int> pi1, pi2;
};

// Throws StructureViolation when any verified property fails.
EpochStructure epoch_structure(const SituationView& v, const std::vector<char>& alive1,
                               const std::vector<char>& alive2);

struct Gadget {
    int m = 0;
    // Tree over view index values of p1. The edge reversion of node w maps
    // the parent's value to w's value; identity at the root.
    int root = 0;
    std::vector<int> parent;
    std::vector<SegmentReversion> edge;
    // Per red block: node whose value c gives top(x) = up_tail(c), and the
    // node for the bottom; tails nondecreasing.
    std::vector<int> up_node, down_node;
    std::vector<Table> up_tail, down_tail;
};

Gadget alternating_lines_gadget(const EpochStructure& es);

// ---- Driver

// Runs every branch for (X0, Y0) with budget k. Returns the first verified
// separation of at most k lines in branch order, or nullopt.
std::optional<Separation> compress_branches(const Instance& inst, const ApxPair& apx, int k,
                                            const ReductionOptions& opt, ReductionStats* stats, int jobs);

// Processes one (apx pair, layout) task. original is the pair before augmentation.
std::optional<Separation> process_layout(const Instance& inst, const ApxPair& apx, const Layout& layout, int k,
                                         const ReductionOptions& opt, ReductionStats* stats);

// Upper bound asserted on the apparent size of every emitted instance.
int apparent_size_bound(int k);

}  // namespace optdisc
