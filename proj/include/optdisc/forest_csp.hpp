#pragma once

// Forest CSP: variables arranged in a forest, one shared domain {1..n_T} per
// tree, edges labelled with segment reversions (g_e(phi(u)) = phi(v)), and
// downwards-closed binary constraints.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "optdisc/segrev.hpp"

namespace optdisc {

struct ForestEdge {
    int u = 0, v = 0;
    SegmentReversion g;  // g(phi(u)) = phi(v); symmetric because g is an involution
};

struct ForestConstraint {
    int u = 0, v = 0;
    DownwardClosedRelation rel;  // (phi(u), phi(v)) in rel
};

// Per-variable domain index (1-based); 0 for removed variables.
using Assignment = std::vector<int>;

class ForestCspInstance {
public:
    // Creates a tree with a single root variable; returns that variable.
    int add_tree(int domain_size);
    // New variable in parent's tree with phi(child) = g(phi(parent)).
    int add_child(int parent, SegmentReversion g);
    void add_constraint(int u, int v, DownwardClosedRelation rel);
    void set_values(int var, std::vector<long long> values);

    int num_variable_slots() const { return static_cast<int>(tree_of.size()); }
    int num_variables() const;
    int num_trees() const;
    int num_constraints() const { return static_cast<int>(constraints.size()); }
    int apparent_size() const { return num_variables() + num_trees() + num_constraints(); }
    bool alive(int var) const { return tree_of[var] >= 0; }
    int tree(int var) const { return tree_of[var]; }
    int domain(int tree) const { return domain_size[tree]; }
    // Lowest-indexed live variable of the tree.
    int anchor(int tree) const;
    std::vector<int> tree_variables(int tree) const;

    // Checks forest structure and that every table is in range.
    void validate() const;

    // Public data: kept plain so the solver can rebuild instances cheaply.
    std::vector<int> tree_of;      // per variable slot; -1 when removed
    std::vector<int> domain_size;  // per tree slot; -1 when removed
    std::vector<ForestEdge> edges;
    std::vector<ForestConstraint> constraints;
    std::vector<std::vector<long long>> values;  // optional per-variable value tables
};

// phi(y') = propagate(inst, y, a, y') for every satisfying phi with phi(y)=a.
int propagate(const ForestCspInstance& inst, int y, int a, int y2);

ForestCspInstance forbid_value(const ForestCspInstance& inst, int y, int a);
// keep[i-1] says whether value i of y stays.
ForestCspInstance restrict_domain(const ForestCspInstance& inst, int y, const std::vector<bool>& keep);

enum class PreprocessStatus { Preprocessed, TriviallySat, Unsat };

struct PreprocessResult {
    PreprocessStatus status;
    ForestCspInstance inst;
};

PreprocessResult preprocess(const ForestCspInstance& inst);

struct SolveStats {
    long long nodes = 0;
    int max_depth = 0;
};

std::optional<Assignment> solve(const ForestCspInstance& inst, SolveStats* stats = nullptr);

struct Verdict {
    bool ok = true;
    std::string message;
};

Verdict verify_assignment(const ForestCspInstance& inst, const Assignment& a);

std::string debug_dump(const ForestCspInstance& inst);

struct AuxConstraint {
    int x1 = 0, x2 = 0;
    // Applied in order (first element first) before testing rel.
    std::vector<SegmentReversion> rep1, rep2;
    DownwardClosedRelation rel;
    std::string tag;  // free-form origin label for traces
};

struct AuxiliaryCspInstance {
    std::vector<int> domain_size;
    std::vector<std::vector<long long>> values;  // optional, per variable
    std::vector<AuxConstraint> constraints;

    int add_variable(int domain, std::vector<long long> vals = {});
    int num_variables() const { return static_cast<int>(domain_size.size()); }
    int total_depth() const;
    bool satisfied_by(const std::vector<int>& a) const;
};

struct FromAuxResult {
    ForestCspInstance inst;
    std::vector<int> var_of;  // auxiliary variable -> forest variable
};

FromAuxResult from_auxiliary(const AuxiliaryCspInstance& aux);

}  // namespace optdisc
