#ifndef XTALK_DISCOVERY_H
#define XTALK_DISCOVERY_H

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "xtalk/dataset.h"
#include "xtalk/stats.h"

namespace xtalk {

/// Unordered variable pair stored as (smaller index, larger index).
using VarPair = std::pair<size_t, size_t>;

VarPair make_pair_key(size_t a, size_t b);

/// Edges removed before any test is run.
struct Priors {
    std::vector<VarPair> removed;
};

/// Removes every setting-setting edge: settings are assigned independently by the design.
Priors design_priors(const std::vector<VariableSpec> &specs);

/// alpha / K.
double bonferroni_alpha(double alpha, size_t num_edges);

struct PcOptions {
    double alpha = 0.01;
    /// Test each edge at alpha / K with K the edge count left after priors.
    bool bonferroni = false;
    /// Largest conditioning set tried; defaults to (number of variables - 2).
    std::optional<size_t> max_cond_size;
    DfMode df_mode = DfMode::Full;
    /// Iterate variables sorted by (kind, region, name) instead of their storage order.
    bool canonical_order = true;
};

enum class RemovalReason { Prior, Degenerate, Independence };

const char *removal_reason_name(RemovalReason r);

struct TestRecord {
    size_t x = 0;
    size_t y = 0;
    std::vector<size_t> cond;
    size_t level = 0;
    CITestResult result;
    bool removed = false;
};

struct Separation {
    RemovalReason reason = RemovalReason::Independence;
    std::vector<size_t> sepset;
    std::optional<CITestResult> test;
    size_t level = 0;
};

struct SkeletonGraph {
    std::vector<VariableSpec> nodes;
    std::set<VarPair> edges;
    std::map<VarPair, Separation> separations;
    std::vector<TestRecord> tests;
    std::vector<std::string> warnings;

    double alpha = 0;
    double per_test_alpha = 0;
    bool bonferroni = false;
    DfMode df_mode = DfMode::Full;
    /// Edges of the complete graph left after priors.
    size_t initial_edges = 0;
    size_t max_cond_size = 0;
    /// Last conditioning-set size at which some pair was tested.
    size_t max_level = 0;
    /// Stopped at max_cond_size although larger conditioning sets were still admissible.
    bool cap_hit = false;

    bool adjacent(size_t a, size_t b) const;
    /// Edges as sorted pairs of variable names.
    std::set<std::pair<std::string, std::string>> edge_names() const;
};

/// Order-independent PC skeleton: adjacency is frozen at the start of each level and
/// removals are applied at the end of it. Orientation is not attempted.
SkeletonGraph pc_skeleton(const CategoricalData &data, const Priors &priors, const PcOptions &options);

enum class EdgeClass { Expected, Crosstalk };

struct GraphEdge {
    /// For TVD purposes the setting end (or the lower region for result-result edges).
    size_t source = 0;
    size_t target = 0;
    EdgeClass kind = EdgeClass::Expected;
    std::optional<TvdSummary> tvd;
};

struct GraphOptions {
    /// Also compute TVD weights on intra-region edges.
    bool tvd_expected = false;
};

struct CrosstalkGraph {
    SkeletonGraph skeleton;
    std::vector<GraphEdge> edges;
    std::string dataset_digest;

    size_t num_crosstalk() const;
};

CrosstalkGraph build_crosstalk_graph(
    const SkeletonGraph &skeleton, const CategoricalData &data, const GraphOptions &options = {},
    std::string dataset_digest = "");

/// Pipeline defaults: as PcOptions, but with adjusted degrees of freedom.
struct AnalysisOptions {
    AnalysisOptions() {
        pc.df_mode = DfMode::Adjusted;
    }

    PcOptions pc;
    bool use_priors = true;
    GraphOptions graph;
};

/// Categorical view, skeleton and crosstalk graph for a dataset.
CrosstalkGraph analyze_dataset(const Dataset &data, const AnalysisOptions &options);

}  // namespace xtalk

#endif
