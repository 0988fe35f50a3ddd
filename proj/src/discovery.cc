#include "xtalk/discovery.h"

#include <algorithm>
#include <numeric>

#include "xtalk/errors.h"

namespace xtalk {

VarPair make_pair_key(size_t a, size_t b) {
    return a < b ? VarPair{a, b} : VarPair{b, a};
}

Priors design_priors(const std::vector<VariableSpec> &specs) {
    Priors p;
    for (size_t a = 0; a < specs.size(); a++) {
        for (size_t b = a + 1; b < specs.size(); b++) {
            if (specs[a].kind == VarKind::Setting && specs[b].kind == VarKind::Setting) {
                p.removed.emplace_back(a, b);
            }
        }
    }
    return p;
}

double bonferroni_alpha(double alpha, size_t num_edges) {
    if (num_edges < 1) {
        throw ParameterError("Bonferroni correction needs at least one edge");
    }
    return alpha / static_cast<double>(num_edges);
}

const char *removal_reason_name(RemovalReason r) {
    switch (r) {
        case RemovalReason::Prior:
            return "prior";
        case RemovalReason::Degenerate:
            return "degenerate";
        case RemovalReason::Independence:
            return "independence";
    }
    return "?";
}

bool SkeletonGraph::adjacent(size_t a, size_t b) const {
    return edges.count(make_pair_key(a, b)) > 0;
}

std::set<std::pair<std::string, std::string>> SkeletonGraph::edge_names() const {
    std::set<std::pair<std::string, std::string>> out;
    for (auto [a, b] : edges) {
        auto na = nodes[a].name;
        auto nb = nodes[b].name;
        out.insert(na < nb ? std::pair{na, nb} : std::pair{nb, na});
    }
    return out;
}

namespace {

/// Calls fn on each size-k subset of `items` in lexicographic order; stops when fn returns true.
template <typename Fn>
bool for_each_subset(const std::vector<size_t> &items, size_t k, Fn &&fn) {
    if (k > items.size()) {
        return false;
    }
    std::vector<size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<size_t> subset(k);
    while (true) {
        for (size_t t = 0; t < k; t++) {
            subset[t] = items[idx[t]];
        }
        if (fn(subset)) {
            return true;
        }
        size_t t = k;
        while (t > 0 && idx[t - 1] == items.size() - k + t - 1) {
            t--;
        }
        if (t == 0) {
            return false;
        }
        idx[t - 1]++;
        for (size_t u = t; u < k; u++) {
            idx[u] = idx[u - 1] + 1;
        }
    }
}

}  // namespace

SkeletonGraph pc_skeleton(const CategoricalData &data, const Priors &priors, const PcOptions &options) {
    size_t V = data.num_variables();
    if (V < 2) {
        throw ParameterError("the skeleton search needs at least two variables");
    }
    if (!(options.alpha > 0 && options.alpha < 1)) {
        throw ParameterError("alpha must lie in (0, 1)");
    }

    SkeletonGraph g;
    g.nodes = data.specs();
    g.alpha = options.alpha;
    g.bonferroni = options.bonferroni;
    g.df_mode = options.df_mode;
    g.max_cond_size = options.max_cond_size.value_or(V - 2);

    std::vector<size_t> order(V);
    std::iota(order.begin(), order.end(), 0);
    if (options.canonical_order) {
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            const auto &sa = data.spec(a);
            const auto &sb = data.spec(b);
            return std::tie(sa.kind, sa.region, sa.name, a) < std::tie(sb.kind, sb.region, sb.name, b);
        });
    }
    std::vector<size_t> pos(V);
    for (size_t k = 0; k < V; k++) {
        pos[order[k]] = k;
    }

    for (size_t a = 0; a < V; a++) {
        for (size_t b = a + 1; b < V; b++) {
            g.edges.emplace(a, b);
        }
    }
    for (auto [a, b] : priors.removed) {
        if (a >= V || b >= V || a == b) {
            throw ParameterError("prior refers to an unknown variable pair");
        }
        VarPair key = make_pair_key(a, b);
        if (g.edges.erase(key)) {
            g.separations[key] = Separation{RemovalReason::Prior, {}, std::nullopt, 0};
        }
    }
    g.initial_edges = g.edges.size();
    g.per_test_alpha =
        options.bonferroni && g.initial_edges > 0 ? bonferroni_alpha(options.alpha, g.initial_edges) : options.alpha;

    for (size_t v = 0; v < V; v++) {
        if (data.spec(v).cardinality() >= 2) {
            continue;
        }
        g.warnings.push_back("variable " + data.spec(v).name + " takes a single value and is not tested");
        for (size_t u = 0; u < V; u++) {
            VarPair key = make_pair_key(u, v);
            if (u != v && g.edges.erase(key)) {
                g.separations[key] = Separation{RemovalReason::Degenerate, {}, std::nullopt, 0};
            }
        }
    }

    auto neighbours = [&](size_t x) {
        std::vector<size_t> out;
        for (size_t k = 0; k < V; k++) {
            size_t y = order[k];
            if (y != x && g.adjacent(x, y)) {
                out.push_back(y);
            }
        }
        return out;
    };
    auto admissible = [&](size_t level) {
        for (auto [a, b] : g.edges) {
            if (neighbours(a).size() - 1 >= level || neighbours(b).size() - 1 >= level) {
                return true;
            }
        }
        return false;
    };

    for (size_t level = 0;; level++) {
        if (level > g.max_cond_size) {
            g.cap_hit = admissible(level);
            break;
        }
        std::vector<std::vector<size_t>> snapshot(V);
        for (size_t x = 0; x < V; x++) {
            snapshot[x] = neighbours(x);
        }
        std::vector<std::pair<VarPair, Separation>> removals;
        bool any_admissible = false;
        for (size_t kx = 0; kx < V; kx++) {
            size_t x = order[kx];
            for (size_t y : snapshot[x]) {
                if (pos[y] < pos[x]) {
                    continue;
                }
                bool removed = false;
                for (auto [first, second] : {std::pair{x, y}, std::pair{y, x}}) {
                    std::vector<size_t> candidates;
                    for (size_t z : snapshot[first]) {
                        if (z != second) {
                            candidates.push_back(z);
                        }
                    }
                    if (candidates.size() < level) {
                        continue;
                    }
                    any_admissible = true;
                    removed = for_each_subset(candidates, level, [&](const std::vector<size_t> &cond) {
                        CITestResult r = g2_test(data, x, y, cond, options.df_mode);
                        bool independent = r.p_value > g.per_test_alpha;
                        g.tests.push_back(TestRecord{x, y, cond, level, r, independent});
                        if (independent) {
                            removals.push_back({make_pair_key(x, y), Separation{RemovalReason::Independence, cond, r, level}});
                        }
                        return independent;
                    });
                    if (removed) {
                        break;
                    }
                }
            }
        }
        if (!any_admissible) {
            break;
        }
        g.max_level = level;
        for (auto &[key, sep] : removals) {
            g.edges.erase(key);
            g.separations[key] = std::move(sep);
        }
    }
    if (g.cap_hit) {
        g.warnings.push_back(
            "conditioning sets were capped at size " + std::to_string(g.max_cond_size) +
            " while larger sets remained admissible");
    }
    return g;
}

size_t CrosstalkGraph::num_crosstalk() const {
    return static_cast<size_t>(
        std::count_if(edges.begin(), edges.end(), [](const GraphEdge &e) { return e.kind == EdgeClass::Crosstalk; }));
}

CrosstalkGraph build_crosstalk_graph(
    const SkeletonGraph &skeleton, const CategoricalData &data, const GraphOptions &options, std::string dataset_digest) {
    if (skeleton.nodes.size() != data.num_variables()) {
        throw DimensionError("skeleton and data disagree on the variable count");
    }
    CrosstalkGraph out;
    out.skeleton = skeleton;
    out.dataset_digest = std::move(dataset_digest);
    for (auto [a, b] : skeleton.edges) {
        const VariableSpec &sa = data.spec(a);
        const VariableSpec &sb = data.spec(b);
        GraphEdge e;
        bool a_first = sa.kind != sb.kind ? sa.kind == VarKind::Setting : sa.region <= sb.region;
        e.source = a_first ? a : b;
        e.target = a_first ? b : a;
        e.kind = sa.region == sb.region ? EdgeClass::Expected : EdgeClass::Crosstalk;
        if (e.kind == EdgeClass::Crosstalk || options.tvd_expected) {
            e.tvd = edge_tvd(data, e.source, e.target);
        }
        out.edges.push_back(e);
    }
    auto rank = [&](size_t v) { return std::tuple(data.spec(v).kind, data.spec(v).region, data.spec(v).name); };
    std::sort(out.edges.begin(), out.edges.end(), [&](const GraphEdge &x, const GraphEdge &y) {
        return std::tuple(rank(x.source), rank(x.target)) < std::tuple(rank(y.source), rank(y.target));
    });
    return out;
}

CrosstalkGraph analyze_dataset(const Dataset &data, const AnalysisOptions &options) {
    CategoricalData view = CategoricalData::from_dataset(data);
    Priors priors = options.use_priors ? design_priors(view.specs()) : Priors{};
    SkeletonGraph skeleton = pc_skeleton(view, priors, options.pc);
    return build_crosstalk_graph(skeleton, view, options.graph, data.digest());
}

}  // namespace xtalk
