#include "xtalk/report.h"

#include <cstdio>
#include <sstream>

#include "xtalk/errors.h"

namespace xtalk {

namespace {

const char *kind_name(VarKind k) {
    return k == VarKind::Setting ? "setting" : "result";
}

const char *df_mode_name(DfMode m) {
    return m == DfMode::Full ? "full" : "adjusted";
}

nlohmann::json test_json(const CITestResult &r) {
    return {
        {"g2", r.g2},
        {"df", r.df},
        {"p_value", r.p_value},
        {"degenerate", r.degenerate},
        {"sparse", r.sparse},
    };
}

nlohmann::json names(const SkeletonGraph &g, const std::vector<size_t> &vars) {
    nlohmann::json out = nlohmann::json::array();
    for (size_t v : vars) {
        out.push_back(g.nodes[v].name);
    }
    return out;
}

std::string fixed3(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
}

}  // namespace

nlohmann::json report_json(const CrosstalkGraph &graph, const nlohmann::json &run_metadata) {
    const SkeletonGraph &g = graph.skeleton;
    nlohmann::json j;
    j["format"] = "xtalk-report/1";
    j["run"] = run_metadata;
    j["dataset_digest"] = graph.dataset_digest;

    bool sparse_any = false;
    for (const auto &t : g.tests) {
        sparse_any = sparse_any || t.result.sparse;
    }
    j["analysis"] = {
        {"alpha", g.alpha},
        {"bonferroni", g.bonferroni},
        {"per_test_alpha", g.per_test_alpha},
        {"df_mode", df_mode_name(g.df_mode)},
        {"initial_edges", g.initial_edges},
        {"max_cond_size", g.max_cond_size},
        {"max_level", g.max_level},
        {"cap_hit", g.cap_hit},
        {"num_tests", g.tests.size()},
        {"sparse_tests", sparse_any},
    };

    nlohmann::json vars = nlohmann::json::array();
    for (const auto &v : g.nodes) {
        vars.push_back({{"name", v.name}, {"kind", kind_name(v.kind)}, {"region", v.region}, {"levels", v.levels}});
    }
    j["variables"] = vars;

    nlohmann::json edges = nlohmann::json::array();
    for (const auto &e : graph.edges) {
        nlohmann::json je = {
            {"source", g.nodes[e.source].name},
            {"target", g.nodes[e.target].name},
            {"class", e.kind == EdgeClass::Crosstalk ? "crosstalk" : "expected"},
            {"tvd", nullptr},
        };
        if (e.tvd) {
            const TvdSummary &t = *e.tvd;
            nlohmann::json jt = {{"computable", t.computable}, {"pairs", t.num_pairs}};
            if (t.computable) {
                jt["max"] = t.max;
                jt["median"] = t.median;
                jt["argmax"] = {t.argmax_first, t.argmax_second};
                jt["stratum"] = t.argmax_stratum ? nlohmann::json(*t.argmax_stratum) : nlohmann::json(nullptr);
            }
            je["tvd"] = jt;
        }
        edges.push_back(je);
    }
    j["edges"] = edges;

    nlohmann::json removed = nlohmann::json::array();
    for (const auto &[pair, sep] : g.separations) {
        nlohmann::json jr = {
            {"pair", {g.nodes[pair.first].name, g.nodes[pair.second].name}},
            {"reason", removal_reason_name(sep.reason)},
            {"sepset", names(g, sep.sepset)},
            {"level", sep.level},
        };
        if (sep.test) {
            jr["test"] = test_json(*sep.test);
        }
        removed.push_back(jr);
    }
    j["removed"] = removed;

    nlohmann::json tests = nlohmann::json::array();
    for (const auto &t : g.tests) {
        nlohmann::json jt = test_json(t.result);
        jt["x"] = g.nodes[t.x].name;
        jt["y"] = g.nodes[t.y].name;
        jt["cond"] = names(g, t.cond);
        jt["level"] = t.level;
        jt["independent"] = t.removed;
        tests.push_back(jt);
    }
    j["tests"] = tests;
    j["warnings"] = g.warnings;
    j["crosstalk_detected"] = graph.num_crosstalk() > 0;
    return j;
}

std::string tvd_label(const nlohmann::json &tvd) {
    if (tvd.is_null() || !tvd.value("computable", false)) {
        return "n/a";
    }
    return fixed3(tvd.at("max").get<double>()) + " (" + fixed3(tvd.at("median").get<double>()) + ")";
}

std::string report_dot(const nlohmann::json &report) {
    try {
        std::ostringstream out;
        out << "graph crosstalk {\n";
        out << "  node [shape=circle];\n";
        for (const auto &v : report.at("variables")) {
            std::string name = v.at("name").get<std::string>();
            bool setting = v.at("kind").get<std::string>() == "setting";
            out << "  \"" << name << "\" [shape=" << (setting ? "box" : "circle") << "];\n";
        }
        for (const auto &e : report.at("edges")) {
            bool crosstalk = e.at("class").get<std::string>() == "crosstalk";
            out << "  \"" << e.at("source").get<std::string>() << "\" -- \"" << e.at("target").get<std::string>()
                << "\" [class=\"" << (crosstalk ? "crosstalk" : "expected") << "\", color="
                << (crosstalk ? "red" : "blue");
            if (!e.at("tvd").is_null()) {
                out << ", label=\"" << tvd_label(e.at("tvd")) << "\"";
            }
            out << "];\n";
        }
        out << "}\n";
        return out.str();
    } catch (const nlohmann::json::exception &ex) {
        throw FormatError(std::string("malformed report: ") + ex.what());
    }
}

std::string report_summary(const nlohmann::json &report) {
    try {
        std::ostringstream out;
        const auto &a = report.at("analysis");
        out << "alpha " << a.at("alpha").get<double>() << (a.at("bonferroni").get<bool>() ? " (Bonferroni)" : "")
            << ", per-test " << a.at("per_test_alpha").get<double>() << ", " << a.at("num_tests").get<size_t>()
            << " tests\n";
        size_t crosstalk = 0;
        for (const auto &e : report.at("edges")) {
            bool is_xt = e.at("class").get<std::string>() == "crosstalk";
            crosstalk += is_xt;
            out << (is_xt ? "crosstalk " : "expected  ") << e.at("source").get<std::string>() << " -- "
                << e.at("target").get<std::string>();
            if (!e.at("tvd").is_null()) {
                out << "  TVD " << tvd_label(e.at("tvd"));
            }
            out << "\n";
        }
        out << (crosstalk ? std::to_string(crosstalk) + " crosstalk edge(s) detected\n" : "no crosstalk detected\n");
        for (const auto &w : report.at("warnings")) {
            out << "warning: " << w.get<std::string>() << "\n";
        }
        return out.str();
    } catch (const nlohmann::json::exception &ex) {
        throw FormatError(std::string("malformed report: ") + ex.what());
    }
}

}  // namespace xtalk
