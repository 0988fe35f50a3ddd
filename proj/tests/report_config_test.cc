#include <filesystem>
#include <fstream>

#include "gtest/gtest.h"
#include "xtalk/config.h"
#include "xtalk/errors.h"
#include "xtalk/report.h"

using namespace xtalk;

namespace {

Dataset sample_dataset() {
    DesignParams p;
    p.depth = 30;
    p.n_circ = 10;
    p.n_con = 5;
    p.n_rep = 2000;
    ExperimentPlan plan = build_plan(one_partition(DeviceLayout::fully_connected(2)), p, 3);
    return run_plan(operation_crosstalk_depolarizing(2, 0, 1, 0.05, 0.01), plan, 4);
}

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "xtalk_config_test";
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST(report_json, structure) {
    Dataset d = sample_dataset();
    CrosstalkGraph graph = analyze_dataset(d, AnalysisOptions{});
    nlohmann::json r = report_json(graph, {{"seed", 5}});
    ASSERT_EQ(r.at("format"), "xtalk-report/1");
    ASSERT_EQ(r.at("run").at("seed"), 5);
    ASSERT_EQ(r.at("dataset_digest"), d.digest());
    ASSERT_EQ(r.at("variables").size(), 4u);
    ASSERT_EQ(r.at("analysis").at("df_mode"), "adjusted");
    ASSERT_EQ(r.at("analysis").at("initial_edges"), 5);
    ASSERT_EQ(r.at("edges").size(), graph.edges.size());
    ASSERT_EQ(r.at("removed").size() + r.at("edges").size(), 6u);
    ASSERT_EQ(r.at("tests").size(), graph.skeleton.tests.size());
    ASSERT_TRUE(r.at("crosstalk_detected").get<bool>());
    bool cross = false;
    for (const auto &e : r.at("edges")) {
        if (e.at("class") == "crosstalk") {
            cross = true;
            ASSERT_TRUE(e.at("tvd").at("computable").get<bool>());
        } else {
            ASSERT_TRUE(e.at("tvd").is_null());
        }
    }
    ASSERT_TRUE(cross);
    ASSERT_EQ(report_json(graph, {{"seed", 5}}).dump(), r.dump());
}

TEST(report_dot, colors_and_labels) {
    nlohmann::json r = report_json(analyze_dataset(sample_dataset(), AnalysisOptions{}));
    std::string dot = report_dot(r);
    ASSERT_EQ(dot.rfind("graph crosstalk {", 0), 0u);
    ASSERT_NE(dot.find("color=red"), std::string::npos);
    ASSERT_NE(dot.find("color=blue"), std::string::npos);
    ASSERT_NE(dot.find("shape=box"), std::string::npos);
    ASSERT_NE(report_summary(r).find("S0"), std::string::npos);
}

TEST(report, rejects_malformed) {
    ASSERT_THROW(report_dot(nlohmann::json::object()), FormatError);
    ASSERT_THROW(report_summary(nlohmann::json{{"format", "other"}}), FormatError);
}

TEST(tvd_label, format) {
    ASSERT_EQ(tvd_label(nlohmann::json{{"computable", true}, {"max", 0.1171}, {"median", 0.05249}}), "0.117 (0.052)");
    ASSERT_EQ(tvd_label(nlohmann::json{{"computable", false}}), "n/a");
}

TEST(RunConfig, defaults_and_round_trip) {
    RunConfig c = RunConfig::from_json(nlohmann::json::object());
    ASSERT_EQ(c.layout, DeviceLayout::fully_connected(2));
    ASSERT_EQ(c.analysis.pc.df_mode, DfMode::Adjusted);
    nlohmann::json j = {
        {"seed", 12},
        {"layout", {{"preset", "ladder6"}}},
        {"partition", {{"mode", "one"}}},
        {"design", {{"regime", "high"}, {"n_rep", 50}}},
        {"model", {{"kind", "ladder_crosstalk"}, {"p", 0.01}, {"p_local", 0.01}, {"p_idle_err", 0.005}}},
        {"analysis", {{"alpha", 0.05}, {"bonferroni", true}, {"df", "full"}}},
    };
    RunConfig r = RunConfig::from_json(j);
    ASSERT_EQ(r.seed, 12u);
    ASSERT_EQ(r.layout, DeviceLayout::ladder6());
    ASSERT_EQ(r.design.n_con, 5u);
    ASSERT_EQ(r.design.n_rep, 50u);
    ASSERT_EQ(r.analysis.pc.df_mode, DfMode::Full);
    ASSERT_TRUE(r.analysis.pc.bonferroni);
    ASSERT_EQ(RunConfig::from_json(r.to_json()).to_json(), r.to_json());
    build_model(r.model, r.layout).validate();
}

TEST(RunConfig, rejects_bad_input) {
    ASSERT_THROW(RunConfig::from_json({{"sede", 1}}), ConfigError);
    ASSERT_THROW(RunConfig::from_json({{"analysis", {{"alpha", 2.0}}}}), ConfigError);
    ASSERT_THROW(RunConfig::from_json({{"analysis", {{"df", "half"}}}}), ConfigError);
    ASSERT_THROW(RunConfig::from_json({{"partition", {{"mode", "three"}}}}), ConfigError);
    ASSERT_THROW(RunConfig::from_json({{"layout", "does_not_exist.json"}}, temp_dir()), ConfigError);
    ASSERT_THROW(build_model({{"kind", "mystery"}}, DeviceLayout::fully_connected(2)), ConfigError);
    ASSERT_THROW(build_model({{"kind", "crosstalk_free"}}, DeviceLayout::fully_connected(2)), ConfigError);
    ASSERT_THROW(build_model({{"kind", "detection_crosstalk"}, {"p_m", 0.1}, {"p_local", 0}}, DeviceLayout::fully_connected(3)),
                 ConfigError);
    ASSERT_THROW(RunConfig::load(temp_dir() / "missing.json"), ConfigError);
}

TEST(RunConfig, layout_file_relative_to_config) {
    auto dir = temp_dir();
    std::ofstream(dir / "layout.json") << R"({"n_qubits": 3, "edges": [[0, 1], [1, 2]]})";
    std::ofstream(dir / "run.json") << R"({"seed": 1, "layout": "layout.json", "partition": {"mode": "brute2", "index": 0}})";
    RunConfig c = RunConfig::load(dir / "run.json");
    ASSERT_EQ(c.layout, DeviceLayout(3, {{0, 1}, {1, 2}}));
    Partition p = select_partition(c);
    p.check_allowed(c.layout);
    ASSERT_EQ(p.num_regions(), 2u);
}

TEST(RunConfig, seeds_are_distinct_streams) {
    RunConfig c;
    c.seed = 3;
    ASSERT_NE(design_seed(c), simulation_seed(c));
    ASSERT_NE(design_seed(c), partition_seed(c));
    RunConfig d = c;
    d.seed = 4;
    ASSERT_NE(design_seed(c), design_seed(d));
}

TEST(build_model, every_kind) {
    DeviceLayout two = DeviceLayout::fully_connected(2);
    build_model({{"kind", "crosstalk_free"}, {"p_local", 0.01}}, two).validate();
    build_model({{"kind", "depolarizing_crosstalk"}, {"source", 0}, {"target", 1}, {"p", 0.1}, {"p_local", 0.01}}, two)
        .validate();
    build_model({{"kind", "coherent_crosstalk"}, {"source", 0}, {"target", 1}, {"epsilon", 0.1}, {"p_local", 0.01}}, two)
        .validate();
    build_model({{"kind", "detection_crosstalk"}, {"p_m", 0.01}, {"p_local", 0.01}}, two).validate();
}
