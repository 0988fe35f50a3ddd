#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "xtalk/config.h"
#include "xtalk/errors.h"
#include "xtalk/report.h"

namespace {

constexpr int kExitClean = 0;
constexpr int kExitCrosstalk = 1;
constexpr int kExitError = 2;

struct Args {
    std::string config;
    std::string plan;
    std::string data;
    std::string out;
    std::string report;
    std::string dot;
    std::optional<uint64_t> seed;
    std::optional<double> alpha;
    bool bonferroni = false;
};

xtalk::RunConfig load_config(const Args &a) {
    xtalk::RunConfig c = a.config.empty() ? xtalk::RunConfig{} : xtalk::RunConfig::load(a.config);
    if (a.seed) {
        c.seed = *a.seed;
    }
    if (a.alpha) {
        if (!(*a.alpha > 0 && *a.alpha < 1)) {
            throw xtalk::ConfigError("--alpha must lie in (0, 1)");
        }
        c.analysis.pc.alpha = *a.alpha;
    }
    if (a.bonferroni) {
        c.analysis.pc.bonferroni = true;
    }
    return c;
}

std::ofstream open_output(const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw xtalk::ConfigError("cannot write " + path);
    }
    return out;
}

std::ifstream open_input(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw xtalk::ConfigError("cannot open " + path);
    }
    return in;
}

nlohmann::json run_metadata(const xtalk::RunConfig &c) {
    return {
        {"seed", c.seed},
        {"design_seed", xtalk::design_seed(c)},
        {"simulation_seed", xtalk::simulation_seed(c)},
        {"config", c.to_json()},
    };
}

int cmd_design(const Args &a) {
    xtalk::RunConfig c = load_config(a);
    xtalk::Partition partition = xtalk::select_partition(c);
    xtalk::ExperimentPlan plan = xtalk::build_plan(partition, c.design, xtalk::design_seed(c));
    open_output(a.out) << plan.to_json().dump(1) << "\n";
    std::cerr << plan.circuits.size() << " circuits on " << partition.num_regions() << " regions\n";
    return kExitClean;
}

int cmd_simulate(const Args &a) {
    xtalk::RunConfig c = load_config(a);
    if (c.model.empty()) {
        throw xtalk::ConfigError("config has no \"model\" section");
    }
    xtalk::ErrorModel model = xtalk::build_model(c.model, c.layout);
    xtalk::ExperimentPlan plan = xtalk::ExperimentPlan::from_json(xtalk::read_json_file(a.plan));
    xtalk::Dataset data = xtalk::run_plan(model, plan, xtalk::simulation_seed(c));
    auto out = open_output(a.out);
    data.write_jsonl(out);
    std::cerr << data.num_rows() << " records, digest " << data.digest() << "\n";
    return kExitClean;
}

int cmd_analyze(const Args &a) {
    xtalk::RunConfig c = load_config(a);
    auto in = open_input(a.data);
    xtalk::Dataset data = xtalk::Dataset::read_jsonl(in);
    xtalk::CrosstalkGraph graph = xtalk::analyze_dataset(data, c.analysis);
    nlohmann::json report = xtalk::report_json(graph, run_metadata(c));
    open_output(a.report) << report.dump(1) << "\n";
    if (!a.dot.empty()) {
        open_output(a.dot) << xtalk::report_dot(report);
    }
    std::cout << xtalk::report_summary(report);
    return graph.num_crosstalk() > 0 ? kExitCrosstalk : kExitClean;
}

int cmd_report(const Args &a) {
    nlohmann::json report = xtalk::read_json_file(a.report);
    if (!a.dot.empty()) {
        open_output(a.dot) << xtalk::report_dot(report);
    }
    std::cout << xtalk::report_summary(report);
    return kExitClean;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Crosstalk detection: experiment design, simulation and analysis"};
    app.require_subcommand(1);
    Args a;

    auto *design = app.add_subcommand("design", "Generate an experiment plan");
    design->add_option("-c,--config", a.config, "Run configuration (JSON)")->required();
    design->add_option("-o,--out", a.out, "Plan output file")->required();
    design->add_option("--seed", a.seed, "Override the master seed");

    auto *simulate = app.add_subcommand("simulate", "Simulate a plan under the configured error model");
    simulate->add_option("-c,--config", a.config, "Run configuration (JSON)")->required();
    simulate->add_option("-p,--plan", a.plan, "Plan file")->required();
    simulate->add_option("-o,--out", a.out, "Dataset output (JSON lines)")->required();
    simulate->add_option("--seed", a.seed, "Override the master seed");

    auto *analyze = app.add_subcommand("analyze", "Detect crosstalk in a dataset (exit 1 when detected)");
    analyze->add_option("-c,--config", a.config, "Run configuration (JSON)");
    analyze->add_option("-d,--data", a.data, "Dataset (JSON lines)")->required();
    analyze->add_option("-r,--report", a.report, "Report output (JSON)")->required();
    analyze->add_option("--dot", a.dot, "Graphviz output");
    analyze->add_option("--alpha", a.alpha, "Significance level");
    analyze->add_flag("--bonferroni", a.bonferroni, "Divide alpha by the initial edge count");

    auto *report = app.add_subcommand("report", "Summarize a report and optionally render it as DOT");
    report->add_option("-r,--report", a.report, "Report file")->required();
    report->add_option("--dot", a.dot, "Graphviz output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kExitClean : kExitError;
    }

    try {
        if (*design) {
            return cmd_design(a);
        }
        if (*simulate) {
            return cmd_simulate(a);
        }
        if (*analyze) {
            return cmd_analyze(a);
        }
        return cmd_report(a);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
