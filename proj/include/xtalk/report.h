#ifndef XTALK_REPORT_H
#define XTALK_REPORT_H

#include <string>

#include "json.hpp"
#include "xtalk/discovery.h"

namespace xtalk {

/// JSON report of an analysis: variables, classified edges with TVD weights, every CI test,
/// removed pairs with their sepsets, and caller-supplied metadata (seeds, inputs) under "run".
nlohmann::json report_json(const CrosstalkGraph &graph, const nlohmann::json &run_metadata = nlohmann::json::object());

/// Graphviz rendering of a report: expected edges blue, crosstalk edges red, labelled
/// "max (median)" TVD.
std::string report_dot(const nlohmann::json &report);

/// Short human-readable listing of the detected edges.
std::string report_summary(const nlohmann::json &report);

/// "0.117 (0.052)", or "n/a" for an edge without a computable TVD.
std::string tvd_label(const nlohmann::json &tvd);

}  // namespace xtalk

#endif
