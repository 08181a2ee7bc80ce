#pragma once

#include <string>
#include <vector>

#include "eqgh/group_actions.hpp"
#include "eqgh/metric_space.hpp"
#include "eqgh/wasserstein.hpp"

namespace eqgh {

// JSON wire formats. Spaces: {"points": [ids], "dist": [[...]]}. Actions:
// {"group": {"kind": "...", "params": ...}, "mode": "...", "generators":
// [[image indices], ...]}. Measures: {"space": <id>, "weights": [...]}.
// Certificates carry epsilon / distortion / net_defect / map.

std::string space_to_json(const FiniteMetricSpace& space);
SpacePtr space_from_json_text(const std::string& text);

std::string measure_to_json(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json_text(const std::string& text, SpacePtr space);

std::string action_to_json(const FiniteAction& action);
FiniteAction action_from_json_text(const std::string& text, SpacePtr space);

std::string certificate_to_json(const GhaCertificate& cert);

// Deterministic shortest round-trip formatting, dot decimal.
std::string format_double(double v);

/// CSV emitter: a schema version comment line, then a header row; cells are
/// joined with commas, no quoting (values never contain commas).
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns);
    void row(const std::vector<std::string>& cells);
    const std::string& str() const { return buf_; }
    void write_file(const std::string& path) const;

private:
    std::size_t width_;
    std::string buf_;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace eqgh
