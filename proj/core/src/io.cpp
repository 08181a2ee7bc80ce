#include "eqgh/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace eqgh {

using nlohmann::json;

std::string space_to_json(const FiniteMetricSpace& space) {
    json j;
    j["points"] = space.point_ids();
    std::vector<std::vector<double>> rows(space.size());
    for (Index i = 0; i < space.size(); ++i) {
        rows[i].resize(space.size());
        for (Index k = 0; k < space.size(); ++k) rows[i][k] = space.dist(i, k);
    }
    j["dist"] = rows;
    return j.dump();
}

SpacePtr space_from_json_text(const std::string& text) {
    const json j = json::parse(text);
    require(j.contains("points") && j.contains("dist"), "space json: needs points and dist");
    std::vector<std::string> ids = j["points"].get<std::vector<std::string>>();
    const auto rows = j["dist"].get<std::vector<std::vector<double>>>();
    require(rows.size() == ids.size(), "space json: dist row count mismatch");
    std::vector<double> d;
    d.reserve(ids.size() * ids.size());
    for (const auto& row : rows) {
        require(row.size() == ids.size(), "space json: dist column count mismatch");
        d.insert(d.end(), row.begin(), row.end());
    }
    return FiniteMetricSpace::from_matrix(std::move(ids), std::move(d));
}

std::string measure_to_json(const DiscreteMeasure& mu) {
    json j;
    j["space"] = mu.space()->uid();
    j["weights"] = mu.weights();
    return j.dump();
}

DiscreteMeasure measure_from_json_text(const std::string& text, SpacePtr space) {
    const json j = json::parse(text);
    require(j.contains("weights"), "measure json: needs weights");
    return DiscreteMeasure(std::move(space), j["weights"].get<std::vector<double>>());
}

namespace {

GeneratedGroup group_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "Z") return GeneratedGroup::z();
    if (kind == "Z2") return GeneratedGroup::z2();
    if (kind == "cyclic") return GeneratedGroup::cyclic(j.at("params").get<int>());
    if (kind == "free_monoid") return GeneratedGroup::free_monoid(j.at("params").get<int>());
    throw precondition_error("action json: unknown group kind " + kind);
}

json group_to_json(const GeneratedGroup& g) {
    json j;
    switch (g.kind()) {
        case GroupKind::Z: j["kind"] = "Z"; break;
        case GroupKind::Z2: j["kind"] = "Z2"; break;
        case GroupKind::Cyclic:
            j["kind"] = "cyclic";
            j["params"] = g.param();
            break;
        case GroupKind::FreeMonoid:
            j["kind"] = "free_monoid";
            j["params"] = g.param();
            break;
    }
    return j;
}

}  // namespace

std::string action_to_json(const FiniteAction& action) {
    json j;
    j["group"] = group_to_json(action.group());
    j["space"] = action.space()->uid();
    j["mode"] = action.mode() == ActionMode::Group ? "group" : "semigroup";
    std::vector<std::vector<Index>> gens;
    for (const auto& m : action.generator_maps()) gens.push_back(m.image);
    j["generators"] = gens;
    return j.dump();
}

FiniteAction action_from_json_text(const std::string& text, SpacePtr space) {
    const json j = json::parse(text);
    const GeneratedGroup group = group_from_json(j.at("group"));
    const std::string mode_str = j.value("mode", std::string("group"));
    const ActionMode mode = mode_str == "semigroup" ? ActionMode::Semigroup : ActionMode::Group;
    std::vector<PointMap> gens;
    for (const auto& img : j.at("generators"))
        gens.emplace_back(space, space, img.get<std::vector<Index>>());
    return FiniteAction(group, space, std::move(gens), mode);
}

std::string certificate_to_json(const GhaCertificate& cert) {
    json j;
    j["epsilon"] = cert.epsilon;
    j["distortion"] = cert.distortion;
    j["net_defect"] = cert.net_defect;
    j["map"] = cert.forward.image;
    if (cert.backward) j["backward_map"] = cert.backward->image;
    return j.dump();
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : width_(columns.size()) {
    buf_ = "# eqgh csv v1\n";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) buf_ += ',';
        buf_ += columns[i];
    }
    buf_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    require(cells.size() == width_, "csv: cell count does not match the header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) buf_ += ',';
        buf_ += cells[i];
    }
    buf_ += '\n';
}

void CsvWriter::write_file(const std::string& path) const { eqgh::write_file(path, buf_); }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw refusal_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw refusal_error("cannot write file: " + path);
    out << content;
}

}  // namespace eqgh
