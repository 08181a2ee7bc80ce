// Command-line front end: scenario generation, GH and equivariant-GH
// certificates, shadowing sweeps, optimal transport, Folner averaging, and
// the full bound-check table. Every run is reproducible from its flags; all
// randomness flows from --seed.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "checks.hpp"
#include "eqgh/io.hpp"
#include "eqgh/metric_core.hpp"
#include "eqgh/shadowing.hpp"
#include "eqgh/systems.hpp"
#include "eqgh/wasserstein.hpp"

namespace {

using namespace eqgh;
using nlohmann::json;

struct RunConfig {
    std::string scenario;
    int n = 4;
    int mesh = 8;
    bool mesh_given = false;
    double p = 1.0;
    std::vector<double> deltas{1e-2, 1e-3, 1e-4};
    int window = 50;
    std::size_t budget = 200000;
    std::uint64_t seed = 0;
    std::string out;
    double tol = 1e-9;
    std::string x_path, y_path, mu_path, nu_path, space_path;
};

std::string out_dir(const RunConfig& cfg) {
    if (!cfg.out.empty()) return cfg.out;
    if (const char* env = std::getenv("EQGH_DATA_DIR")) return env;
    return ".";
}

void emit(const RunConfig& cfg, const std::string& fallback_name, const std::string& content) {
    const std::string path = cfg.out.empty() ? fallback_name : cfg.out;
    write_file(path, content);
    std::cout << "wrote " << path << "\n";
}

int run_gh(const RunConfig& cfg) {
    const auto x = space_from_json_text(read_file(cfg.x_path));
    const auto y = space_from_json_text(read_file(cfg.y_path));
    json j;
    if (x->size() <= 8 && y->size() <= 8) {
        const auto exact = gh_exact(*x, *y);
        j["gh"] = exact.value();
        j["exact"] = true;
    } else {
        const auto interval = gh_exact(*x, *y, cfg.budget);
        j["lower"] = interval.lower;
        j["upper"] = interval.upper;
        j["exact"] = interval.exact;
    }
    const auto cert = gha_search(x, y, cfg.budget, cfg.seed);
    j["certificate"] = json::parse(certificate_to_json(cert.forward));
    j["certificate_backward"] = json::parse(certificate_to_json(cert.backward));
    j["epsilon"] = cert.epsilon;
    emit(cfg, "gh_result.json", j.dump(2) + "\n");
    return 0;
}

json scenario_bundle(const RunConfig& cfg) {
    json j;
    j["scenario"] = cfg.scenario;
    j["n"] = cfg.n;
    j["mesh"] = cfg.mesh;
    j["seed"] = cfg.seed;
    if (cfg.scenario == "collapse") {
        const auto fam = example_family(cfg.n, cfg.mesh, 4);
        j["bound"] = fam.bound;
        j["slack"] = fam.slack;
        j["x"] = json::parse(space_to_json(*fam.x));
        j["alpha"] = json::parse(action_to_json(fam.alpha));
        j["y_points"] = fam.y->size();
        j["h_distortion"] = fam.h_distortion;
        j["f_net_defect"] = fam.f_net;
        j["f_equivariance"] = fam.f_equiv;
    } else if (cfg.scenario == "one-sided") {
        const auto fam = example_one_sided_family(cfg.n, cfg.mesh, 4);
        j["bound"] = fam.bound;
        j["slack"] = fam.slack;
        j["x"] = json::parse(space_to_json(*fam.x));
        j["alpha"] = json::parse(action_to_json(fam.alpha));
        j["rho"] = fam.rho.to_string();
        j["y_points"] = fam.y->size();
    } else if (cfg.scenario == "isometry") {
        const auto fam = example_isometry_family(cfg.n, cfg.mesh, 1);
        j["bound"] = fam.bound;
        j["xn"] = json::parse(space_to_json(*fam.xn));
        j["action_n"] = json::parse(action_to_json(fam.action_n));
        j["h_distortion"] = fam.h_distortion;
        j["f_equivariance"] = fam.f_equiv;
    } else if (cfg.scenario == "shift") {
        const auto sys = full_shift(2, cfg.n, cfg.seed);
        j["space"] = json::parse(space_to_json(*sys.action.space()));
        j["action"] = json::parse(action_to_json(sys.action));
        j["boundary_approximate"] = sys.boundary_approximate;
    } else {
        throw precondition_error("unknown scenario: " + cfg.scenario +
                                 " (collapse | one-sided | isometry | shift)");
    }
    return j;
}

int run_scenario(const RunConfig& cfg) {
    const json j = scenario_bundle(cfg);
    const std::string path = out_dir(cfg) + "/" + cfg.scenario + "-n" + std::to_string(cfg.n) +
                             "-mesh" + std::to_string(cfg.mesh) + ".json";
    write_file(path, j.dump(2) + "\n");
    std::cout << "wrote " << path << "\n";
    return 0;
}

int run_egh(const RunConfig& cfg) {
    json j;
    if (cfg.scenario == "one-sided") {
        const auto fam = example_one_sided_family(cfg.n, cfg.mesh, 4);
        const auto cert = dgh1_upper_with_rho(fam.alpha, fam.beta, fam.rho, cfg.budget, 6);
        j["kind"] = "one-sided";
        j["epsilon"] = cert.epsilon;
        j["distortion"] = cert.distortion;
        j["net_defect"] = cert.net;
        j["equivariance"] = cert.equiv;
        j["rho"] = cert.rho.to_string();
        j["ball_radius"] = cert.ball_radius;
        j["ball_truncated"] = cert.ball_truncated;
        j["bound"] = fam.bound;
        j["slack"] = fam.slack;
    } else if (cfg.scenario == "isometry") {
        const auto fam = example_isometry_family(cfg.n, cfg.mesh, 1);
        const auto cert = dgh_s_upper(fam.action_n, fam.action, cfg.budget, {fam.h}, {fam.f});
        j["kind"] = "same-group";
        j["epsilon"] = cert.epsilon;
        j["bound"] = fam.bound;
    } else {
        throw precondition_error("egh needs --scenario one-sided or isometry");
    }
    emit(cfg, "egh_result.json", j.dump(2) + "\n");
    return 0;
}

int run_shadow(const RunConfig& cfg) {
    const Mat2i cat{2, 1, 1, 1};
    const TorusSystem sys(GeneratedGroup::z(), {cat});
    CsvWriter csv({"delta", "achieved_eps", "ratio", "constant", "truncation", "unique"});
    for (double delta : cfg.deltas) {
        const auto po = make_pseudo_orbit(sys, delta, cfg.window, cfg.seed);
        const auto tr = shadow_hyperbolic_toral(po, cat);
        csv.row({format_double(delta), format_double(tr.epsilon),
                 format_double(delta > 0 ? tr.epsilon / delta : 0.0), format_double(tr.constant),
                 format_double(tr.truncation), tr.unique ? "1" : "0"});
    }
    emit(cfg, "shadow.csv", csv.str());
    return 0;
}

int run_ot(const RunConfig& cfg) {
    const auto sp = space_from_json_text(read_file(cfg.space_path));
    const auto mu = measure_from_json_text(read_file(cfg.mu_path), sp);
    const auto nu = measure_from_json_text(read_file(cfg.nu_path), sp);
    const auto res = wasserstein(mu, nu, cfg.p);
    CsvWriter csv({"i", "j", "mass", "cost"});
    csv.row({"-1", "-1", format_double(res.value), format_double(res.cost)});
    for (Index i = 0; i < sp->size(); ++i)
        for (Index k = 0; k < sp->size(); ++k)
            if (res.plan.entry(i, k) > 0.0)
                csv.row({std::to_string(i), std::to_string(k),
                         format_double(res.plan.entry(i, k)), format_double(sp->dist(i, k))});
    emit(cfg, "ot.csv", csv.str());
    std::cout << "W_" << cfg.p << " = " << format_double(res.value) << "\n";
    return 0;
}

int run_folner(const RunConfig& cfg) {
    const auto circle = make_circle(1.0, 64);
    const auto act = FiniteAction(GeneratedGroup::z(), circle, {circle_rotation(circle, 5)},
                                  ActionMode::Group);
    const auto id = PointMap::identity(circle);
    const auto mu = DiscreteMeasure::dirac(circle, 0);
    CsvWriter csv({"box", "invariance_defect", "boundary_ratio"});
    for (int n = 2; n <= cfg.window; n *= 2) {
        const auto box = folner_box(GeneratedGroup::z(), n);
        const auto avg = folner_average(mu, act, id, box);
        csv.row({std::to_string(n), format_double(invariance_defect(avg, act, cfg.p)),
                 format_double(box.boundary_ratio)});
    }
    emit(cfg, "folner.csv", csv.str());
    return 0;
}

int run_paperchecks(const RunConfig& cfg) {
    checks::CheckConfig cc;
    cc.seed = cfg.seed;
    if (cfg.mesh_given) cc.collapse_mesh = cfg.mesh;
    cc.search_budget = cfg.budget;
    const auto results = checks::run_paper_checks(cc);
    std::cout << checks::format_results(results);
    if (!cfg.out.empty()) {
        CsvWriter csv({"check", "pass", "seconds", "budget_seconds"});
        for (const auto& r : results)
            csv.row({r.id, r.pass ? "1" : "0", format_double(r.seconds),
                     format_double(r.budget_seconds)});
        csv.write_file(cfg.out);
    }
    const auto passed = std::count_if(results.begin(), results.end(),
                                      [](const auto& r) { return r.pass; });
    std::cout << passed << "/" << results.size() << " checks passed\n";
    return checks::all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"equivariant Gromov-Hausdorff distances, shadowing and optimal transport"};
    app.require_subcommand(1);
    app.fallthrough();  // flags may follow the subcommand name

    RunConfig cfg;
    app.add_option("--scenario", cfg.scenario, "scenario name");
    app.add_option("--n", cfg.n, "family index n");
    app.add_option("--mesh", cfg.mesh, "grid mesh")->each([&cfg](const std::string&) {
        cfg.mesh_given = true;
    });
    app.add_option("--p", cfg.p, "Wasserstein order");
    app.add_option("--delta", cfg.deltas, "pseudo-orbit deltas");
    app.add_option("--window", cfg.window, "window radius / box limit");
    app.add_option("--budget", cfg.budget, "search budget");
    app.add_option("--seed", cfg.seed, "random seed (default 0)");
    app.add_option("--out", cfg.out, "output path");
    app.add_option("--tol", cfg.tol, "tolerance override");
    app.add_option("--x", cfg.x_path, "first space json");
    app.add_option("--y", cfg.y_path, "second space json");
    app.add_option("--space", cfg.space_path, "space json for measures");
    app.add_option("--mu", cfg.mu_path, "first measure json");
    app.add_option("--nu", cfg.nu_path, "second measure json");

    auto* gh = app.add_subcommand("gh", "Gromov-Hausdorff distance between two spaces");
    auto* egh = app.add_subcommand("egh", "equivariant GH certificate for a scenario");
    auto* shadow = app.add_subcommand("shadow", "shadowing sweep, CSV of (delta, eps, ratio)");
    auto* ot = app.add_subcommand("ot", "exact Wasserstein distance and coupling");
    auto* folner = app.add_subcommand("folner", "Folner-average invariance defects");
    auto* scenario = app.add_subcommand("scenario", "write a scenario bundle to disk");
    auto* paperchecks = app.add_subcommand("paperchecks", "run every bound check");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gh->parsed()) return run_gh(cfg);
        if (egh->parsed()) return run_egh(cfg);
        if (shadow->parsed()) return run_shadow(cfg);
        if (ot->parsed()) return run_ot(cfg);
        if (folner->parsed()) return run_folner(cfg);
        if (scenario->parsed()) return run_scenario(cfg);
        if (paperchecks->parsed()) return run_paperchecks(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
