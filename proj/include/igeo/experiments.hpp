#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "igeo/config.hpp"
#include "igeo/report.hpp"
#include "igeo/rng.hpp"

namespace igeo {

namespace experiment_detail {

inline json matrix_json(const matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols; ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json reals_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

inline double tol_of(const experiment_config& cfg, const experiment_spec& spec,
                     const std::string& key, const std::string& param) {
    if (auto it = cfg.tolerance_overrides.find(key); it != cfg.tolerance_overrides.end())
        return it->second;
    if (spec.params.contains(param)) return spec.params[param].get<double>();
    auto it = cfg.tolerances.find(key);
    if (it != cfg.tolerances.end()) return it->second;
    return default_tolerances().at(key);
}

inline grid_spec grid_of(const experiment_spec& spec) {
    grid_spec g{{9, 17}, 0.05};
    if (spec.params.contains("levels"))
        g.points_per_axis = spec.params["levels"].get<std::vector<int>>();
    if (spec.params.contains("margin")) g.margin = spec.params["margin"].get<double>();
    return g;
}

inline std::vector<theta_vec> thetas_of(const experiment_spec& spec, const std::string& where) {
    std::vector<theta_vec> out;
    for (const auto& t : config_detail::need(spec.params, "thetas", where))
        out.push_back(config_detail::to_reals(t, where + ".thetas"));
    return out;
}

inline std::vector<report_record> run_fisher_gram(const experiment_config& cfg,
                                                  const experiment_spec& spec) {
    const std::string where = "experiment '" + spec.name + "'";
    std::size_t pi = spec.params.value("plot", 0u);
    const plot& p = cfg.model.plots.at(pi);
    const double psd_tol = tol_of(cfg, spec, "gram.psd", "psd_tol");
    std::vector<report_record> records;
    int index = 0;
    for (const auto& theta : thetas_of(spec, where)) {
        report_record r;
        r.experiment = spec.name;
        r.type = spec.type;
        r.index = index++;
        r.inputs = {{"plot", pi}, {"theta", reals_json(theta)}, {"label", p.label}};
        matrix g = fisher_gram(p, theta);
        double min_eig = g.rows ? min_eigenvalue(g) : 0.0;
        r.results = {{"gram", matrix_json(g)}, {"min_eigenvalue", min_eig}};
        r.verdicts["symmetric"] = is_symmetric(g, 1e-12);
        r.verdicts["psd"] = min_eig >= -psd_tol;
        r.tolerances["psd"] = psd_tol;
        records.push_back(std::move(r));
    }
    return records;
}

inline std::vector<report_record> run_integrability(const experiment_config& cfg,
                                                    const experiment_spec& spec) {
    auto grid = grid_of(spec);
    const bool expect_almost2 = spec.params.value("expect_almost2", true);
    auto summary = integrability_report(cfg.model, grid);
    std::vector<report_record> records;
    for (const auto& pr : summary.plots) {
        report_record r;
        r.experiment = spec.name;
        r.type = spec.type;
        r.index = pr.plot_index;
        r.inputs = {{"plot", pr.plot_index},
                    {"label", pr.label},
                    {"levels", json(grid.points_per_axis)},
                    {"margin", grid.margin}};
        json flagged = json::array();
        for (const auto& pt : pr.points)
            if (!pt.almost2_ok)
                flagged.push_back({{"theta", reals_json(pt.theta)}, {"note", pt.note}});
        r.results = {{"continuity_scores", reals_json(pr.continuity_scores)},
                     {"almost2_all", pr.almost2_all},
                     {"grid_points", static_cast<int>(pr.points.size())},
                     {"infeasible_nodes_skipped", pr.infeasible_nodes_skipped},
                     {"flagged_points", flagged},
                     {"verdict", pr.verdict}};
        r.verdicts["almost2_as_expected"] = pr.almost2_all == expect_almost2;
        if (expect_almost2) r.verdicts["scores_stable"] = pr.scores_stable;
        r.tolerances["score_ratio_low"] = 0.5;
        r.tolerances["score_ratio_high"] = 2.0;
        records.push_back(std::move(r));
    }
    return records;
}

inline std::vector<report_record> run_cone_probe(const experiment_config& cfg,
                                                 const experiment_spec& spec) {
    const std::string where = "experiment '" + spec.name + "'";
    std::vector<report_record> records;
    int index = 0;
    for (const auto& jpt : config_detail::need(spec.params, "points", where)) {
        config_detail::check_keys(jpt,
                                  {"label", "plot", "theta", "curves", "expect_span",
                                   "expect_linear"},
                                  where + ".points");
        std::size_t pi = config_detail::need(jpt, "plot", where).get<std::size_t>();
        auto theta = config_detail::to_reals(config_detail::need(jpt, "theta", where), where);
        auto xi = plot_point(cfg.model.plots.at(pi), theta);

        std::vector<plot> curves;
        for (const auto& jc : config_detail::need(jpt, "curves", where)) {
            config_detail::check_keys(jc, {"plot", "theta0", "dir", "half_width"},
                                      where + ".curves");
            std::size_t ci = config_detail::need(jc, "plot", where).get<std::size_t>();
            curves.push_back(restrict_to_line(
                cfg.model.plots.at(ci),
                config_detail::to_reals(config_detail::need(jc, "theta0", where), where),
                config_detail::to_reals(config_detail::need(jc, "dir", where), where),
                jc.value("half_width", 0.1)));
        }
        auto rep = tangent_cone_probe(cfg.model, xi, curves);

        report_record r;
        r.experiment = spec.name;
        r.type = spec.type;
        r.index = index++;
        r.inputs = {{"label", jpt.value("label", "point " + std::to_string(r.index))},
                    {"plot", pi},
                    {"theta", reals_json(theta)},
                    {"curves", static_cast<int>(curves.size())}};
        json dirs = json::array();
        for (const auto& d : rep.directions) dirs.push_back(reals_json(d.weights));
        r.results = {{"span_dim", rep.span_dim},
                     {"is_linear", rep.is_linear},
                     {"directions", dirs},
                     {"lines", static_cast<int>(rep.directions.size())}};
        if (jpt.contains("expect_span"))
            r.verdicts["span_dim"] = rep.span_dim == jpt["expect_span"].get<int>();
        if (jpt.contains("expect_linear"))
            r.verdicts["is_linear"] = rep.is_linear == jpt["expect_linear"].get<bool>();
        r.tolerances["rank_singular_value"] = 1e-9;
        r.tolerances["hull_residual"] = 1e-6;
        records.push_back(std::move(r));
    }
    return records;
}

inline std::vector<report_record> run_pushforward(const experiment_config& cfg,
                                                  const experiment_spec& spec) {
    const std::string where = "experiment '" + spec.name + "'";
    const std::string kname = config_detail::need(spec.params, "kernel", where).get<std::string>();
    const auto& kernel = cfg.kernels.at(kname);
    auto pushed = pushforward_model(kernel, cfg.model);
    auto grid = grid_of(spec);
    auto summary = integrability_report(pushed, grid);

    std::vector<report_record> records;
    for (std::size_t pi = 0; pi < pushed.plots.size(); ++pi) {
        report_record r;
        r.experiment = spec.name;
        r.type = spec.type;
        r.index = static_cast<int>(pi);
        r.inputs = {{"kernel", kname}, {"plot", pi}, {"label", cfg.model.plots[pi].label}};
        auto nodes = detail::make_level_grid(pushed.plots[pi], grid.points_per_axis.back(),
                                             grid.margin);
        auto check = validate_plot(pushed.plots[pi], nodes.nodes);
        const auto& pr = summary.plots[pi];
        r.results = {{"plot_invariants_ok", check.ok},
                     {"plot_invariants_note", check.message},
                     {"almost2_all", pr.almost2_all},
                     {"verdict", pr.verdict},
                     {"grid_points", static_cast<int>(pr.points.size())}};
        r.verdicts["plot_invariants"] = check.ok;
        r.verdicts["almost2_all"] = pr.almost2_all;
        r.tolerances["jacobian_col_sum"] = 1e-9;
        r.tolerances["jacobian_fd_rel"] = 1e-6;
        records.push_back(std::move(r));
    }
    return records;
}

inline std::vector<report_record> run_sufficiency(const experiment_config& cfg,
                                                  const experiment_spec& spec) {
    const std::string where = "experiment '" + spec.name + "'";
    const std::string kname = config_detail::need(spec.params, "kernel", where).get<std::string>();
    const auto& kernel = cfg.kernels.at(kname);
    const double tol = tol_of(cfg, spec, "sufficiency.discrepancy", "tol");
    const bool expect = spec.params.value("expect_sufficient", true);

    std::vector<probability_measure> sample;
    if (spec.params.contains("sample")) {
        for (const auto& row : spec.params["sample"])
            sample.push_back(config_detail::to_measure(row, cfg.space, where + ".sample"));
    } else {
        // sample the model itself on the listed plot parameters
        std::size_t pi = spec.params.value("plot", 0u);
        for (const auto& theta : thetas_of(spec, where))
            sample.push_back(plot_point(cfg.model.plots.at(pi), theta));
    }

    auto rep = check_sufficiency(kernel, sample, tol);
    report_record r;
    r.experiment = spec.name;
    r.type = spec.type;
    r.inputs = {{"kernel", kname}, {"sample_size", static_cast<int>(sample.size())}};
    json cond = json::object();
    for (std::size_t y = 0; y < rep.conditional.size(); ++y)
        if (rep.conditional[y])
            cond[kernel.target->atoms[y]] = reals_json(rep.conditional[y]->weights);
    r.results = {{"is_sufficient", rep.is_sufficient},
                 {"max_discrepancy", rep.max_discrepancy},
                 {"conditional", cond}};
    r.verdicts["sufficiency_as_expected"] = rep.is_sufficient == expect;
    r.tolerances["discrepancy"] = tol;
    return {r};
}

inline std::vector<report_record> run_monotonicity_sweep(const experiment_config& cfg,
                                                         const experiment_spec& spec,
                                                         std::uint64_t seed) {
    const std::string where = "experiment '" + spec.name + "'";
    const int count = spec.params.value("count", 200);
    const std::size_t target_n = spec.params.value("target_atoms", cfg.space->size());
    const double tol = tol_of(cfg, spec, "monotonicity.gap", "tol");
    auto target = make_space(target_n, "y");

    std::vector<report_record> records;
    records.reserve(count);
    for (int k = 0; k < count; ++k) {
        counter_rng rng(seed, static_cast<std::uint64_t>(k));
        auto xi = random_interior_measure(rng, cfg.space);
        tangent_vector v(xi, random_zero_sum_direction(rng, cfg.space));
        // random strictly positive rows keep the pushed base dominating
        matrix rows(cfg.space->size(), target_n);
        for (std::size_t i = 0; i < rows.rows; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < rows.cols; ++j) {
                rows(i, j) = 1e-3 - std::log(1.0 - rng.next_double());
                sum += rows(i, j);
            }
            for (std::size_t j = 0; j < rows.cols; ++j) rows(i, j) /= sum;
        }
        markov_kernel t(cfg.space, target, std::move(rows));
        double gap = monotonicity_gap(t, v);

        report_record r;
        r.experiment = spec.name;
        r.type = spec.type;
        r.index = k;
        r.inputs = {{"seed", seed}, {"record", k}, {"target_atoms", target_n}};
        r.results = {{"gap", gap},
                     {"norm_before", fisher_norm2(v)},
                     {"norm_after", fisher_norm2(v) - gap}};
        r.verdicts["gap_nonnegative"] = gap >= -tol;
        r.tolerances["gap"] = tol;
        records.push_back(std::move(r));
    }
    return records;
}

inline std::vector<report_record> run_cramer_rao(const experiment_config& cfg,
                                                 const experiment_spec& spec) {
    const std::string where = "experiment '" + spec.name + "'";
    const auto& sigma =
        cfg.estimators.at(config_detail::need(spec.params, "estimator", where).get<std::string>());
    const auto& phi =
        cfg.phis.at(config_detail::need(spec.params, "phi", where).get<std::string>());
    const double psd_tol = tol_of(cfg, spec, "cramer_rao.psd", "psd_tol");
    const double attain_tol = tol_of(cfg, spec, "cramer_rao.attained", "attain_tol");
    const bool require_attained = spec.params.value("require_attained", false);

    probability_measure xi =
        spec.params.contains("xi")
            ? config_detail::to_measure(spec.params["xi"], cfg.space, where + ".xi")
            : plot_point(cfg.model.plots.at(spec.params.value("plot", 0u)),
                         config_detail::to_reals(
                             config_detail::need(spec.params, "theta", where), where));

    // tangent basis: the full-simplex coordinate velocities at xi
    auto simplex = full_simplex_plot(cfg.space);
    theta_vec theta(xi.weights.begin(), xi.weights.end() - 1);
    std::vector<tangent_vector> basis;
    for (std::size_t a = 0; a + 1 < xi.size(); ++a) {
        std::vector<double> e(xi.size() - 1, 0.0);
        e[a] = 1.0;
        basis.push_back(plot_velocity(simplex, theta, e));
    }

    auto var = variance_form(sigma, phi, xi);
    auto inv = inverse_fisher_form(sigma, phi, xi, basis);
    auto gap = cramer_rao_gap(sigma, phi, xi, basis);
    const double gmax = max_abs(gap.m);
    auto regular = check_phi_regular(sigma, phi, cfg.model, grid_spec{{5, 9}, 0.05});

    report_record r;
    r.experiment = spec.name;
    r.type = spec.type;
    r.inputs = {{"estimator", spec.params["estimator"]},
                {"phi", spec.params["phi"]},
                {"xi", reals_json(xi.weights)}};
    r.results = {{"variance", matrix_json(var.m)},
                 {"inverse_fisher", matrix_json(inv.m)},
                 {"gap", matrix_json(gap.m)},
                 {"gap_min_eigenvalue", gap.min_eig},
                 {"gap_max_abs", gmax},
                 {"bias", reals_json(bias(sigma, phi, xi))},
                 {"attained", gmax <= attain_tol},
                 {"regularity",
                  {{"sup_l2_norms", reals_json(regular.sup_l2_norm)},
                   {"verdict", regular.verdict}}}};
    r.verdicts["gap_psd"] = gap.min_eig >= -psd_tol;
    if (require_attained) r.verdicts["attained"] = gmax <= attain_tol;
    r.tolerances["psd"] = psd_tol;
    r.tolerances["attained"] = attain_tol;
    return {r};
}

} // namespace experiment_detail

// Runs one declared experiment; deterministic given (config, seed).
inline std::vector<report_record> run_experiment(const experiment_config& cfg,
                                                 const std::string& name, std::uint64_t seed) {
    using namespace experiment_detail;
    const experiment_spec* found = nullptr;
    for (const auto& spec : cfg.experiments)
        if (spec.name == name) found = &spec;
    if (!found) throw validation_error("experiment '" + name + "' is not declared in the config");
    const auto& spec = *found;

    auto started = std::chrono::steady_clock::now();
    std::vector<report_record> records;
    try {
        if (spec.type == "fisher_gram") records = run_fisher_gram(cfg, spec);
        else if (spec.type == "integrability") records = run_integrability(cfg, spec);
        else if (spec.type == "cone_probe") records = run_cone_probe(cfg, spec);
        else if (spec.type == "pushforward") records = run_pushforward(cfg, spec);
        else if (spec.type == "sufficiency") records = run_sufficiency(cfg, spec);
        else if (spec.type == "monotonicity_sweep")
            records = run_monotonicity_sweep(cfg, spec, seed);
        else if (spec.type == "cramer_rao") records = run_cramer_rao(cfg, spec);
        else throw schema_error("experiment '" + name + "': unknown type '" + spec.type + "'");
    } catch (const error&) {
        throw;
    } catch (const json::exception& e) {
        throw schema_error("experiment '" + name + "': " + e.what());
    }
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                          started)
                    .count() /
                std::max<std::size_t>(1, records.size());
    for (auto& r : records) r.wall_ms = ms;
    return records;
}

inline std::vector<report_record> run_all_experiments(const experiment_config& cfg,
                                                      std::uint64_t seed) {
    std::vector<report_record> all;
    for (const auto& spec : cfg.experiments) {
        auto batch = run_experiment(cfg, spec.name, seed);
        all.insert(all.end(), batch.begin(), batch.end());
    }
    return all;
}

} // namespace igeo
