#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "igeo/estimation.hpp"

namespace igeo {

using json = nlohmann::json;

// One entry of the experiment plan; params carries the type-specific
// fields verbatim.
struct experiment_spec {
    std::string name;
    std::string type;
    json params;
};

struct experiment_config {
    space_ptr space;
    statistical_model model;
    std::map<std::string, markov_kernel> kernels;
    std::map<std::string, estimator> estimators;
    std::map<std::string, phi_map> phis;
    std::vector<experiment_spec> experiments;
    std::map<std::string, double> tolerances;
    std::map<std::string, double> tolerance_overrides; // command-line; beat everything
    json canonical; // normalized echo of the parsed document
};

inline const std::map<std::string, double>& default_tolerances() {
    static const std::map<std::string, double> defaults{
        {"gram.psd", 1e-9},
        {"monotonicity.gap", 1e-9},
        {"sufficiency.discrepancy", 1e-10},
        {"cramer_rao.psd", 1e-9},
        {"cramer_rao.attained", 1e-10},
        {"cone.base", 1e-9},
    };
    return defaults;
}

namespace config_detail {

inline void check_keys(const json& j, const std::set<std::string>& allowed,
                       const std::string& where) {
    if (!j.is_object()) throw schema_error(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw schema_error(where + ": unknown field '" + it.key() + "'");
}

inline const json& need(const json& j, const std::string& key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw schema_error(where + ": missing field '" + key + "'");
    return *it;
}

inline std::vector<double> to_reals(const json& j, const std::string& where) {
    if (!j.is_array()) throw schema_error(where + ": expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& x : j) {
        if (!x.is_number()) throw schema_error(where + ": expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

inline std::vector<std::vector<double>> to_real_rows(const json& j, const std::string& where) {
    if (!j.is_array()) throw schema_error(where + ": expected an array of rows");
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(to_reals(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline matrix to_matrix(const json& j, const std::string& where) {
    auto rows = to_real_rows(j, where);
    if (rows.empty()) return matrix(0, 0);
    matrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size())
            throw schema_error(where + ": ragged matrix rows");
        for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
    }
    return m;
}

inline open_box to_box(const json& j, const std::string& where) {
    open_box box;
    if (!j.is_array()) throw schema_error(where + ": expected an array of [lo, hi] pairs");
    for (const auto& axis : j) {
        auto pair = to_reals(axis, where);
        if (pair.size() != 2 || !(pair[0] < pair[1]))
            throw validation_error(where + ": each axis needs lo < hi");
        box.axes.emplace_back(pair[0], pair[1]);
    }
    return box;
}

inline int to_order(const json& j, const std::string& where) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return order_infinity;
        throw schema_error(where + ": order must be a positive integer or \"inf\"");
    }
    if (!j.is_number_integer() || j.get<int>() < 1)
        throw schema_error(where + ": order must be a positive integer or \"inf\"");
    return j.get<int>();
}

inline probability_measure to_measure(const json& j, const space_ptr& space,
                                      const std::string& where) {
    auto w = to_reals(j, where);
    try {
        return probability_measure(space, std::move(w));
    } catch (const model_error& e) {
        throw validation_error(where + ": " + e.what());
    }
}

inline plot parse_plot(const json& j, const space_ptr& space, std::size_t index) {
    const std::string where = "model.plots[" + std::to_string(index) + "]";
    check_keys(j, {"kind", "mu0", "densities", "box", "origin", "path_dirs", "label", "points"},
               where);
    const std::string kind = need(j, "kind", where).get<std::string>();
    const std::string label = j.value("label", kind + " " + std::to_string(index));

    if (kind == "simplex") {
        auto p = full_simplex_plot(space, label);
        return p;
    }
    if (kind == "affine_mixture") {
        affine_mixture_spec spec{
            to_measure(need(j, "mu0", where), space, where + ".mu0"),
            to_real_rows(need(j, "densities", where), where + ".densities"),
            to_box(need(j, "box", where), where + ".box"),
            {},
            {}};
        if (j.contains("origin")) spec.origin = to_reals(j["origin"], where + ".origin");
        if (j.contains("path_dirs"))
            spec.path_dirs = to_real_rows(j["path_dirs"], where + ".path_dirs");
        try {
            return affine_mixture_plot(spec, label);
        } catch (const model_error& e) {
            throw validation_error(where + ": " + e.what());
        }
    }
    if (kind == "table") {
        // exact registered grid, no interpolation and no velocities
        struct entry {
            theta_vec theta;
            std::vector<double> weights;
        };
        std::vector<entry> entries;
        for (const auto& pt : need(j, "points", where)) {
            check_keys(pt, {"theta", "weights"}, where + ".points");
            entries.push_back({to_reals(need(pt, "theta", where), where),
                               to_measure(need(pt, "weights", where), space, where).weights});
        }
        if (entries.empty()) throw validation_error(where + ": table plot needs points");
        const std::size_t m = entries.front().theta.size();
        plot p;
        p.space = space;
        p.domain.axes.assign(m, {-1e100, 1e100});
        p.raw_eval = [entries](const theta_vec& t) {
            for (const auto& e : entries) {
                bool hit = e.theta.size() == t.size();
                for (std::size_t a = 0; hit && a < t.size(); ++a)
                    if (std::abs(e.theta[a] - t[a]) > 1e-12) hit = false;
                if (hit) return e.weights;
            }
            throw table_miss_error("table plot: theta is not a registered grid point");
        };
        p.label = label;
        return p;
    }
    throw schema_error(where + ": unknown plot kind '" + kind + "'");
}

inline markov_kernel parse_kernel(const json& j, const space_ptr& space,
                                  const std::string& name) {
    const std::string where = "kernels." + name;
    check_keys(j, {"target_atoms", "rows", "map"}, where);
    auto target_labels = need(j, "target_atoms", where).get<std::vector<std::string>>();
    space_ptr target;
    try {
        target = make_space(target_labels);
    } catch (const model_error& e) {
        throw validation_error(where + ": " + e.what());
    }
    if (j.contains("map")) {
        const auto& m = j["map"];
        if (!m.is_object()) throw schema_error(where + ".map: expected an object");
        std::vector<int> kappa(space->size(), -1);
        for (auto it = m.begin(); it != m.end(); ++it) {
            int src = space->index_of(it.key());
            if (src < 0)
                throw validation_error(where + ".map: unknown source atom '" + it.key() + "'");
            int tgt = target->index_of(it.value().get<std::string>());
            if (tgt < 0)
                throw validation_error(where + ".map: unknown target atom '" +
                                       it.value().get<std::string>() + "'");
            kappa[src] = tgt;
        }
        for (std::size_t i = 0; i < kappa.size(); ++i)
            if (kappa[i] < 0)
                throw validation_error(where + ".map: source atom '" + space->atoms[i] +
                                       "' is not mapped");
        return deterministic_kernel(space, target, kappa);
    }
    matrix rows = to_matrix(need(j, "rows", where), where + ".rows");
    try {
        return markov_kernel(space, target, std::move(rows));
    } catch (const model_error& e) {
        throw validation_error(where + ": " + e.what());
    }
}

inline estimator parse_estimator(const json& j, const space_ptr& space,
                                 const std::string& name) {
    const std::string where = "estimators." + name;
    check_keys(j, {"kind", "epsilon", "point", "points"}, where);
    const std::string kind = need(j, "kind", where).get<std::string>();
    if (kind == "plug_in") return plug_in_estimator(space);
    if (kind == "smoothed") {
        double eps = need(j, "epsilon", where).get<double>();
        if (!(eps >= 0.0 && eps <= 1.0))
            throw validation_error(where + ": epsilon must lie in [0, 1]");
        return smoothed_plugin_estimator(space, eps);
    }
    if (kind == "constant")
        return constant_estimator(to_measure(need(j, "point", where), space, where + ".point"));
    if (kind == "table") {
        std::vector<probability_measure> pts;
        const auto& rows = need(j, "points", where);
        for (std::size_t i = 0; i < rows.size(); ++i)
            pts.push_back(to_measure(rows[i], space, where + ".points[" + std::to_string(i) + "]"));
        try {
            return estimator(space, std::move(pts));
        } catch (const model_error& e) {
            throw validation_error(where + ": " + e.what());
        }
    }
    throw schema_error(where + ": unknown estimator kind '" + kind + "'");
}

inline phi_map parse_phi(const json& j, const space_ptr& space, const statistical_model& model,
                         const std::string& name) {
    const std::string where = "phis." + name;
    check_keys(j, {"kind", "indices", "atoms", "matrix", "dim", "points", "plot", "thetas"},
               where);
    const std::string kind = need(j, "kind", where).get<std::string>();
    try {
        if (kind == "coordinate") {
            std::vector<std::size_t> idx;
            if (j.contains("atoms")) {
                for (const auto& a : j["atoms"]) {
                    int i = space->index_of(a.get<std::string>());
                    if (i < 0)
                        throw validation_error(where + ": unknown atom '" +
                                               a.get<std::string>() + "'");
                    idx.push_back(static_cast<std::size_t>(i));
                }
            } else {
                for (const auto& i : need(j, "indices", where))
                    idx.push_back(i.get<std::size_t>());
            }
            return phi_map::coordinate(space, std::move(idx));
        }
        if (kind == "kernel_embedding")
            return phi_map::kernel_embedding(to_matrix(need(j, "matrix", where), where + ".matrix"));
        if (kind == "table") {
            std::vector<std::pair<std::vector<double>, std::vector<double>>> pts;
            for (const auto& pt : need(j, "points", where)) {
                check_keys(pt, {"weights", "value"}, where + ".points");
                pts.emplace_back(to_measure(need(pt, "weights", where), space, where).weights,
                                 to_reals(need(pt, "value", where), where));
            }
            return phi_map::table(need(j, "dim", where).get<std::size_t>(), std::move(pts));
        }
        if (kind == "parameter") {
            std::size_t pi = need(j, "plot", where).get<std::size_t>();
            if (pi >= model.plots.size())
                throw validation_error(where + ": plot index out of range");
            std::vector<theta_vec> thetas;
            for (const auto& t : need(j, "thetas", where)) thetas.push_back(to_reals(t, where));
            return phi_map::parameter(model.plots[pi], thetas);
        }
    } catch (const model_error& e) {
        throw validation_error(where + ": " + e.what());
    }
    throw schema_error(where + ": unknown phi kind '" + kind + "'");
}

inline const std::set<std::string>& experiment_types() {
    static const std::set<std::string> types{"fisher_gram",  "integrability",
                                             "cone_probe",   "pushforward",
                                             "sufficiency",  "monotonicity_sweep",
                                             "cramer_rao"};
    return types;
}

} // namespace config_detail

inline experiment_config parse_config_json(const json& doc) {
    using namespace config_detail;
    check_keys(doc, {"space", "model", "kernels", "estimators", "phis", "experiments",
                     "tolerances"},
               "config");

    const json& jspace = need(doc, "space", "config");
    check_keys(jspace, {"atoms"}, "space");
    space_ptr space;
    try {
        space = make_space(need(jspace, "atoms", "space").get<std::vector<std::string>>());
    } catch (const model_error& e) {
        throw validation_error(std::string("space: ") + e.what());
    }

    const json& jmodel = need(doc, "model", "config");
    check_keys(jmodel, {"order", "plots"}, "model");
    std::vector<plot> plots;
    const json& jplots = need(jmodel, "plots", "model");
    for (std::size_t i = 0; i < jplots.size(); ++i)
        plots.push_back(parse_plot(jplots[i], space, i));
    if (plots.empty()) throw validation_error("model: needs at least one plot");
    int order = jmodel.contains("order") ? to_order(jmodel["order"], "model.order") : 1;
    statistical_model model(space, std::move(plots), order);

    experiment_config cfg{space, std::move(model), {}, {}, {}, {}, default_tolerances(), {}, doc};

    if (doc.contains("kernels"))
        for (auto it = doc["kernels"].begin(); it != doc["kernels"].end(); ++it)
            cfg.kernels.emplace(it.key(), parse_kernel(it.value(), space, it.key()));

    if (doc.contains("estimators"))
        for (auto it = doc["estimators"].begin(); it != doc["estimators"].end(); ++it)
            cfg.estimators.emplace(it.key(), parse_estimator(it.value(), space, it.key()));

    if (doc.contains("phis"))
        for (auto it = doc["phis"].begin(); it != doc["phis"].end(); ++it)
            cfg.phis.emplace(it.key(), parse_phi(it.value(), space, cfg.model, it.key()));

    if (doc.contains("tolerances")) {
        if (!doc["tolerances"].is_object())
            throw schema_error("tolerances: expected an object of name -> number");
        for (auto it = doc["tolerances"].begin(); it != doc["tolerances"].end(); ++it) {
            if (!it.value().is_number())
                throw schema_error("tolerances." + it.key() + ": expected a number");
            cfg.tolerances[it.key()] = it.value().get<double>();
        }
    }

    if (doc.contains("experiments")) {
        std::set<std::string> names;
        for (const auto& je : doc["experiments"]) {
            if (!je.is_object()) throw schema_error("experiments: expected objects");
            experiment_spec spec;
            spec.name = need(je, "name", "experiments").get<std::string>();
            spec.type = need(je, "type", "experiments").get<std::string>();
            if (!experiment_types().count(spec.type))
                throw schema_error("experiment '" + spec.name + "': unknown type '" + spec.type +
                                   "'");
            if (!names.insert(spec.name).second)
                throw validation_error("experiment '" + spec.name + "' is declared twice");
            spec.params = je;
            spec.params.erase("name");
            spec.params.erase("type");
            cfg.experiments.push_back(std::move(spec));
        }
    }

    // cross-reference checks
    for (const auto& spec : cfg.experiments) {
        const std::string where = "experiment '" + spec.name + "'";
        if (spec.params.contains("kernel") &&
            !cfg.kernels.count(spec.params["kernel"].get<std::string>()))
            throw validation_error(where + ": kernel '" +
                                   spec.params["kernel"].get<std::string>() + "' is not declared");
        if (spec.params.contains("estimator") &&
            !cfg.estimators.count(spec.params["estimator"].get<std::string>()))
            throw validation_error(where + ": estimator '" +
                                   spec.params["estimator"].get<std::string>() +
                                   "' is not declared");
        if (spec.params.contains("phi") &&
            !cfg.phis.count(spec.params["phi"].get<std::string>()))
            throw validation_error(where + ": phi '" + spec.params["phi"].get<std::string>() +
                                   "' is not declared");
        if (spec.params.contains("plot") &&
            spec.params["plot"].get<std::size_t>() >= cfg.model.plots.size())
            throw validation_error(where + ": plot index out of range");
    }
    return cfg;
}

inline experiment_config parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(std::string("config is not well-formed JSON: ") + e.what());
    }
    return parse_config_json(doc);
}

inline experiment_config parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

// Canonical serialization of a parsed config; re-parsing it yields an
// equivalent configuration.
inline json config_to_json(const experiment_config& cfg) { return cfg.canonical; }

} // namespace igeo
