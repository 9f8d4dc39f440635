#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "igeo/plot.hpp"

namespace igeo {

// A statistical model presented by a finite family of plots into P(X).
// Constant maps are admitted implicitly (covering axiom); closure under
// precomposition is honored by construction: callers register already
// precomposed plots.
struct statistical_model {
    space_ptr space;
    std::vector<plot> plots;
    int order = 1;

    statistical_model(space_ptr sp, std::vector<plot> ps, int k = 1)
        : space(std::move(sp)), plots(std::move(ps)), order(k) {
        if (plots.empty()) throw model_error("statistical_model: needs at least one plot");
        for (const auto& p : plots)
            require_same_space(space, p.space, "statistical_model");
    }
};

// --- integrability ----------------------------------------------------------

// Parameter grids at two or more refinement levels; points_per_axis
// lists the per-axis node count of each level.  Nodes are inset from
// the open box by `margin` (relative to the axis width, and never less
// than the finite-difference stencil) and dropped when the plot or its
// difference stencil is infeasible there (curved feasible regions are
// over-approximated by the box).
struct grid_spec {
    std::vector<int> points_per_axis = {5, 9};
    double margin = 1e-3;
};

namespace detail {

inline bool stencil_feasible(const plot& p, const theta_vec& t) {
    try {
        plot_point(p, t);
        for (std::size_t a = 0; a < p.domain_dim(); ++a) {
            const double h = fd_step(t[a]);
            theta_vec tp = t, tm = t;
            tp[a] += h;
            tm[a] -= h;
            if (!p.domain.contains(tp) || !p.domain.contains(tm)) return false;
            plot_point(p, tp);
            plot_point(p, tm);
        }
    } catch (const error&) {
        return false;
    }
    return true;
}

struct level_grid {
    std::vector<theta_vec> nodes;
    std::vector<std::vector<int>> coords; // lattice coordinates of each node
    std::vector<double> steps;            // per-axis spacing
    int per_axis = 0;
};

inline level_grid make_level_grid(const plot& p, int per_axis, double margin) {
    level_grid g;
    g.per_axis = per_axis;
    const std::size_t m = p.domain_dim();
    if (m == 0) {
        if (stencil_feasible(p, {})) {
            g.nodes.push_back({});
            g.coords.push_back({});
        }
        return g;
    }
    std::vector<double> lo(m), step(m);
    for (std::size_t a = 0; a < m; ++a) {
        const double width = p.domain.axes[a].second - p.domain.axes[a].first;
        double inset = std::max(margin * width, 4.0 * fd_step(std::max(
                                                    std::abs(p.domain.axes[a].first),
                                                    std::abs(p.domain.axes[a].second))));
        lo[a] = p.domain.axes[a].first + inset;
        step[a] = (per_axis > 1) ? (width - 2.0 * inset) / (per_axis - 1) : 0.0;
    }
    g.steps = step;
    std::vector<int> idx(m, 0);
    while (true) {
        theta_vec t(m);
        for (std::size_t a = 0; a < m; ++a) t[a] = lo[a] + idx[a] * step[a];
        if (stencil_feasible(p, t)) {
            g.nodes.push_back(t);
            g.coords.push_back(idx);
        }
        std::size_t a = 0;
        while (a < m && ++idx[a] == per_axis) idx[a++] = 0;
        if (a == m) break;
    }
    return g;
}

} // namespace detail

struct integrability_point {
    theta_vec theta;
    bool almost2_ok = true;
    std::string note;
};

struct plot_integrability {
    int plot_index = 0;
    std::string label;
    std::vector<integrability_point> points; // finest level
    std::vector<double> continuity_scores;   // one per refinement level
    bool almost2_all = true;
    bool scores_stable = true;
    std::string verdict;
    int infeasible_nodes_skipped = 0;
};

struct integrability_summary {
    std::vector<plot_integrability> plots;
    bool all_almost2() const {
        for (const auto& p : plots)
            if (!p.almost2_all) return false;
        return true;
    }
};

// For every plot and grid node: can all coordinate velocities be
// represented logarithmically (domination + finite log)?  The
// continuity score of v -> |dp(v)|_g is the largest norm deviation
// between axis-adjacent nodes divided by the step; the model counts as
// numerically 2-integrable when the score stabilizes across refinement
// levels (consecutive ratio within [0.5, 2]).
inline integrability_summary integrability_report(const statistical_model& model,
                                                  const grid_spec& spec = {}) {
    if (spec.points_per_axis.size() < 2)
        throw validation_error("integrability_report: need at least two refinement levels");
    integrability_summary summary;
    for (std::size_t pi = 0; pi < model.plots.size(); ++pi) {
        const plot& p = model.plots[pi];
        plot_integrability rep;
        rep.plot_index = static_cast<int>(pi);
        rep.label = p.label;
        const std::size_t m = p.domain_dim();

        for (std::size_t lvl = 0; lvl < spec.points_per_axis.size(); ++lvl) {
            const bool finest = (lvl + 1 == spec.points_per_axis.size());
            auto grid = detail::make_level_grid(p, spec.points_per_axis[lvl], spec.margin);
            const int full = (m == 0) ? 1
                                      : static_cast<int>(std::pow(
                                            static_cast<double>(spec.points_per_axis[lvl]),
                                            static_cast<double>(m)));
            if (finest)
                rep.infeasible_nodes_skipped = full - static_cast<int>(grid.nodes.size());

            // per-node velocity norms for each coordinate direction
            std::vector<std::vector<double>> norms(grid.nodes.size(),
                                                   std::vector<double>(m, 0.0));
            for (std::size_t ni = 0; ni < grid.nodes.size(); ++ni) {
                integrability_point pt;
                pt.theta = grid.nodes[ni];
                for (std::size_t a = 0; a < m; ++a) {
                    std::vector<double> e(m, 0.0);
                    e[a] = 1.0;
                    try {
                        tangent_vector tv = plot_velocity(p, grid.nodes[ni], e);
                        norms[ni][a] = std::sqrt(std::max(0.0, fisher_norm2(tv)));
                    } catch (const error& err) {
                        pt.almost2_ok = false;
                        pt.note = err.what();
                        rep.almost2_all = false;
                        norms[ni][a] = std::numeric_limits<double>::quiet_NaN();
                    }
                }
                if (finest) rep.points.push_back(std::move(pt));
            }

            // adjacency along each axis among surviving nodes
            double score = 0.0;
            for (std::size_t ni = 0; ni < grid.nodes.size(); ++ni)
                for (std::size_t nj = ni + 1; nj < grid.nodes.size(); ++nj) {
                    int diff_axis = -1;
                    bool adjacent = true;
                    for (std::size_t a = 0; a < m && adjacent; ++a) {
                        int d = grid.coords[nj][a] - grid.coords[ni][a];
                        if (d == 0) continue;
                        if (std::abs(d) == 1 && diff_axis < 0)
                            diff_axis = static_cast<int>(a);
                        else
                            adjacent = false;
                    }
                    if (!adjacent || diff_axis < 0) continue;
                    for (std::size_t a = 0; a < m; ++a) {
                        double d = std::abs(norms[nj][a] - norms[ni][a]);
                        if (std::isfinite(d)) score = std::max(d / grid.steps[diff_axis], score);
                    }
                }
            rep.continuity_scores.push_back(score);
        }

        for (std::size_t lvl = 0; lvl + 1 < rep.continuity_scores.size(); ++lvl) {
            double a = rep.continuity_scores[lvl], b = rep.continuity_scores[lvl + 1];
            if (a < 1e-12 && b < 1e-12) continue; // flat metric: stable
            double ratio = (a > 0.0) ? b / a : std::numeric_limits<double>::infinity();
            if (!(ratio >= 0.5 && ratio <= 2.0)) rep.scores_stable = false;
        }
        if (rep.points.empty())
            rep.verdict = "no feasible grid nodes";
        else if (!rep.almost2_all)
            rep.verdict = "not almost 2-integrable";
        else if (rep.scores_stable)
            rep.verdict = "2-integrable (numerically)";
        else
            rep.verdict = "almost 2-integrable (continuity unstable)";
        summary.plots.push_back(std::move(rep));
    }
    return summary;
}

// --- tangent cone probe -----------------------------------------------------

struct cone_probe_report {
    probability_measure base;
    std::vector<signed_measure> directions; // unit representatives, one per line
    int span_dim = 0;
    bool is_linear = true;
};

// Probes the tangent cone at xi with user-supplied curves (1-parameter
// plots through xi at t = 0).  Velocities are deduplicated up to sign
// and scale into direction lines; span_dim is the numerical rank.  The
// positive hull of the probed velocities equals their span exactly
// when it is closed under negation, so is_linear tests each velocity's
// negation for membership in the hull by nonnegative least squares.
inline cone_probe_report tangent_cone_probe(const statistical_model& model,
                                            const probability_measure& xi,
                                            const std::vector<plot>& curves) {
    require_same_space(model.space, xi.space, "tangent_cone_probe");
    const std::size_t n = xi.size();
    std::vector<std::vector<double>> velocities; // unit-normalized, signs kept

    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
        const plot& c = curves[ci];
        if (c.domain_dim() != 1)
            throw validation_error("tangent_cone_probe: curve " + std::to_string(ci) +
                                   " is not 1-dimensional");
        require_same_space(c.space, xi.space, "tangent_cone_probe");
        probability_measure at0 = plot_point(c, {0.0});
        if (!measures_equal(at0.weights, xi.weights, 1e-9))
            throw curve_base_error("tangent_cone_probe: curve " + std::to_string(ci) +
                                   " misses the base point at t = 0");
        tangent_vector tv = plot_velocity(c, {0.0}, {1.0});
        double len = norm2(tv.direction.weights);
        if (len <= 1e-12) continue; // constant curve: trivial cone member
        std::vector<double> u = tv.direction.weights;
        for (double& x : u) x /= len;
        velocities.push_back(std::move(u));
    }

    cone_probe_report rep{xi, {}, 0, true};

    // one representative per line (|cosine| above 1 - 1e-6)
    std::vector<std::vector<double>> lines;
    for (const auto& u : velocities) {
        bool dup = false;
        for (const auto& l : lines)
            if (std::abs(dot(u, l)) > 1.0 - 1e-6) {
                dup = true;
                break;
            }
        if (!dup) lines.push_back(u);
    }
    for (const auto& l : lines) rep.directions.emplace_back(xi.space, l);

    if (lines.empty()) return rep;

    matrix dir_mat(lines.size(), n);
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t j = 0; j < n; ++j) dir_mat(i, j) = lines[i][j];
    rep.span_dim = numerical_rank(dir_mat, 1e-9);

    matrix hull(n, velocities.size());
    for (std::size_t j = 0; j < velocities.size(); ++j)
        for (std::size_t i = 0; i < n; ++i) hull(i, j) = velocities[j][i];
    for (const auto& u : velocities) {
        std::vector<double> neg(n);
        for (std::size_t i = 0; i < n; ++i) neg[i] = -u[i];
        if (nnls_residual(hull, neg) > 1e-6) {
            rep.is_linear = false;
            break;
        }
    }
    return rep;
}

// --- pushforward under a linear map on measures (used by markov) ------------

namespace detail {
// Compose every plot with a linear weight map given by its action
// matrix (columns indexed by source atoms).
inline statistical_model map_model(const statistical_model& model, const space_ptr& target,
                                   const matrix& action, const std::string& suffix) {
    std::vector<plot> pushed;
    pushed.reserve(model.plots.size());
    for (const auto& p : model.plots) {
        plot q;
        q.space = target;
        q.domain = p.domain;
        q.order = p.order;
        q.label = p.label.empty() ? suffix : p.label + suffix;
        auto raw = p.raw_eval;
        q.raw_eval = [raw, action](const theta_vec& t) {
            return mat_vec(action, raw(t));
        };
        if (p.has_jacobian()) {
            auto jac = p.jacobian;
            q.jacobian = [jac, action](const theta_vec& t) { return action * jac(t); };
        }
        pushed.push_back(std::move(q));
    }
    return statistical_model(target, std::move(pushed), model.order);
}
} // namespace detail

} // namespace igeo
