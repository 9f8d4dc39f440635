#pragma once

#include <cassert>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "igeo/kernel.hpp"

namespace igeo {

// An estimator assigns a point of P(X) to every atom of X.
struct estimator {
    space_ptr space;
    std::vector<probability_measure> assignment; // one measure per source atom

    estimator(space_ptr sp, std::vector<probability_measure> points)
        : space(std::move(sp)), assignment(std::move(points)) {
        if (assignment.size() != space->size())
            throw model_error("estimator: needs one point per atom");
        for (const auto& m : assignment) require_same_space(space, m.space, "estimator");
    }
};

inline estimator plug_in_estimator(const space_ptr& space) {
    std::vector<probability_measure> pts;
    for (std::size_t i = 0; i < space->size(); ++i) {
        std::vector<double> w(space->size(), 0.0);
        w[i] = 1.0;
        pts.emplace_back(space, std::move(w));
    }
    return estimator(space, std::move(pts));
}

// (1-eps) * delta_x + eps * uniform
inline estimator smoothed_plugin_estimator(const space_ptr& space, double eps) {
    const std::size_t n = space->size();
    std::vector<probability_measure> pts;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> w(n, eps / static_cast<double>(n));
        w[i] += 1.0 - eps;
        pts.emplace_back(space, std::move(w));
    }
    return estimator(space, std::move(pts));
}

inline estimator constant_estimator(const probability_measure& point) {
    return estimator(point.space,
                     std::vector<probability_measure>(point.space->size(), point));
}

// A vector-valued feature map on P(X).
//   coordinate:       selects atom weights
//   parameter:        reads back plot parameters at registered points
//   kernel_embedding: xi -> K xi for a symmetric PSD kernel matrix
//   table:            explicit values at registered points
struct phi_map {
    enum class kind_t { coordinate, parameter, kernel_embedding, table };

    kind_t kind;
    std::size_t dim = 0;
    std::vector<std::size_t> coord_indices;
    matrix kernel; // kernel_embedding
    std::vector<std::pair<std::vector<double>, std::vector<double>>> entries; // (weights, value)

    static phi_map coordinate(const space_ptr& space, std::vector<std::size_t> indices) {
        phi_map m;
        m.kind = kind_t::coordinate;
        m.dim = indices.size();
        for (auto i : indices)
            if (i >= space->size()) throw model_error("phi_map: coordinate index out of range");
        m.coord_indices = std::move(indices);
        return m;
    }

    static phi_map kernel_embedding(const matrix& k) {
        if (!is_symmetric(k, 1e-12))
            throw model_error("phi_map: embedding kernel is not symmetric");
        if (min_eigenvalue(k) < -1e-9)
            throw model_error("phi_map: embedding kernel is not positive semi-definite");
        phi_map m;
        m.kind = kind_t::kernel_embedding;
        m.dim = k.rows;
        m.kernel = k;
        return m;
    }

    static phi_map table(std::size_t dim,
                         std::vector<std::pair<std::vector<double>, std::vector<double>>> pts) {
        phi_map m;
        m.kind = kind_t::table;
        m.dim = dim;
        for (const auto& [w, v] : pts)
            if (v.size() != dim) throw model_error("phi_map: table value has wrong dimension");
        m.entries = std::move(pts);
        return m;
    }

    // Reads the plot parameter back from the measure, for the listed
    // parameter points (estimator images and model points must be
    // registered explicitly).
    static phi_map parameter(const plot& p, const std::vector<theta_vec>& thetas) {
        std::vector<std::pair<std::vector<double>, std::vector<double>>> pts;
        pts.reserve(thetas.size());
        for (const auto& t : thetas) pts.emplace_back(plot_point(p, t).weights, t);
        phi_map m = table(p.domain_dim(), std::move(pts));
        m.kind = kind_t::parameter;
        return m;
    }
};

inline std::vector<double> phi_apply(const phi_map& phi, const probability_measure& xi) {
    switch (phi.kind) {
    case phi_map::kind_t::coordinate: {
        std::vector<double> out(phi.dim);
        for (std::size_t l = 0; l < phi.dim; ++l) out[l] = xi.weights[phi.coord_indices[l]];
        return out;
    }
    case phi_map::kind_t::kernel_embedding:
        if (phi.kernel.cols != xi.size())
            throw space_mismatch_error("phi_apply: kernel size does not match the space");
        return mat_vec(phi.kernel, xi.weights);
    case phi_map::kind_t::parameter:
    case phi_map::kind_t::table:
        for (const auto& [w, v] : phi.entries)
            if (measures_equal(w, xi.weights, 1e-12)) return v;
        throw table_miss_error("phi_apply: measure is not a registered table point");
    }
    throw error("phi_apply: unreachable");
}

// Componentwise phi composed with the estimator, as point functions on X.
inline std::vector<point_function> phi_of_estimator(const estimator& sigma, const phi_map& phi) {
    std::vector<std::vector<double>> values(phi.dim,
                                            std::vector<double>(sigma.space->size(), 0.0));
    for (std::size_t x = 0; x < sigma.space->size(); ++x) {
        auto v = phi_apply(phi, sigma.assignment[x]);
        for (std::size_t l = 0; l < phi.dim; ++l) values[l][x] = v[l];
    }
    std::vector<point_function> out;
    out.reserve(phi.dim);
    for (auto& vals : values) out.emplace_back(sigma.space, std::move(vals));
    return out;
}

// phi-mean value: componentwise expectation of phi(sigma(x)) under xi.
inline std::vector<double> phi_mean(const estimator& sigma, const phi_map& phi,
                                    const probability_measure& xi) {
    require_same_space(sigma.space, xi.space, "phi_mean");
    std::vector<double> out(phi.dim, 0.0);
    auto fs = phi_of_estimator(sigma, phi);
    for (std::size_t l = 0; l < phi.dim; ++l) out[l] = expectation(fs[l], xi);
    return out;
}

inline std::vector<double> bias(const estimator& sigma, const phi_map& phi,
                                const probability_measure& xi) {
    auto mean = phi_mean(sigma, phi, xi);
    auto at = phi_apply(phi, xi);
    for (std::size_t l = 0; l < phi.dim; ++l) mean[l] -= at[l];
    return mean;
}

// Symmetric d x d matrix with an attached PSD verdict.
struct quadratic_form {
    matrix m;
    double min_eig = 0.0;
    bool psd = true;

    explicit quadratic_form(matrix mm) : m(std::move(mm)) {
        if (!is_symmetric(m, 1e-12)) throw model_error("quadratic_form: matrix not symmetric");
        for (std::size_t i = 0; i < m.rows; ++i)
            for (std::size_t j = i + 1; j < m.cols; ++j)
                m(i, j) = m(j, i) = 0.5 * (m(i, j) + m(j, i));
        min_eig = m.rows ? min_eigenvalue(m) : 0.0;
        psd = min_eig >= -1e-9;
    }

    std::size_t dim() const { return m.rows; }
};

namespace detail {
// E_xi[(f_l - c_l)(f_h - c_h)] for all component pairs.
inline quadratic_form centered_second_moment(const std::vector<point_function>& fs,
                                             const std::vector<double>& center,
                                             const probability_measure& xi) {
    const std::size_t d = fs.size();
    matrix m(d, d);
    for (std::size_t l = 0; l < d; ++l)
        for (std::size_t h = l; h < d; ++h) {
            double s = 0.0;
            for (std::size_t x = 0; x < xi.size(); ++x)
                s += (fs[l].values[x] - center[l]) * (fs[h].values[x] - center[h]) * xi.weights[x];
            m(l, h) = m(h, l) = s;
        }
    return quadratic_form(std::move(m));
}
} // namespace detail

// Mean-square-error quadratic form, centered at phi(xi).
inline quadratic_form mse_form(const estimator& sigma, const phi_map& phi,
                               const probability_measure& xi) {
    require_same_space(sigma.space, xi.space, "mse_form");
    return detail::centered_second_moment(phi_of_estimator(sigma, phi), phi_apply(phi, xi), xi);
}

// Variance quadratic form, centered at the phi-mean.
inline quadratic_form variance_form(const estimator& sigma, const phi_map& phi,
                                    const probability_measure& xi) {
    require_same_space(sigma.space, xi.space, "variance_form");
    return detail::centered_second_moment(phi_of_estimator(sigma, phi),
                                          phi_mean(sigma, phi, xi), xi);
}

struct fisher_gradient_result {
    probability_measure base;
    std::vector<double> coefficients; // in the supplied tangent basis
    tangent_vector as_tangent;
};

namespace detail {
inline matrix basis_gram(const std::vector<tangent_vector>& basis) {
    matrix g(basis.size(), basis.size());
    for (std::size_t a = 0; a < basis.size(); ++a)
        for (std::size_t b = a; b < basis.size(); ++b)
            g(a, b) = g(b, a) = fisher_metric(basis[a], basis[b]);
    return g;
}

inline tangent_vector combine_basis(const std::vector<tangent_vector>& basis,
                                    const std::vector<double>& coeff,
                                    const probability_measure& base) {
    std::vector<double> dir(base.size(), 0.0);
    for (std::size_t a = 0; a < basis.size(); ++a)
        for (std::size_t i = 0; i < dir.size(); ++i)
            dir[i] += coeff[a] * basis[a].direction.weights[i];
    return tangent_vector(base, signed_measure(base.space, std::move(dir)));
}
} // namespace detail

// Metric gradient of the phi-mean component l at xi: the orthogonal
// projection of the centered feature onto the tangent span, realized
// as a Gram solve.  Defining property: <grad, X_a>_g equals the
// L2(xi) pairing of the centered feature with log X_a for every basis
// vector.
inline fisher_gradient_result fisher_gradient(const estimator& sigma, const phi_map& phi,
                                              std::size_t l, const probability_measure& xi,
                                              const std::vector<tangent_vector>& basis) {
    require_same_space(sigma.space, xi.space, "fisher_gradient");
    if (l >= phi.dim) throw model_error("fisher_gradient: component index out of range");
    if (basis.empty()) throw degenerate_basis_error("fisher_gradient: empty tangent basis");
    for (const auto& b : basis)
        if (!measures_equal(b.base.weights, xi.weights, 1e-12))
            throw base_mismatch_error("fisher_gradient: basis vector not based at xi");

    matrix gram = detail::basis_gram(basis);
    if (min_eigenvalue(gram) <= 1e-10)
        throw degenerate_basis_error("fisher_gradient: tangent basis is degenerate in L2(xi)");

    auto fs = phi_of_estimator(sigma, phi);
    const double mean = expectation(fs[l], xi);
    std::vector<double> rhs(basis.size(), 0.0);
    for (std::size_t a = 0; a < basis.size(); ++a) {
        double s = 0.0;
        for (std::size_t x = 0; x < xi.size(); ++x)
            s += (fs[l].values[x] - mean) * basis[a].log_rep.values[x] * xi.weights[x];
        rhs[a] = s;
    }
    auto coeff = solve_spd(gram, rhs);
    auto grad = detail::combine_basis(basis, coeff, xi);
    return fisher_gradient_result{xi, std::move(coeff), std::move(grad)};
}

// Pairwise Fisher inner products of the component gradients: the
// inverse-Fisher quadratic form on the dual of the value space.
inline quadratic_form inverse_fisher_form(const estimator& sigma, const phi_map& phi,
                                          const probability_measure& xi,
                                          const std::vector<tangent_vector>& basis) {
    std::vector<fisher_gradient_result> grads;
    grads.reserve(phi.dim);
    for (std::size_t l = 0; l < phi.dim; ++l)
        grads.push_back(fisher_gradient(sigma, phi, l, xi, basis));
    matrix m(phi.dim, phi.dim);
    for (std::size_t l = 0; l < phi.dim; ++l)
        for (std::size_t h = l; h < phi.dim; ++h)
            m(l, h) = m(h, l) = fisher_metric(grads[l].as_tangent, grads[h].as_tangent);
    return quadratic_form(std::move(m));
}

// Variance form minus the inverse-Fisher form; positive semi-definite
// for regular estimators, the bound being attained exactly when the
// centered features already lie in the tangent span.
inline quadratic_form cramer_rao_gap(const estimator& sigma, const phi_map& phi,
                                     const probability_measure& xi,
                                     const std::vector<tangent_vector>& basis) {
    quadratic_form var = variance_form(sigma, phi, xi);
    quadratic_form inv = inverse_fisher_form(sigma, phi, xi, basis);
    matrix gap = var.m;
    for (std::size_t i = 0; i < gap.data.size(); ++i) gap.data[i] -= inv.m.data[i];
    quadratic_form out(std::move(gap));
    assert(out.min_eig >= -1e-9);
    return out;
}

struct regularity_report {
    std::vector<double> sup_l2_norm; // per component
    std::string verdict;
};

// sup over the model grid of the L2(xi) norms of phi composed with the
// estimator.  On finite spaces every component is bounded, so the
// verdict is always "regular"; the suprema are informational.
inline regularity_report check_phi_regular(const estimator& sigma, const phi_map& phi,
                                           const statistical_model& model,
                                           const grid_spec& spec = {}) {
    require_same_space(sigma.space, model.space, "check_phi_regular");
    auto fs = phi_of_estimator(sigma, phi);
    regularity_report rep;
    rep.sup_l2_norm.assign(phi.dim, 0.0);
    for (const auto& p : model.plots) {
        auto grid = detail::make_level_grid(p, spec.points_per_axis.back(), spec.margin);
        for (const auto& t : grid.nodes) {
            auto xi = plot_point(p, t);
            for (std::size_t l = 0; l < phi.dim; ++l) {
                double s = 0.0;
                for (std::size_t x = 0; x < xi.size(); ++x)
                    s += fs[l].values[x] * fs[l].values[x] * xi.weights[x];
                rep.sup_l2_norm[l] = std::max(rep.sup_l2_norm[l], std::sqrt(s));
            }
        }
    }
    rep.verdict = "regular";
    return rep;
}

} // namespace igeo
