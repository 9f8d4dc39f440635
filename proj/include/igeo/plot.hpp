#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "igeo/linalg.hpp"
#include "igeo/tangent.hpp"

namespace igeo {

using theta_vec = std::vector<double>;

// Open axis-aligned box in R^m.
struct open_box {
    std::vector<std::pair<double, double>> axes; // (lo, hi), lo < hi

    std::size_t dim() const { return axes.size(); }

    bool contains(const theta_vec& t, double margin = 0.0) const {
        if (t.size() != axes.size()) return false;
        for (std::size_t i = 0; i < axes.size(); ++i)
            if (!(t[i] > axes[i].first + margin && t[i] < axes[i].second - margin)) return false;
        return true;
    }
};

inline constexpr int order_infinity = std::numeric_limits<int>::max();

// Central finite-difference step per axis.
inline double fd_step(double theta_a) { return 1e-5 * std::max(1.0, std::abs(theta_a)); }

// One generator of a model's diffeology: a parametrized map from an
// open box into P(X).  raw_eval returns atom weights that may carry
// round-off; they are validated against the simplex invariants and
// cleaned up by plot_point.  The analytic Jacobian (n x m matrix of
// atom-weight derivatives) is optional; velocities fall back to
// central differences without it.
struct plot {
    space_ptr space;
    open_box domain;
    std::function<std::vector<double>(const theta_vec&)> raw_eval;
    std::function<matrix(const theta_vec&)> jacobian; // empty when absent
    int order = 1;
    std::string label;

    std::size_t domain_dim() const { return domain.dim(); }
    bool has_jacobian() const { return static_cast<bool>(jacobian); }
};

inline probability_measure plot_point(const plot& p, const theta_vec& theta) {
    if (!p.domain.contains(theta))
        throw domain_error("plot_point: theta outside the open domain box");
    std::vector<double> w = p.raw_eval(theta);
    if (w.size() != p.space->size())
        throw model_error("plot_point: eval returned wrong number of weights");
    double sum = 0.0;
    for (double x : w) {
        if (!std::isfinite(x) || x < -1e-9)
            throw model_error("plot_point: eval output leaves the simplex");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw model_error("plot_point: eval weights sum to " + std::to_string(sum));
    for (double& x : w)
        if (x < 0.0) x = 0.0;
    double total = 0.0;
    for (double x : w) total += x;
    for (double& x : w) x /= total;
    return probability_measure(p.space, std::move(w));
}

namespace detail {

// Direction measure of the plot at theta along parameter direction v,
// via the analytic Jacobian when present, else central differences.
inline std::vector<double> plot_direction(const plot& p, const theta_vec& theta,
                                          const std::vector<double>& v) {
    const std::size_t n = p.space->size();
    const std::size_t m = p.domain_dim();
    if (v.size() != m) throw domain_error("plot_velocity: direction has wrong dimension");
    std::vector<double> dir(n, 0.0);
    if (p.has_jacobian()) {
        matrix j = p.jacobian(theta);
        if (j.rows != n || j.cols != m) throw model_error("plot jacobian has wrong shape");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t a = 0; a < m; ++a) dir[i] += j(i, a) * v[a];
        return dir;
    }
    for (std::size_t a = 0; a < m; ++a) {
        if (v[a] == 0.0) continue;
        const double h = fd_step(theta[a]);
        theta_vec tp = theta, tm = theta;
        tp[a] += h;
        tm[a] -= h;
        if (!p.domain.contains(tp) || !p.domain.contains(tm))
            throw domain_error("plot_velocity: theta too close to the domain boundary for "
                               "finite differencing");
        auto wp = plot_point(p, tp).weights;
        auto wm = plot_point(p, tm).weights;
        for (std::size_t i = 0; i < n; ++i) dir[i] += v[a] * (wp[i] - wm[i]) / (2.0 * h);
    }
    return dir;
}

} // namespace detail

inline tangent_vector plot_velocity(const plot& p, const theta_vec& theta,
                                    const std::vector<double>& v) {
    probability_measure base = plot_point(p, theta);
    std::vector<double> dir = detail::plot_direction(p, theta, v);
    // clean up round-off in the total-mass constraint
    double mass = 0.0;
    for (double x : dir) mass += x;
    if (std::abs(mass) > 1e-10)
        throw model_error("plot_velocity: direction has nonzero total mass " +
                          std::to_string(mass));
    dir[0] -= mass;
    return tangent_vector(std::move(base), signed_measure(p.space, std::move(dir)));
}

// Gram matrix of the Fisher metric in the plot's coordinate basis.
inline matrix fisher_gram(const plot& p, const theta_vec& theta) {
    const std::size_t m = p.domain_dim();
    matrix g(m, m);
    if (m == 0) return g;
    std::vector<tangent_vector> basis;
    basis.reserve(m);
    for (std::size_t a = 0; a < m; ++a) {
        std::vector<double> e(m, 0.0);
        e[a] = 1.0;
        basis.push_back(plot_velocity(p, theta, e));
    }
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a; b < m; ++b) g(a, b) = g(b, a) = fisher_metric(basis[a], basis[b]);
    return g;
}

// --- stock plots ------------------------------------------------------------

// Constant map at xi (axiom-D1 generator); 0-dimensional domain.
inline plot constant_plot(const probability_measure& xi, const std::string& label = "constant") {
    plot p;
    p.space = xi.space;
    p.domain = open_box{};
    auto w = xi.weights;
    p.raw_eval = [w](const theta_vec&) { return w; };
    p.order = order_infinity;
    p.label = label;
    return p;
}

// Direct parametrization of the simplex interior:
// (t_1..t_{n-1}) -> (t_1, .., t_{n-1}, 1 - sum t).  The box
// over-approximates the feasible region; eval rejects parameters whose
// tail coordinate leaves the simplex.
inline plot full_simplex_plot(const space_ptr& space, const std::string& label = "simplex") {
    const std::size_t n = space->size();
    plot p;
    p.space = space;
    p.domain.axes.assign(n - 1, {0.0, 1.0});
    p.raw_eval = [n](const theta_vec& t) {
        std::vector<double> w(n);
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            w[i] = t[i];
            s += t[i];
        }
        w[n - 1] = 1.0 - s;
        return w;
    };
    p.jacobian = [n](const theta_vec&) {
        matrix j(n, n - 1);
        for (std::size_t a = 0; a + 1 < n; ++a) {
            j(a, a) = 1.0;
            j(n - 1, a) = -1.0;
        }
        return j;
    };
    p.order = order_infinity;
    p.label = label;
    return p;
}

// Mixture family with affine densities against mu0:
//   weight_i(theta) = mu0_i * (sum_a g[a]_i theta_a  +  g_last_i (1 - sum_a theta_a)).
// g holds k >= 1 density tables; theta has dimension k-1 composed with
// an optional affine embedding of a lower-dimensional parameter box
// (origin + sum_b s_b path_dirs[b]).
struct affine_mixture_spec {
    probability_measure mu0;
    std::vector<std::vector<double>> g; // k tables of size n
    open_box box;                       // box for the plot parameter s
    std::vector<double> origin;         // dim k-1; defaults to identity embedding
    std::vector<std::vector<double>> path_dirs; // box.dim() directions of size k-1
};

inline plot affine_mixture_plot(const affine_mixture_spec& spec, const std::string& label = "mixture") {
    const std::size_t n = spec.mu0.size();
    const std::size_t k = spec.g.size();
    if (k < 1) throw model_error("affine_mixture_plot: needs at least one density table");
    for (const auto& gi : spec.g)
        if (gi.size() != n) throw model_error("affine_mixture_plot: density table has wrong size");

    const std::size_t eta_dim = k - 1;
    std::vector<double> origin = spec.origin;
    std::vector<std::vector<double>> dirs = spec.path_dirs;
    if (origin.empty() && dirs.empty()) {
        // identity embedding: plot parameter is eta itself
        origin.assign(eta_dim, 0.0);
        for (std::size_t a = 0; a < eta_dim; ++a) {
            std::vector<double> e(eta_dim, 0.0);
            e[a] = 1.0;
            dirs.push_back(std::move(e));
        }
    }
    if (origin.size() != eta_dim || dirs.size() != spec.box.dim())
        throw model_error("affine_mixture_plot: embedding shape mismatch");
    for (const auto& d : dirs)
        if (d.size() != eta_dim) throw model_error("affine_mixture_plot: embedding shape mismatch");

    auto mu0 = spec.mu0.weights;
    auto g = spec.g;
    auto eta_of = [origin, dirs](const theta_vec& s) {
        std::vector<double> eta = origin;
        for (std::size_t b = 0; b < dirs.size(); ++b)
            for (std::size_t a = 0; a < eta.size(); ++a) eta[a] += s[b] * dirs[b][a];
        return eta;
    };

    plot p;
    p.space = spec.mu0.space;
    p.domain = spec.box;
    p.raw_eval = [n, mu0, g, eta_of](const theta_vec& s) {
        auto eta = eta_of(s);
        std::vector<double> w(n);
        double tail = 1.0;
        for (double e : eta) tail -= e;
        for (std::size_t i = 0; i < n; ++i) {
            double dens = g.back()[i] * tail;
            for (std::size_t a = 0; a + 1 < g.size(); ++a) dens += g[a][i] * eta[a];
            w[i] = mu0[i] * dens;
        }
        return w;
    };
    p.jacobian = [n, mu0, g, dirs](const theta_vec&) {
        matrix j(n, dirs.size());
        for (std::size_t b = 0; b < dirs.size(); ++b)
            for (std::size_t i = 0; i < n; ++i) {
                double d = 0.0;
                for (std::size_t a = 0; a + 1 < g.size(); ++a)
                    d += (g[a][i] - g.back()[i]) * dirs[b][a];
                j(i, b) = mu0[i] * d;
            }
        return j;
    };
    p.order = order_infinity;
    p.label = label;
    return p;
}

// Precompose a plot with the affine path s -> theta0 + s * dir
// (|s| < half_width), yielding a curve through plot(theta0).
inline plot restrict_to_line(const plot& p, const theta_vec& theta0,
                             const std::vector<double>& dir, double half_width,
                             const std::string& label = "curve") {
    if (theta0.size() != p.domain_dim() || dir.size() != p.domain_dim())
        throw domain_error("restrict_to_line: path dimensions do not match the plot");
    plot c;
    c.space = p.space;
    c.domain = open_box{{{-half_width, half_width}}};
    auto box = p.domain;
    auto raw = p.raw_eval;
    auto embed = [theta0, dir](double s) {
        theta_vec t = theta0;
        for (std::size_t a = 0; a < t.size(); ++a) t[a] += s * dir[a];
        return t;
    };
    c.raw_eval = [raw, box, embed](const theta_vec& s) {
        theta_vec t = embed(s[0]);
        if (!box.contains(t))
            throw domain_error("restrict_to_line: path leaves the base plot's domain");
        return raw(t);
    };
    if (p.has_jacobian()) {
        auto jac = p.jacobian;
        c.jacobian = [jac, embed, dir](const theta_vec& s) {
            matrix j = jac(embed(s[0]));
            matrix out(j.rows, 1);
            for (std::size_t i = 0; i < j.rows; ++i)
                for (std::size_t a = 0; a < j.cols; ++a) out(i, 0) += j(i, a) * dir[a];
            return out;
        };
    }
    c.order = p.order;
    c.label = label;
    return c;
}

// Check the plot invariants at the given parameter points: valid
// simplex output, Jacobian columns summing to zero, and agreement of
// the analytic Jacobian with central differences.
struct plot_check_result {
    bool ok = true;
    std::string message;
};

inline plot_check_result validate_plot(const plot& p, const std::vector<theta_vec>& sample_thetas,
                                       double col_sum_tol = 1e-9, double fd_rel_tol = 1e-6) {
    for (const auto& t : sample_thetas) {
        try {
            plot_point(p, t);
        } catch (const error& e) {
            return {false, std::string("eval failed: ") + e.what()};
        }
        if (!p.has_jacobian()) continue;
        matrix j = p.jacobian(t);
        for (std::size_t a = 0; a < j.cols; ++a) {
            double col_sum = 0.0, col_max = 0.0;
            for (std::size_t i = 0; i < j.rows; ++i) {
                col_sum += j(i, a);
                col_max = std::max(col_max, std::abs(j(i, a)));
            }
            if (std::abs(col_sum) > col_sum_tol)
                return {false, "jacobian column " + std::to_string(a) + " sums to " +
                                   std::to_string(col_sum)};
            const double h = fd_step(t[a]);
            theta_vec tp = t, tm = t;
            tp[a] += h;
            tm[a] -= h;
            if (!p.domain.contains(tp) || !p.domain.contains(tm)) continue;
            std::vector<double> wp, wm;
            try {
                wp = plot_point(p, tp).weights;
                wm = plot_point(p, tm).weights;
            } catch (const error&) {
                continue; // stencil leaves the feasible region; nothing to compare
            }
            for (std::size_t i = 0; i < j.rows; ++i) {
                double fd = (wp[i] - wm[i]) / (2.0 * h);
                if (std::abs(fd - j(i, a)) > fd_rel_tol * std::max(1.0, col_max))
                    return {false, "jacobian disagrees with finite differences at column " +
                                       std::to_string(a)};
            }
        }
    }
    return {};
}

} // namespace igeo
