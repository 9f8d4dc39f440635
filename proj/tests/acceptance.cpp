// Acceptance suite: one line per criterion, nonzero exit on failure.

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <igeo/igeo.hpp>

#include "fixtures.hpp"

using namespace igeo;

namespace {

struct outcome {
    bool pass = true;
    std::string detail;
};

outcome fail(std::string why) { return {false, std::move(why)}; }
outcome pass(std::string note) { return {true, std::move(note)}; }

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", x);
    return buf;
}

std::vector<tangent_vector> simplex_basis_at(const probability_measure& xi) {
    auto p = full_simplex_plot(xi.space);
    theta_vec theta(xi.weights.begin(), xi.weights.end() - 1);
    std::vector<tangent_vector> basis;
    for (std::size_t a = 0; a + 1 < xi.size(); ++a) {
        std::vector<double> e(xi.size() - 1, 0.0);
        e[a] = 1.0;
        basis.push_back(plot_velocity(p, theta, e));
    }
    return basis;
}

estimator random_table_estimator(counter_rng& rng, const space_ptr& sp) {
    std::vector<probability_measure> pts;
    for (std::size_t i = 0; i < sp->size(); ++i) pts.push_back(random_interior_measure(rng, sp));
    return estimator(sp, std::move(pts));
}

// 1. fisher_gram against the closed form sum_i dp(e_a)_i dp(e_b)_i / xi_i
outcome multinomial_closed_form() {
    counter_rng rng(1001, 0);
    double worst = 0.0;
    int points = 0;
    for (std::size_t n = 3; n <= 6; ++n) {
        auto sp = make_space(n);
        auto p = full_simplex_plot(sp);
        for (int it = 0; it < 25; ++it, ++points) {
            auto xi = random_interior_measure(rng, sp);
            theta_vec theta(xi.weights.begin(), xi.weights.end() - 1);
            matrix g = fisher_gram(p, theta);
            for (std::size_t a = 0; a + 1 < n; ++a)
                for (std::size_t b = 0; b + 1 < n; ++b) {
                    double closed = 1.0 / xi.weights[n - 1] +
                                    (a == b ? 1.0 / xi.weights[a] : 0.0);
                    worst = std::max(worst, std::abs(g(a, b) - closed));
                }
        }
    }
    if (worst > 1e-10) return fail("max deviation " + fmt(worst) + " > 1e-10");
    return pass("max deviation " + fmt(worst) + " over " + std::to_string(points) + " points");
}

// 2. chessboard cone structure: span 2 / 1 / 2-with-two-lines
outcome chessboard_cones() {
    auto model = fixtures::chessboard_model();

    auto interior = tangent_cone_probe(model, fixtures::chessboard_point({0.25, 0.25}),
                                       {fixtures::chessboard_curve({0.25, 0.25}, {1, 0}),
                                        fixtures::chessboard_curve({0.25, 0.25}, {0, 1}),
                                        fixtures::chessboard_curve({0.25, 0.25}, {-1, -1}),
                                        fixtures::chessboard_curve({0.25, 0.25}, {1, -1})});
    if (interior.span_dim != 2 || !interior.is_linear)
        return fail("interior: span " + std::to_string(interior.span_dim) + ", linear " +
                    std::to_string(interior.is_linear));

    auto edge = tangent_cone_probe(model, fixtures::chessboard_point({0.25, 0.5}),
                                   {fixtures::chessboard_curve({0.25, 0.5}, {1, 0}),
                                    fixtures::chessboard_curve({0.25, 0.5}, {-1, 0})});
    if (edge.span_dim != 1)
        return fail("edge: span " + std::to_string(edge.span_dim) + " != 1");

    auto corner = tangent_cone_probe(model, fixtures::chessboard_point({0.5, 0.5}),
                                     {fixtures::chessboard_curve({0.5, 0.5}, {1, 0}),
                                      fixtures::chessboard_curve({0.5, 0.5}, {0, 1})});
    if (corner.span_dim != 2 || corner.directions.size() != 2 || corner.is_linear)
        return fail("corner: span " + std::to_string(corner.span_dim) + ", lines " +
                    std::to_string(corner.directions.size()) + ", linear " +
                    std::to_string(corner.is_linear));
    return pass("interior 2 (linear), edge 1, corner 2 lines (not linear)");
}

// 3. monotonicity over random triples plus the worked merge example
outcome monotonicity() {
    auto sp3 = make_space(3);
    probability_measure uniform(sp3, {1.0 / 3, 1.0 / 3, 1.0 / 3});
    tangent_vector v(uniform, signed_measure(sp3, {1, 0, -1}));
    double before = fisher_norm2(v);
    double gap = monotonicity_gap(fixtures::merge_kernel(), v);
    if (std::abs(before - 6.0) > 1e-10) return fail("merge example norm " + fmt(before));
    if (std::abs(gap - 1.5) > 1e-10) return fail("merge example gap " + fmt(gap));

    double min_gap = 0.0;
    for (int k = 0; k < 250; ++k) {
        counter_rng rng(2002, static_cast<std::uint64_t>(k));
        std::size_t n = 3 + rng.next_index(3);
        std::size_t m = 2 + rng.next_index(3);
        auto src = make_space(n);
        auto tgt = make_space(m, "y");
        auto t = fixtures::random_stochastic_kernel(rng, src, tgt);
        tangent_vector a(random_interior_measure(rng, src), random_zero_sum_direction(rng, src));
        min_gap = std::min(min_gap, monotonicity_gap(t, a));
    }
    if (min_gap < -1e-9) return fail("min gap " + fmt(min_gap) + " < -1e-9");
    return pass("merge 6.0 -> 4.5, min random gap " + fmt(min_gap) + " over 250 triples");
}

// 4. sufficiency implies metric equality
outcome sufficiency_equality() {
    auto sum = fixtures::bernoulli_sum_kernel();
    auto pair_plot = fixtures::bernoulli_pair_plot();
    std::vector<probability_measure> family;
    for (double th : {0.2, 0.3, 0.5, 0.7, 0.9}) family.push_back(plot_point(pair_plot, {th}));
    auto rep = check_sufficiency(sum, family, 1e-10);
    if (!rep.is_sufficient || rep.max_discrepancy > 1e-12)
        return fail("bernoulli sum statistic: discrepancy " + fmt(rep.max_discrepancy));

    double worst = 0.0;
    for (double th : {0.1, 0.2, 0.3, 0.5, 0.7, 0.9}) {
        auto tv = plot_velocity(pair_plot, {th}, {1.0});
        worst = std::max(worst, std::abs(monotonicity_gap(sum, tv)));
    }

    auto sp = make_space(4);
    for (int k = 0; k < 30; ++k) {
        counter_rng rng(3003, static_cast<std::uint64_t>(k));
        auto perm = fixtures::random_permutation_kernel(rng, sp);
        std::vector<probability_measure> sample;
        for (int s = 0; s < 3; ++s) sample.push_back(random_interior_measure(rng, sp));
        auto prep = check_sufficiency(perm, sample, 1e-10);
        if (!prep.is_sufficient || prep.max_discrepancy > 1e-12)
            return fail("permutation kernel not reported sufficient");
        auto xi = random_interior_measure(rng, sp);
        tangent_vector tv(xi, random_zero_sum_direction(rng, sp));
        worst = std::max(worst, std::abs(monotonicity_gap(perm, tv)));
    }
    if (worst > 1e-8) return fail("max |gap| " + fmt(worst) + " > 1e-8");
    return pass("max |gap| " + fmt(worst) + ", discrepancies <= 1e-12");
}

// 5. composition functoriality and pullback/pushforward adjointness
outcome functoriality_adjointness() {
    double worst_f = 0.0, worst_a = 0.0;
    for (int k = 0; k < 100; ++k) {
        counter_rng rng(4004, static_cast<std::uint64_t>(k));
        std::size_t n = 3 + rng.next_index(3);
        std::size_t m = 2 + rng.next_index(3);
        std::size_t l = 2 + rng.next_index(3);
        auto sx = make_space(n);
        auto sy = make_space(m, "y");
        auto sz = make_space(l, "z");
        auto t1 = fixtures::random_stochastic_kernel(rng, sx, sy);
        auto t2 = fixtures::random_stochastic_kernel(rng, sy, sz);
        auto mu = random_zero_sum_direction(rng, sx);
        auto direct = pushforward_measure(compose_kernels(t2, t1), mu);
        auto staged = pushforward_measure(t2, pushforward_measure(t1, mu));
        for (std::size_t j = 0; j < l; ++j)
            worst_f = std::max(worst_f, std::abs(direct.weights[j] - staged.weights[j]));

        auto xi = random_interior_measure(rng, sx);
        std::vector<double> vals(m);
        for (auto& x : vals) x = rng.uniform(-2, 2);
        point_function f(sy, vals);
        double lhs = expectation(pullback_function(t1, f), xi);
        double rhs = expectation(f, pushforward_measure(t1, xi));
        worst_a = std::max(worst_a, std::abs(lhs - rhs));
    }
    if (worst_f > 1e-12) return fail("functoriality deviation " + fmt(worst_f));
    if (worst_a > 1e-12) return fail("adjointness deviation " + fmt(worst_a));
    return pass("functoriality " + fmt(worst_f) + ", adjointness " + fmt(worst_a));
}

// 6. mse = variance + bias (x) bias
outcome mse_decomposition() {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        counter_rng rng(5005, static_cast<std::uint64_t>(k));
        std::size_t n = 3 + rng.next_index(3);
        auto sp = make_space(n);
        auto xi = random_interior_measure(rng, sp);
        auto sigma = random_table_estimator(rng, sp);
        phi_map phi = [&]() {
            switch (k % 3) {
            case 0: return phi_map::coordinate(sp, {0, n - 1});
            case 1: {
                matrix a(n, n);
                for (auto& x : a.data) x = rng.uniform(-1, 1);
                matrix kmat = a.transposed() * a;
                for (auto& x : kmat.data) x /= static_cast<double>(n);
                return phi_map::kernel_embedding(kmat);
            }
            default: {
                std::vector<std::pair<std::vector<double>, std::vector<double>>> pts;
                for (const auto& img : sigma.assignment)
                    pts.emplace_back(img.weights,
                                     std::vector<double>{rng.uniform(-1, 1), rng.uniform(-1, 1)});
                pts.emplace_back(xi.weights, std::vector<double>{rng.uniform(-1, 1),
                                                                 rng.uniform(-1, 1)});
                return phi_map::table(2, std::move(pts));
            }
            }
        }();
        auto mse = mse_form(sigma, phi, xi);
        auto var = variance_form(sigma, phi, xi);
        auto b = bias(sigma, phi, xi);
        for (std::size_t l = 0; l < phi.dim; ++l)
            for (std::size_t h = 0; h < phi.dim; ++h)
                worst = std::max(worst, std::abs(mse.m(l, h) - var.m(l, h) - b[l] * b[h]));
    }
    if (worst > 1e-12) return fail("max decomposition deviation " + fmt(worst));
    return pass("max deviation " + fmt(worst) + " over 100 instances");
}

// 7. Cramer-Rao gap PSD; plug-in attains the bound on the full simplex
outcome cramer_rao() {
    double min_eig = 0.0;
    for (int k = 0; k < 100; ++k) {
        counter_rng rng(6006, static_cast<std::uint64_t>(k));
        std::size_t n = 3 + rng.next_index(2);
        auto sp = make_space(n);
        auto xi = random_interior_measure(rng, sp);
        auto basis = simplex_basis_at(xi);
        auto sigma = random_table_estimator(rng, sp);
        auto gap = cramer_rao_gap(sigma, phi_map::coordinate(sp, {0, 1}), xi, basis);
        min_eig = std::min(min_eig, gap.min_eig);
    }
    if (min_eig < -1e-9) return fail("min gap eigenvalue " + fmt(min_eig));

    counter_rng rng(6007, 0);
    double attain = 0.0;
    for (int k = 0; k < 20; ++k) {
        auto sp = make_space(3);
        auto xi = random_interior_measure(rng, sp);
        auto gap = cramer_rao_gap(plug_in_estimator(sp), phi_map::coordinate(sp, {0, 1}), xi,
                                  simplex_basis_at(xi));
        attain = std::max(attain, max_abs(gap.m));
    }
    if (attain > 1e-10) return fail("plug-in gap " + fmt(attain) + " > 1e-10");
    return pass("min eigenvalue " + fmt(min_eig) + ", plug-in gap " + fmt(attain));
}

// 8. finite-difference directional derivatives match the gradient pairing
outcome gradient_consistency() {
    double worst = 0.0;
    auto mixture = fixtures::triangle_mixture_plot();
    for (int k = 0; k < 50; ++k) {
        counter_rng rng(7007, static_cast<std::uint64_t>(k));
        const bool use_mixture = (k % 2 == 0);
        const plot p = use_mixture ? mixture : full_simplex_plot(make_space(3));
        theta_vec theta = use_mixture
                              ? theta_vec{rng.uniform(0.1, 0.55), rng.uniform(0.05, 0.3)}
                              : theta_vec{rng.uniform(0.1, 0.5), rng.uniform(0.1, 0.4)};
        std::vector<double> v{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        auto xi = plot_point(p, theta);
        auto sigma = random_table_estimator(rng, p.space);
        auto phi = phi_map::coordinate(p.space, {0, 1});
        std::vector<tangent_vector> basis{plot_velocity(p, theta, {1, 0}),
                                          plot_velocity(p, theta, {0, 1})};
        for (std::size_t l = 0; l < 2; ++l) {
            auto grad = fisher_gradient(sigma, phi, l, xi, basis);
            auto dir = plot_velocity(p, theta, v);
            const double h = 1e-6;
            theta_vec tp = theta, tm = theta;
            for (int a = 0; a < 2; ++a) {
                tp[a] += h * v[a];
                tm[a] -= h * v[a];
            }
            double fd = (phi_mean(sigma, phi, plot_point(p, tp))[l] -
                         phi_mean(sigma, phi, plot_point(p, tm))[l]) /
                        (2 * h);
            worst = std::max(worst, std::abs(fisher_metric(grad.as_tangent, dir) - fd));
        }
    }
    if (worst > 1e-5) return fail("max deviation " + fmt(worst) + " > 1e-5");
    return pass("max deviation " + fmt(worst) + " over 50 instances");
}

// 9. pushforwards keep plot invariants and almost-2 integrability
outcome pushforward_integrity() {
    auto mixture = fixtures::triangle_mixture_plot();
    statistical_model model(mixture.space, {mixture, full_simplex_plot(mixture.space)});
    grid_spec spec{{5, 9}, 0.05};
    int checked = 0;
    for (int k = 0; k < 20; ++k) {
        counter_rng rng(8008, static_cast<std::uint64_t>(k));
        std::size_t m = 2 + rng.next_index(3);
        auto tgt = make_space(m, "y");
        auto t = fixtures::random_stochastic_kernel(rng, model.space, tgt);
        auto pushed = pushforward_model(t, model);
        auto rep = integrability_report(pushed, spec);
        for (const auto& pr : rep.plots) {
            if (!pr.almost2_all) return fail("kernel " + std::to_string(k) + ": almost-2 failed");
            for (const auto& pt : pr.points)
                if (!pt.almost2_ok)
                    return fail("kernel " + std::to_string(k) + ": grid point flagged");
        }
        for (std::size_t pi = 0; pi < pushed.plots.size(); ++pi) {
            auto nodes = igeo::detail::make_level_grid(pushed.plots[pi], 9, 0.05);
            auto check = validate_plot(pushed.plots[pi], nodes.nodes);
            if (!check.ok)
                return fail("kernel " + std::to_string(k) + ": " + check.message);
            checked += static_cast<int>(nodes.nodes.size());
        }
    }
    return pass("20 kernels, " + std::to_string(checked) + " grid points validated");
}

} // namespace

int main() {
    struct criterion {
        int id;
        const char* title;
        std::function<outcome()> run;
    };
    const std::vector<criterion> criteria{
        {1, "multinomial closed form (1e-10)", multinomial_closed_form},
        {2, "chessboard cone structure", chessboard_cones},
        {3, "Fisher metric monotonicity (gap >= -1e-9)", monotonicity},
        {4, "sufficiency implies isometry (1e-8 / 1e-12)", sufficiency_equality},
        {5, "functoriality and adjointness (1e-12)", functoriality_adjointness},
        {6, "MSE = variance + bias outer product (1e-12)", mse_decomposition},
        {7, "Cramer-Rao gap PSD, plug-in attains (1e-9 / 1e-10)", cramer_rao},
        {8, "gradient vs finite differences (1e-5)", gradient_consistency},
        {9, "pushforward model integrity", pushforward_integrity},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = fail(std::string("exception: ") + e.what());
        }
        std::printf("[%s] criterion %d: %s (%s)\n", out.pass ? "PASS" : "FAIL", c.id, c.title,
                    out.detail.c_str());
        if (!out.pass) ++failures;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
