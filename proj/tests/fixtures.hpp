#pragma once

// Shared model fixtures for the test suites.

#include <igeo/igeo.hpp>

namespace fixtures {

using namespace igeo;

// Mixture family over three atoms with the densities used throughout
// the suites: g1 = 3*1_{x1}, g2 = 3*1_{x2}, g3 = 3*1_{x3} against the
// uniform base.  Valid on the open triangle eta1 + eta2 < 1.
inline plot triangle_mixture_plot() {
    auto sp = make_space({"x1", "x2", "x3"});
    affine_mixture_spec spec{
        probability_measure(sp, {1.0 / 3, 1.0 / 3, 1.0 / 3}),
        {{3, 0, 0}, {0, 3, 0}, {0, 0, 3}},
        open_box{{{0.0, 0.64}, {0.0, 0.35}}},
        {},
        {}};
    return affine_mixture_plot(spec, "triangle mixture");
}

// Densities that stay nonnegative over the whole unit square, so the
// chessboard parameter domain is usable everywhere.
inline affine_mixture_spec chessboard_mixture_spec(open_box box, std::vector<double> origin,
                                                   std::vector<std::vector<double>> dirs) {
    auto sp = make_space({"x1", "x2", "x3"});
    return affine_mixture_spec{
        probability_measure(sp, {1.0 / 3, 1.0 / 3, 1.0 / 3}),
        {{1.5, 0.75, 0.75}, {0.75, 1.5, 0.75}, {0.75, 0.75, 1.5}},
        std::move(box),
        std::move(origin),
        std::move(dirs)};
}

// The chessboard model: the unit square split 2x2 and colored like a
// chessboard; the model is generated by the two open black squares,
// plus the two grid lines through the middle (edges of black squares
// everywhere, hence inside the closure of the black region).
inline statistical_model chessboard_model() {
    std::vector<plot> plots;
    plots.push_back(affine_mixture_plot(
        chessboard_mixture_spec(open_box{{{0.0, 0.5}, {0.0, 0.5}}}, {}, {}), "black square A"));
    plots.push_back(affine_mixture_plot(
        chessboard_mixture_spec(open_box{{{0.5, 1.0}, {0.5, 1.0}}}, {}, {}), "black square B"));
    plots.push_back(affine_mixture_plot(
        chessboard_mixture_spec(open_box{{{0.0, 1.0}}}, {0.0, 0.5}, {{1.0, 0.0}}),
        "horizontal grid line"));
    plots.push_back(affine_mixture_plot(
        chessboard_mixture_spec(open_box{{{0.0, 1.0}}}, {0.5, 0.0}, {{0.0, 1.0}}),
        "vertical grid line"));
    auto space = plots.front().space;
    return statistical_model(space, std::move(plots), order_infinity);
}

// A probe curve through eta0 along dir in the chessboard parameter
// square: t -> mixture(eta0 + t * dir), |t| < half_width.
inline plot chessboard_curve(const std::vector<double>& eta0, const std::vector<double>& dir,
                             double half_width = 0.1) {
    return affine_mixture_plot(
        chessboard_mixture_spec(open_box{{{-half_width, half_width}}}, eta0, {dir}), "curve");
}

inline probability_measure chessboard_point(const std::vector<double>& eta) {
    auto p = affine_mixture_plot(chessboard_mixture_spec(
        open_box{{{-1.0, 1.0}, {-1.0, 1.0}}}, {}, {}));
    return plot_point(p, eta);
}

// Two i.i.d. Bernoulli(theta) draws over {00, 01, 10, 11}; quadratic
// in theta, so built directly rather than as a mixture.
inline plot bernoulli_pair_plot() {
    auto sp = make_space({"00", "01", "10", "11"});
    plot p;
    p.space = sp;
    p.domain = open_box{{{0.0, 1.0}}};
    p.raw_eval = [](const theta_vec& t) {
        const double th = t[0];
        return std::vector<double>{(1 - th) * (1 - th), (1 - th) * th, th * (1 - th), th * th};
    };
    p.jacobian = [](const theta_vec& t) {
        const double th = t[0];
        matrix j(4, 1);
        j(0, 0) = -2 * (1 - th);
        j(1, 0) = 1 - 2 * th;
        j(2, 0) = 1 - 2 * th;
        j(3, 0) = 2 * th;
        return j;
    };
    p.order = order_infinity;
    p.label = "bernoulli pair";
    return p;
}

// The sum statistic {00,01,10,11} -> {0,1,2}.
inline markov_kernel bernoulli_sum_kernel() {
    auto src = make_space({"00", "01", "10", "11"});
    auto tgt = make_space({"s0", "s1", "s2"});
    return deterministic_kernel(src, tgt, {0, 1, 1, 2});
}

// Merge statistic {x0, x1 -> a, x2 -> b} from the worked examples.
inline markov_kernel merge_kernel() {
    auto src = make_space(3);
    auto tgt = make_space({"a", "b"});
    return deterministic_kernel(src, tgt, {0, 0, 1});
}

inline markov_kernel random_stochastic_kernel(counter_rng& rng, const space_ptr& src,
                                              const space_ptr& tgt, double floor = 1e-3) {
    matrix r(src->size(), tgt->size());
    for (std::size_t i = 0; i < r.rows; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < r.cols; ++j) {
            r(i, j) = floor - std::log(1.0 - rng.next_double());
            sum += r(i, j);
        }
        for (std::size_t j = 0; j < r.cols; ++j) r(i, j) /= sum;
    }
    return markov_kernel(src, tgt, std::move(r));
}

inline markov_kernel random_permutation_kernel(counter_rng& rng, const space_ptr& space) {
    std::vector<int> perm(space->size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    for (std::size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[rng.next_index(i)]);
    return deterministic_kernel(space, space, perm);
}

} // namespace fixtures
