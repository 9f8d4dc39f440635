#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "igeo/errors.hpp"
#include "igeo/space.hpp"

namespace igeo {

// Absolute weight below which an atom counts as structurally zero
// (outside the support).  Distinguishes structural zeros from round-off.
inline constexpr double support_tol = 1e-12;

namespace detail {
inline void require_finite(const std::vector<double>& w, const char* what) {
    for (double x : w)
        if (!std::isfinite(x)) throw model_error(std::string(what) + ": non-finite weight");
}
} // namespace detail

// An element of S(X): one real weight per atom.
struct signed_measure {
    space_ptr space;
    std::vector<double> weights;

    signed_measure(space_ptr sp, std::vector<double> w) : space(std::move(sp)), weights(std::move(w)) {
        if (weights.size() != space->size())
            throw model_error("signed_measure: weight count does not match atom count");
        detail::require_finite(weights, "signed_measure");
    }

    std::size_t size() const { return weights.size(); }
};

// An element of P(X): nonnegative weights summing to 1 within 1e-12.
struct probability_measure {
    space_ptr space;
    std::vector<double> weights;

    probability_measure(space_ptr sp, std::vector<double> w)
        : space(std::move(sp)), weights(std::move(w)) {
        if (weights.size() != space->size())
            throw model_error("probability_measure: weight count does not match atom count");
        detail::require_finite(weights, "probability_measure");
        double sum = 0.0;
        for (double x : weights) {
            if (x < 0.0) throw model_error("probability_measure: negative weight");
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw model_error("probability_measure: weights sum to " + std::to_string(sum));
    }

    std::size_t size() const { return weights.size(); }

    signed_measure as_signed() const { return signed_measure(space, weights); }
};

// A real-valued function on the atoms; an element of L(X).
struct point_function {
    space_ptr space;
    std::vector<double> values;

    point_function(space_ptr sp, std::vector<double> v) : space(std::move(sp)), values(std::move(v)) {
        if (values.size() != space->size())
            throw model_error("point_function: value count does not match atom count");
        detail::require_finite(values, "point_function");
    }

    std::size_t size() const { return values.size(); }
};

// Total variation norm; on a finite space the sum of absolute weights.
inline double tv_norm(const signed_measure& m) {
    double s = 0.0;
    for (double w : m.weights) s += std::abs(w);
    return s;
}

// Radon-Nikodym derivative dv/dxi as a point function.  Atoms outside
// supp(xi) must carry no v-mass; the density is set to 0 there so that
// L2(xi) pairings stay total.
inline point_function radon_nikodym(const signed_measure& v, const probability_measure& xi) {
    require_same_space(v.space, xi.space, "radon_nikodym");
    std::vector<double> f(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (xi.weights[i] > support_tol) {
            f[i] = v.weights[i] / xi.weights[i];
        } else if (std::abs(v.weights[i]) > support_tol) {
            throw domination_error("radon_nikodym: measure not dominated by base at atom '" +
                                   v.space->atoms[i] + "'");
        }
    }
    return point_function(v.space, std::move(f));
}

// The L2(X, xi) pairing <f, g> = sum_i f_i g_i xi_i.
inline double l2_inner(const point_function& f, const point_function& g,
                       const probability_measure& xi) {
    require_same_space(f.space, g.space, "l2_inner");
    require_same_space(f.space, xi.space, "l2_inner");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f.values[i] * g.values[i] * xi.weights[i];
    return s;
}

inline double expectation(const point_function& f, const probability_measure& xi) {
    require_same_space(f.space, xi.space, "expectation");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f.values[i] * xi.weights[i];
    return s;
}

// --- small pointwise helpers used throughout -------------------------------

inline signed_measure operator+(const signed_measure& a, const signed_measure& b) {
    require_same_space(a.space, b.space, "measure sum");
    std::vector<double> w(a.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = a.weights[i] + b.weights[i];
    return signed_measure(a.space, std::move(w));
}

inline signed_measure operator*(double c, const signed_measure& m) {
    std::vector<double> w(m.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = c * m.weights[i];
    return signed_measure(m.space, std::move(w));
}

inline signed_measure operator-(const signed_measure& a, const signed_measure& b) {
    return a + (-1.0) * b;
}

inline bool measures_equal(const std::vector<double>& a, const std::vector<double>& b,
                           double tol) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
}

} // namespace igeo
