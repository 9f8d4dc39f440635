#pragma once

#include <cmath>

#include "igeo/measure.hpp"

namespace igeo {

// A velocity of a curve in P(X): the base point xi, the direction v
// (a signed measure with v(X) = 0 dominated by xi), and the
// logarithmic representation dv/dxi.
struct tangent_vector {
    probability_measure base;
    signed_measure direction;
    point_function log_rep;

    tangent_vector(probability_measure b, signed_measure dir)
        : base(std::move(b)),
          direction(std::move(dir)),
          log_rep(radon_nikodym(direction, base)) {
        require_same_space(base.space, direction.space, "tangent_vector");
        double mass = 0.0;
        for (double w : direction.weights) mass += w;
        if (std::abs(mass) > 1e-10)
            throw model_error("tangent_vector: direction has nonzero total mass");
    }
};

inline bool same_base(const tangent_vector& a, const tangent_vector& b, double tol = 1e-12) {
    return same_space(a.base.space, b.base.space) &&
           measures_equal(a.base.weights, b.base.weights, tol);
}

// The Fisher metric: the L2(X, xi) pairing of logarithmic representations.
inline double fisher_metric(const tangent_vector& a, const tangent_vector& b) {
    if (!same_base(a, b))
        throw base_mismatch_error("fisher_metric: tangent vectors have different base points");
    return l2_inner(a.log_rep, b.log_rep, a.base);
}

inline double fisher_norm2(const tangent_vector& a) { return fisher_metric(a, a); }

// alpha*a + beta*b at the shared base point.
inline tangent_vector combine(double alpha, const tangent_vector& a, double beta,
                              const tangent_vector& b) {
    if (!same_base(a, b))
        throw base_mismatch_error("combine: tangent vectors have different base points");
    return tangent_vector(a.base, alpha * a.direction + beta * b.direction);
}

} // namespace igeo
