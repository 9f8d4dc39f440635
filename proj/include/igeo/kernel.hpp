#pragma once

#include <cassert>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "igeo/model.hpp"

namespace igeo {

// A probabilistic mapping from X to Y as a row-stochastic matrix:
// row i is the probability measure assigned to source atom i.
struct markov_kernel {
    space_ptr source;
    space_ptr target;
    matrix rows; // n x m, rows sum to 1

    markov_kernel(space_ptr src, space_ptr tgt, matrix r)
        : source(std::move(src)), target(std::move(tgt)), rows(std::move(r)) {
        if (rows.rows != source->size() || rows.cols != target->size())
            throw model_error("markov_kernel: matrix shape does not match the spaces");
        for (std::size_t i = 0; i < rows.rows; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < rows.cols; ++j) {
                double x = rows(i, j);
                if (!std::isfinite(x) || x < 0.0)
                    throw model_error("markov_kernel: invalid entry in row " + std::to_string(i));
                sum += x;
            }
            if (std::abs(sum - 1.0) > 1e-12)
                throw model_error("markov_kernel: row " + std::to_string(i) + " sums to " +
                                  std::to_string(sum));
        }
    }

    // the transpose action on weight columns: (T_* mu)_j = sum_i mu_i T_ij
    matrix pushforward_matrix() const { return rows.transposed(); }
};

// Deterministic statistic kappa embedded as Dirac rows.
inline markov_kernel deterministic_kernel(const space_ptr& source, const space_ptr& target,
                                          const std::vector<int>& kappa) {
    if (kappa.size() != source->size())
        throw model_error("deterministic_kernel: map must cover every source atom");
    matrix r(source->size(), target->size());
    for (std::size_t i = 0; i < kappa.size(); ++i) {
        if (kappa[i] < 0 || static_cast<std::size_t>(kappa[i]) >= target->size())
            throw model_error("deterministic_kernel: target index out of range");
        r(i, kappa[i]) = 1.0;
    }
    return markov_kernel(source, target, std::move(r));
}

inline markov_kernel identity_kernel(const space_ptr& space) {
    return markov_kernel(space, space, matrix::identity(space->size()));
}

inline bool is_deterministic(const markov_kernel& t, std::vector<int>* kappa = nullptr) {
    std::vector<int> map(t.rows.rows, -1);
    for (std::size_t i = 0; i < t.rows.rows; ++i) {
        for (std::size_t j = 0; j < t.rows.cols; ++j) {
            double x = t.rows(i, j);
            if (x > 1.0 - 1e-12)
                map[i] = static_cast<int>(j);
            else if (x > 1e-12)
                return false;
        }
        if (map[i] < 0) return false;
    }
    if (kappa) *kappa = std::move(map);
    return true;
}

inline signed_measure pushforward_measure(const markov_kernel& t, const signed_measure& mu) {
    require_same_space(t.source, mu.space, "pushforward_measure");
    std::vector<double> out(t.target->size(), 0.0);
    for (std::size_t i = 0; i < t.rows.rows; ++i) {
        const double mi = mu.weights[i];
        if (mi == 0.0) continue;
        for (std::size_t j = 0; j < t.rows.cols; ++j) out[j] += mi * t.rows(i, j);
    }
    return signed_measure(t.target, std::move(out));
}

inline probability_measure pushforward_measure(const markov_kernel& t,
                                               const probability_measure& mu) {
    auto s = pushforward_measure(t, mu.as_signed());
    for (double& w : s.weights)
        if (w < 0.0) w = 0.0; // round-off only: products of nonnegatives
    double total = 0.0;
    for (double w : s.weights) total += w;
    for (double& w : s.weights) w /= total;
    return probability_measure(t.target, std::move(s.weights));
}

// (T2 . T1): first T1, then T2; the matrix product of the rows.
inline markov_kernel compose_kernels(const markov_kernel& t2, const markov_kernel& t1) {
    require_same_space(t1.target, t2.source, "compose_kernels");
    matrix r = t1.rows * t2.rows;
    // renormalize away accumulated round-off; rows stay within 1e-12 of 1
    for (std::size_t i = 0; i < r.rows; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < r.cols; ++j) sum += r(i, j);
        for (std::size_t j = 0; j < r.cols; ++j) r(i, j) /= sum;
    }
    return markov_kernel(t1.source, t2.target, std::move(r));
}

// T^*(f)(x) = integral of f against the row measure at x.
inline point_function pullback_function(const markov_kernel& t, const point_function& f) {
    require_same_space(t.target, f.space, "pullback_function");
    std::vector<double> out(t.source->size(), 0.0);
    for (std::size_t i = 0; i < t.rows.rows; ++i)
        for (std::size_t j = 0; j < t.rows.cols; ++j) out[i] += t.rows(i, j) * f.values[j];
    return point_function(t.source, std::move(out));
}

inline tangent_vector pushforward_tangent(const markov_kernel& t, const tangent_vector& a) {
    require_same_space(t.source, a.base.space, "pushforward_tangent");
    probability_measure base = pushforward_measure(t, a.base);
    signed_measure dir = pushforward_measure(t, a.direction);
    // supp(T_* dir) is contained in supp(T_* base) whenever the input
    // was dominated; sub-tolerance stragglers are round-off
    for (std::size_t j = 0; j < dir.size(); ++j)
        if (base.weights[j] <= support_tol && std::abs(dir.weights[j]) <= support_tol)
            dir.weights[j] = 0.0;
    return tangent_vector(std::move(base), std::move(dir));
}

inline statistical_model pushforward_model(const markov_kernel& t,
                                           const statistical_model& model) {
    require_same_space(t.source, model.space, "pushforward_model");
    return detail::map_model(model, t.target, t.pushforward_matrix(), " (pushed)");
}

// Conditional measures of mu along a deterministic statistic: mu
// restricted to each fiber and renormalized.  Fibers with negligible
// pushforward mass are left unset.
inline std::vector<std::optional<probability_measure>>
conditional_for_statistic(const markov_kernel& t, const probability_measure& mu,
                          double tol = support_tol) {
    std::vector<int> kappa;
    if (!is_deterministic(t, &kappa))
        throw model_error("conditional_for_statistic: kernel is not a deterministic statistic");
    require_same_space(t.source, mu.space, "conditional_for_statistic");
    const std::size_t ny = t.target->size();
    std::vector<double> mass(ny, 0.0);
    for (std::size_t i = 0; i < kappa.size(); ++i) mass[kappa[i]] += mu.weights[i];
    std::vector<std::optional<probability_measure>> cond(ny);
    for (std::size_t y = 0; y < ny; ++y) {
        if (mass[y] <= tol) continue;
        std::vector<double> w(mu.size(), 0.0);
        for (std::size_t i = 0; i < kappa.size(); ++i)
            if (static_cast<std::size_t>(kappa[i]) == y) w[i] = mu.weights[i] / mass[y];
        cond[y] = probability_measure(mu.space, std::move(w));
    }
    return cond;
}

// Bayes inverse of the joint mu_i T_ij; coincides with the fiber
// conditional when T is deterministic.
inline std::vector<std::optional<probability_measure>>
bayes_conditional(const markov_kernel& t, const probability_measure& mu,
                  double tol = support_tol) {
    require_same_space(t.source, mu.space, "bayes_conditional");
    const std::size_t ny = t.target->size();
    auto push = pushforward_measure(t, mu.as_signed());
    std::vector<std::optional<probability_measure>> cond(ny);
    for (std::size_t y = 0; y < ny; ++y) {
        if (push.weights[y] <= tol) continue;
        std::vector<double> w(mu.size());
        double total = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            w[i] = mu.weights[i] * t.rows(i, y) / push.weights[y];
            total += w[i];
        }
        for (double& x : w) x /= total;
        cond[y] = probability_measure(mu.space, std::move(w));
    }
    return cond;
}

struct sufficiency_report {
    bool is_sufficient = false;
    std::vector<std::optional<probability_measure>> conditional; // per target atom
    double max_discrepancy = 0.0;
    double tol = 0.0;
};

// Grid surrogate for sufficiency: the kernel is sufficient for the
// sampled family when one conditional mapping works for every member.
// The discrepancy is the worst variation of the conditional across the
// sample, restricted to fibers where every member puts mass above tol.
inline sufficiency_report check_sufficiency(const markov_kernel& t,
                                            const std::vector<probability_measure>& sample,
                                            double tol) {
    if (sample.empty()) throw empty_sample_error("check_sufficiency: empty sample");
    for (const auto& mu : sample)
        require_same_space(t.source, mu.space, "check_sufficiency");

    const bool det = is_deterministic(t);
    std::vector<std::vector<std::optional<probability_measure>>> conds;
    conds.reserve(sample.size());
    for (const auto& mu : sample)
        conds.push_back(det ? conditional_for_statistic(t, mu, tol)
                            : bayes_conditional(t, mu, tol));

    const std::size_t ny = t.target->size();
    sufficiency_report rep;
    rep.tol = tol;
    rep.conditional.resize(ny);
    for (std::size_t y = 0; y < ny; ++y) {
        bool all_defined = true;
        for (const auto& c : conds)
            if (!c[y]) all_defined = false;
        if (!all_defined) continue; // conditional undefined off the common support
        rep.conditional[y] = conds.front()[y];
        for (std::size_t s = 1; s < conds.size(); ++s)
            for (std::size_t i = 0; i < t.source->size(); ++i)
                rep.max_discrepancy =
                    std::max(rep.max_discrepancy,
                             std::abs(conds[s][y]->weights[i] - conds.front()[y]->weights[i]));
    }
    rep.is_sufficient = rep.max_discrepancy <= tol;
    return rep;
}

// Fisher norm lost under the pushforward; never negative in theory.
inline double monotonicity_gap(const markov_kernel& t, const tangent_vector& a) {
    double before = fisher_norm2(a);
    double after = fisher_norm2(pushforward_tangent(t, a));
    double gap = before - after;
    assert(gap >= -1e-9);
    return gap;
}

} // namespace igeo
