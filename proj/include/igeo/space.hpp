#pragma once

#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "igeo/errors.hpp"

namespace igeo {

// A finite measurable space: an ordered list of distinct atom labels.
// The order is fixed and defines the indexing of every weight vector
// living over the space.
struct sample_space {
    std::vector<std::string> atoms;

    explicit sample_space(std::vector<std::string> labels) : atoms(std::move(labels)) {
        if (atoms.empty()) throw model_error("sample_space: needs at least one atom");
        std::unordered_set<std::string> seen;
        for (const auto& a : atoms)
            if (!seen.insert(a).second)
                throw model_error("sample_space: duplicate atom label '" + a + "'");
    }

    std::size_t size() const { return atoms.size(); }

    int index_of(const std::string& label) const {
        for (std::size_t i = 0; i < atoms.size(); ++i)
            if (atoms[i] == label) return static_cast<int>(i);
        return -1;
    }

    bool operator==(const sample_space& other) const { return atoms == other.atoms; }
};

using space_ptr = std::shared_ptr<const sample_space>;

inline space_ptr make_space(std::vector<std::string> labels) {
    return std::make_shared<const sample_space>(std::move(labels));
}

// Convenience: atoms named "x0".."x{n-1}".
inline space_ptr make_space(std::size_t n, const std::string& prefix = "x") {
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels.push_back(prefix + std::to_string(i));
    return make_space(std::move(labels));
}

inline bool same_space(const space_ptr& a, const space_ptr& b) {
    return a == b || (a && b && *a == *b);
}

inline void require_same_space(const space_ptr& a, const space_ptr& b, const char* what) {
    if (!same_space(a, b))
        throw space_mismatch_error(std::string(what) + ": operands live on different sample spaces");
}

} // namespace igeo
