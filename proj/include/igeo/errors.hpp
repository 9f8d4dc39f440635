#pragma once

#include <stdexcept>
#include <string>

namespace igeo {

// Base class for everything thrown by this library.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// A measure is not absolutely continuous w.r.t. the requested base:
// some atom carries mass while the base does not.
struct domination_error : error {
    explicit domination_error(const std::string& msg) : error(msg) {}
};

// Parameter outside a plot's open domain box (or too close to its
// boundary for finite differencing).
struct domain_error : error {
    explicit domain_error(const std::string& msg) : error(msg) {}
};

// A constructed object violates its simplex/shape invariants.
struct model_error : error {
    explicit model_error(const std::string& msg) : error(msg) {}
};

struct base_mismatch_error : error {
    explicit base_mismatch_error(const std::string& msg) : error(msg) {}
};

struct space_mismatch_error : error {
    explicit space_mismatch_error(const std::string& msg) : error(msg) {}
};

struct empty_sample_error : error {
    explicit empty_sample_error(const std::string& msg) : error(msg) {}
};

// A probe curve does not pass through the requested base point at t = 0.
struct curve_base_error : error {
    explicit curve_base_error(const std::string& msg) : error(msg) {}
};

// Tangent basis Gram matrix is singular beyond tolerance.
struct degenerate_basis_error : error {
    explicit degenerate_basis_error(const std::string& msg) : error(msg) {}
};

// Table-backed map queried at an unregistered point.
struct table_miss_error : error {
    explicit table_miss_error(const std::string& msg) : error(msg) {}
};

// Configuration ingestion errors.
struct parse_error : error {
    explicit parse_error(const std::string& msg) : error(msg) {}
};
struct schema_error : error {
    explicit schema_error(const std::string& msg) : error(msg) {}
};
struct validation_error : error {
    explicit validation_error(const std::string& msg) : error(msg) {}
};
struct io_error : error {
    explicit io_error(const std::string& msg) : error(msg) {}
};

} // namespace igeo
