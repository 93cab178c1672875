#pragma once

#include <stdexcept>
#include <string>

namespace ca {

// Base class for every error the toolkit throws.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// A vector/matrix shape does not match its counterpart.
class dimension_error : public error {
public:
    using error::error;
};

// An argument value is outside its admissible range.
class parameter_error : public error {
public:
    using error::error;
};

// A dataset violates a structural requirement (class counts, labels, lengths).
class dataset_error : public error {
public:
    using error::error;
};

// A file does not conform to its declared format.
class format_error : public error {
public:
    using error::error;
};

// A numerical subproblem is singular or otherwise degenerate.
class solver_error : public error {
public:
    using error::error;
};

// Two hashes of different kinds were compared.
class hash_error : public error {
public:
    using error::error;
};

// A requested metric is undefined for the given inputs.
class metric_error : public error {
public:
    using error::error;
};

} // namespace ca
