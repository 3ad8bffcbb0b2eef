#pragma once

#include <stdexcept>
#include <string>

namespace noiseknn {

// Base class for everything this library throws on purpose.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Point/metric kind or dimension disagreement (e.g. Euclidean distance
// between a vector and a symbol, or vectors of different lengths).
struct kind_mismatch_error : error {
    using error::error;
};

// A scalar argument is outside its documented range (delta outside (0,1),
// k outside [1,n], a family parameter outside the admissible set, ...).
// The message names the violated constraint.
struct parameter_error : error {
    using error::error;
};

// A dataset violates its invariants (empty, responses outside [0,1],
// non-binary labels where binary labels are required, mixed point kinds).
struct data_error : error {
    using error::error;
};

// Requested operation is undefined for the given object (e.g. exact risk
// evaluation on a family with continuous support).
struct unsupported_error : error {
    using error::error;
};

// File-level problems. Carries the path and, when known, the 1-based line
// number of the first offending record.
struct io_error : error {
    io_error(const std::string& path, long line, const std::string& what_arg)
        : error(line > 0 ? path + ":" + std::to_string(line) + ": " + what_arg
                         : path + ": " + what_arg),
          path_(path),
          line_(line) {}

    const std::string& path() const noexcept { return path_; }
    long line() const noexcept { return line_; }  // 0 when not line-addressable

private:
    std::string path_;
    long line_;
};

}  // namespace noiseknn
