#pragma once

#include <stdexcept>
#include <string>

namespace logonet {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// bad shapes, mismatched vector/matrix sizes
struct dimension_error : error {
    using error::error;
};

// zero-variance / constant / non-finite input where an estimator needs spread
struct degenerate_input : error {
    using error::error;
};

// parameter outside its mathematical domain (e.g. nu <= 2)
struct domain_error : error {
    using error::error;
};

// a clique or separator covariance block failed its Cholesky factorization
struct block_conditioning_error : error {
    block_conditioning_error(const std::string& kind, int id, const std::string& what)
        : error(what), block_kind(kind), block_id(id) {}
    std::string block_kind;  // "clique" or "separator"
    int block_id;
};

struct config_error : error {
    using error::error;
};

struct parse_error : error {
    using error::error;
};

struct io_error : error {
    using error::error;
};

}  // namespace logonet
