#pragma once

#include <stdexcept>
#include <string>

namespace frackin {

// Bad user input: malformed config, non-finite or non-positive fields.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A mathematical precondition failed (e.g. a Lemma integral would diverge).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct QuadratureError : std::runtime_error {
    QuadratureError(const std::string& what, double achieved_tol)
        : std::runtime_error(what + " (achieved " + std::to_string(achieved_tol) + ")"),
          achieved(achieved_tol) {}
    double achieved;
};

// Raised by a solver when a step contract is broken (CFL, negativity).
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace frackin
