#pragma once

#include <stdexcept>
#include <string>

namespace znwrap {

/// Raised when a bound that is a proven theorem fails at runtime.  Every
/// asserted inequality in this library is exact at finite modulus, so this
/// firing indicates an implementation bug rather than unlucky input.
class theorem_violation : public std::runtime_error {
public:
    explicit theorem_violation(const std::string& what_arg)
        : std::runtime_error(what_arg) {}
};

/// Raised when an adaptive routine exhausts its retry budget (increase the
/// dimension cap or relax delta); distinct from bad arguments.
class retry_exhausted : public std::runtime_error {
public:
    explicit retry_exhausted(const std::string& what_arg)
        : std::runtime_error(what_arg) {}
};

inline void require_arg(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

inline void require_theorem(bool ok, const std::string& msg) {
    if (!ok) throw theorem_violation(msg);
}

}  // namespace znwrap
