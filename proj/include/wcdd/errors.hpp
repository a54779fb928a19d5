#pragma once

#include <stdexcept>
#include <string>

namespace wcdd {

// Input left the domain where a kernel formula is meaningful (polar form past
// the first modulus zero, nonpositive delay, unsupported kernel for a solver).
class kernel_domain_error : public std::domain_error {
public:
    explicit kernel_domain_error(const std::string& what) : std::domain_error(what) {}
};

// An iterative solver exhausted its budget without reaching tolerance.
class convergence_error : public std::runtime_error {
public:
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace wcdd
