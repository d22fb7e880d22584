#pragma once

#include <stdexcept>
#include <string>

namespace radial {

// Failure classes named after what went wrong, so callers can react to
// bad input (domain), an under-resolved grid, or a broken construction.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

struct ConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct FlowBreakdown : std::runtime_error {
    FlowBreakdown(const std::string& what, int node_, double t_)
        : std::runtime_error(what), node(node_), t(t_) {}
    int node;
    double t;
};

}  // namespace radial
