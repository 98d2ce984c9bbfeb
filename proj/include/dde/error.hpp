#pragma once

#include <stdexcept>
#include <string>

namespace dde {

// Input violates a documented precondition or data invariant.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A metric was requested but the annotations or audio it needs are absent.
class MissingInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A decision policy emitted an action that is illegal for the agent's mode.
class PolicyContractViolation : public std::runtime_error {
public:
    PolicyContractViolation(int tick_index, int agent, const std::string& what)
        : std::runtime_error("tick " + std::to_string(tick_index) + ", agent " +
                             (agent == 0 ? "A" : "B") + ": " + what),
          tick_index_(tick_index), agent_(agent) {}

    int tick_index() const noexcept { return tick_index_; }
    int agent() const noexcept { return agent_; }

private:
    int tick_index_;
    int agent_;
};

} // namespace dde
