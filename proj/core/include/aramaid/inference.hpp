#pragma once

#include "aramaid/diagram.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace aramaid
{

/// Observed labels of chance or deterministic nodes.
using Evidence = std::map<std::string, std::string, std::less<>>;

/// Label for every node that carries a domain.
using Assignment = std::map<std::string, std::string, std::less<>>;

class InferenceError : public Error
{
public:
    using Error::Error;
};

/// Raised when the evidence has probability zero under the model.
class ImpossibleEvidence : public InferenceError
{
public:
    ImpossibleEvidence() : InferenceError("impossible evidence") {}
};

/// Deterministic decision rules keyed by decision node id. A rule lists the
/// chosen alternative for every configuration of the decision's parents, in
/// mixed-radix order; a single entry applies to every configuration.
class Policy
{
public:
    Policy& fix(std::string node, std::string alternative);
    Policy& set_rule(std::string node, std::vector<std::string> choices);
    /// Entries of `other` override entries of this policy.
    Policy& merge(const Policy& other);

    const std::vector<std::string>* rule(std::string_view node) const;
    bool contains(std::string_view node) const { return rule(node) != nullptr; }
    const std::map<std::string, std::vector<std::string>, std::less<>>& rules() const noexcept { return rules_; }

    bool operator==(const Policy&) const = default;

private:
    std::map<std::string, std::vector<std::string>, std::less<>> rules_;
};

enum class Engine
{
    elimination,   // variable elimination over the relevant sub-graph
    enumeration,   // exhaustive enumeration of joint assignments
};

/// Chain-rule probability of a complete assignment under the policy.
double joint_probability(const Diagram& d, const Policy& policy, const Assignment& assignment);

/// Conditional distribution of `target` given the evidence, in domain order.
std::vector<double> marginal_distribution(const Diagram& d,
                                          const Policy& policy,
                                          const Evidence& evidence,
                                          std::string_view target,
                                          Engine engine = Engine::elimination);

/// Conditional expectation of the agent's additive utility.
double expected_utility(const Diagram& d,
                        std::string_view agent,
                        const Policy& policy,
                        const Evidence& evidence = {},
                        Engine engine = Engine::elimination);

struct EuAxis
{
    std::string node;
    std::vector<std::string> labels;
    bool own_decision = false;
};

/// Expected utilities over the Cartesian product of the axes (mixed radix,
/// first axis most significant). `is_max` marks, within every group of cells
/// sharing the non-own-decision axis values, the cells attaining the maximum.
struct EuTable
{
    std::string agent;
    std::vector<EuAxis> axes;
    std::vector<double> cells;
    std::vector<bool> is_max;

    std::vector<std::string> labels_of(std::size_t cell) const;
    std::size_t cell_index(const std::vector<std::string>& labels) const;
};

/// Decision axes are fixed as constant rules and chance/deterministic axes
/// become evidence. The agent's decisions off the axes must be supplied in
/// `fixed`; other agents' unfixed decisions are treated as uniformly random.
EuTable decision_table(const Diagram& d,
                       std::string_view agent,
                       const std::vector<std::string>& axes,
                       const Policy& fixed = {},
                       Engine engine = Engine::elimination);

/// Tolerance used to detect ties between expected utilities.
inline constexpr double kTieTolerance = 1e-12;

}  // namespace aramaid
