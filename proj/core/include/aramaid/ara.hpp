#pragma once

#include "aramaid/diagram.hpp"
#include "aramaid/inference.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace aramaid
{

/// What the defender thinks the attacker believes about the defender
/// decisions he cannot observe: one distribution (domain order) per node.
struct AttackerBeliefs
{
    std::map<std::string, std::vector<double>, std::less<>> distributions;
};

struct PointRule
{
    bool operator==(const PointRule&) const = default;
};

struct DirichletRule
{
    std::vector<double> concentration;
    bool operator==(const DirichletRule&) const = default;
};

/// A closed interval. For scalars the draw replaces the parameter; for
/// utility weights the draw is an offset added to each weight before
/// clipping at zero and renormalizing.
struct UniformRule
{
    double low = 0.0;
    double high = 0.0;
    bool operator==(const UniformRule&) const = default;
};

using SamplingRule = std::variant<PointRule, DirichletRule, UniformRule>;

enum class QuantityKind
{
    belief,           // node: belief-distributed defender decision
    cpt_row,          // node + row: one row of a chance node
    utility_weights,  // node: utility node
    value_scale,      // node: linear or power_root value node
    value_root,       // node: power_root value node
    value_offset,     // node: linear value node
};

std::string_view to_string(QuantityKind kind);

struct UncertainQuantity
{
    QuantityKind kind = QuantityKind::belief;
    std::string node;
    std::vector<std::string> row;
    SamplingRule rule;

    bool operator==(const UncertainQuantity&) const = default;
};

/// The defender's uncertainty about the attacker's parameters.
struct ParameterUncertainty
{
    std::vector<UncertainQuantity> quantities;

    bool all_point() const;
};

class SamplingError : public Error
{
public:
    using Error::Error;
};

class ForecastError : public Error
{
public:
    using Error::Error;
};

/// Probability of each attacker alternative for every context (assignment
/// of the attacker decision's parents).
struct AttackForecast
{
    std::string decision;
    std::vector<std::string> context_nodes;
    std::vector<std::vector<std::string>> contexts;  // mixed radix over context_nodes
    std::vector<std::string> alternatives;
    std::vector<std::vector<double>> probabilities;  // [context][alternative]
    std::uint64_t draws = 0;
    std::uint64_t seed = 0;

    double probability(const std::vector<std::string>& context, std::string_view alternative) const;
    /// Canonical serialization, full precision.
    std::string to_csv() const;
};

struct BestResponse
{
    std::string decision;
    std::vector<std::string> optimal;                         // tie set
    std::vector<std::pair<std::string, double>> utilities;    // per alternative, domain order
};

struct RankedPolicy
{
    Policy policy;
    double expected_utility = 0.0;
};

struct DefenderSolution
{
    Policy policy;
    double expected_utility = 0.0;
    std::vector<RankedPolicy> ranking;  // descending, stable in enumeration order
};

struct ForecastOptions
{
    unsigned threads = 1;
    Engine engine = Engine::elimination;
};

/// The attacker's view: believed defender decisions become parentless chance
/// nodes; observed ones stay decisions.
Diagram attacker_view(const Diagram& d,
                      const AttackerBeliefs& beliefs,
                      const std::vector<std::string>& observed);

/// Evaluates every alternative of the agent's single decision. `context`
/// fixes the other agents' remaining decisions and may carry evidence.
BestResponse best_response(const Diagram& view,
                           std::string_view agent,
                           const Assignment& context,
                           Engine engine = Engine::elimination);

/// Monte Carlo forecast of the attacker's decision. Draw i uses its own
/// generator seeded from (seed, i); ties split equally.
AttackForecast forecast_attack(const Diagram& d,
                               const AttackerBeliefs& beliefs,
                               const ParameterUncertainty& uncertainty,
                               std::uint64_t draws,
                               std::uint64_t seed,
                               const ForecastOptions& options = {});

/// Replaces the forecast decision with a chance node and returns the
/// defender policy of highest expected utility.
DefenderSolution solve_defender(const Diagram& d,
                                const AttackForecast& forecast,
                                Engine engine = Engine::elimination);

/// Every deterministic rule of a decision, in mixed-radix order.
std::vector<std::vector<std::string>> enumerate_rules(const Diagram& d, std::string_view decision);

/// Checks every rule against the diagram it will be applied to.
void check_uncertainty(const DiagramSpec& spec, const ParameterUncertainty& uncertainty);

/// Parameter set of draw `draw`: `spec` with every uncertain quantity
/// replaced by a sample from the draw's own generator.
DiagramSpec sample_parameters(const DiagramSpec& spec,
                              const ParameterUncertainty& uncertainty,
                              std::uint64_t seed,
                              std::uint64_t draw);

}  // namespace aramaid
