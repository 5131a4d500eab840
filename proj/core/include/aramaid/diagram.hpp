#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace aramaid
{

/// Base class for every error raised by the engine.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

enum class AgentKind
{
    defender,
    attacker,
    nature,
};

enum class NodeKind
{
    decision,
    chance,
    deterministic,
    value,
    utility,
};

std::string_view to_string(AgentKind kind);
std::string_view to_string(NodeKind kind);
std::optional<AgentKind> parse_agent_kind(std::string_view text);
std::optional<NodeKind> parse_node_kind(std::string_view text);

struct Agent
{
    std::string id;
    std::string display_name;
    AgentKind kind = AgentKind::defender;

    bool operator==(const Agent&) const = default;
};

/// Finite outcome set of a node. Numeric tags (dollars or unitless scores)
/// are either absent or present for every label.
struct Domain
{
    std::vector<std::string> labels;
    std::vector<double> numeric_tags;

    std::size_t size() const { return labels.size(); }
    bool has_tags() const { return !numeric_tags.empty(); }
    std::optional<std::size_t> index_of(std::string_view label) const;

    bool operator==(const Domain&) const = default;
};

// Rows are keyed by the parent labels in parent order.
struct CptRow
{
    std::vector<std::string> parent_labels;
    std::vector<double> probabilities;

    bool operator==(const CptRow&) const = default;
};

struct DetRow
{
    std::vector<std::string> parent_labels;
    std::string label;

    bool operator==(const DetRow&) const = default;
};

struct ScoreRow
{
    std::vector<std::string> parent_labels;
    double score = 0.0;

    bool operator==(const ScoreRow&) const = default;
};

struct Cpt
{
    std::vector<CptRow> rows;
    bool operator==(const Cpt&) const = default;
};

struct DetTable
{
    std::vector<DetRow> rows;
    bool operator==(const DetTable&) const = default;
};

enum class ValueForm
{
    table,
    linear,
    power_root,
    indicator,
};

std::string_view to_string(ValueForm form);
std::optional<ValueForm> parse_value_form(std::string_view text);

/// Maps the parents of a value node to a score.
///
/// linear:     v = offset - x / scale
/// power_root: v = (x / scale)^(1 / root)
/// indicator:  labels in zero_labels score 0, labels in one_labels score 1
/// table:      explicit rows over all parents
///
/// For the three closed forms the node has exactly one parent and x is that
/// parent's numeric tag.
struct ValueSpec
{
    ValueForm form = ValueForm::table;
    double scale = 1.0;
    double offset = 1.0;
    double root = 1.0;
    std::vector<std::string> zero_labels;
    std::vector<std::string> one_labels;
    std::vector<ScoreRow> rows;

    bool operator==(const ValueSpec&) const = default;
};

/// Additive utility: weighted sum over value nodes of the same owner.
struct UtilitySpec
{
    std::vector<std::pair<std::string, double>> weights;
    bool operator==(const UtilitySpec&) const = default;
};

using Payload = std::variant<std::monostate, Cpt, DetTable, ValueSpec, UtilitySpec>;

struct NodeSpec
{
    std::string id;
    NodeKind kind = NodeKind::chance;
    std::optional<std::string> owner;
    Domain domain;
    std::vector<std::string> parents;
    Payload payload;

    bool operator==(const NodeSpec&) const = default;
};

struct DecisionOrder
{
    std::string agent;
    std::vector<std::string> decisions;
    bool operator==(const DecisionOrder&) const = default;
};

/// The assembled (possibly invalid) definition of a diagram.
struct DiagramSpec
{
    std::vector<Agent> agents;
    std::vector<NodeSpec> nodes;
    std::vector<DecisionOrder> orders;

    const NodeSpec* find_node(std::string_view id) const;
    NodeSpec* find_node(std::string_view id);

    bool operator==(const DiagramSpec&) const = default;
};

enum class ViolationCode
{
    no_nodes,
    duplicate_id,
    unknown_reference,
    cycle,
    bad_domain,
    bad_ownership,
    missing_payload,
    incomplete_table,
    duplicate_row,
    malformed_row,
    non_stochastic_row,
    bad_label,
    bad_value_spec,
    bad_utility,
    temporal_order,
};

struct Violation
{
    ViolationCode code;
    std::string node;
    // Parent labels of the offending row, when the violation concerns a row.
    std::vector<std::string> row;
    std::string message;

    bool operator==(const Violation&) const = default;
};

class Diagram;

class InvalidDiagram : public Error
{
public:
    explicit InvalidDiagram(std::vector<Violation> violations);
    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<Violation> violations_;
};

/// Compiled, validated node. Tables are dense and indexed by the parent
/// configuration in mixed radix, first parent most significant.
struct CompiledNode
{
    std::string id;
    NodeKind kind = NodeKind::chance;
    std::optional<std::string> owner;
    Domain domain;
    std::vector<std::size_t> parents;
    std::vector<std::size_t> children;
    std::vector<std::size_t> parent_cards;

    std::vector<double> cpt;          // configs * domain.size()
    std::vector<std::size_t> det;     // configs
    std::vector<double> scores;       // configs (value nodes)
    std::vector<std::pair<std::size_t, double>> weights;  // utility nodes

    std::size_t configurations() const;
    std::size_t config_index(const std::vector<std::size_t>& parent_values) const;
    std::vector<std::size_t> config_values(std::size_t config) const;
    bool has_domain() const { return kind != NodeKind::value && kind != NodeKind::utility; }
};

/// Immutable, validated multi-agent influence diagram.
class Diagram
{
public:
    const DiagramSpec& spec() const noexcept { return spec_; }
    const std::vector<Agent>& agents() const noexcept { return spec_.agents; }
    const std::vector<CompiledNode>& nodes() const noexcept { return nodes_; }
    const CompiledNode& node(std::size_t index) const { return nodes_.at(index); }
    std::size_t size() const noexcept { return nodes_.size(); }

    std::optional<std::size_t> find(std::string_view id) const;
    std::size_t index_of(std::string_view id) const;  // throws Error when unknown

    const Agent* find_agent(std::string_view id) const;
    /// Unique agent of the given kind, or nullptr when absent or ambiguous.
    const Agent* agent_of_kind(AgentKind kind) const;

    /// Decision nodes of an agent in declared temporal order.
    std::vector<std::size_t> decisions_of(std::string_view agent) const;
    /// The utility node owned by the agent; throws Error unless exactly one.
    std::size_t utility_of(std::string_view agent) const;

    /// Parents before children, ties broken by ascending node id.
    const std::vector<std::size_t>& topological_order() const noexcept { return topo_; }

private:
    friend Diagram build_diagram(DiagramSpec spec);

    DiagramSpec spec_;
    std::vector<CompiledNode> nodes_;
    std::vector<std::size_t> topo_;
};

/// Exhaustive, deterministic list of invariant violations (empty when valid).
std::vector<Violation> validate_diagram(const DiagramSpec& spec);
std::vector<Violation> validate_diagram(const Diagram& diagram);

/// Validates and compiles. Throws InvalidDiagram carrying every violation.
Diagram build_diagram(DiagramSpec spec);

/// Node ids in topological order; ties broken by ascending id.
std::vector<std::string> topological_order(const Diagram& diagram);

/// Copy of the diagram where `node` becomes a chance node over `parents`
/// with the given rows (rows in mixed-radix order over the new parents).
Diagram with_chance_node(const Diagram& diagram,
                         std::string_view node,
                         std::vector<std::string> parents,
                         const std::vector<std::vector<double>>& rows);

/// Enumerates label tuples over the given domains in mixed-radix order.
std::vector<std::vector<std::string>> label_tuples(const std::vector<const Domain*>& domains);

}  // namespace aramaid
