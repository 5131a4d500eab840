#include "aramaid/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>

namespace aramaid
{
namespace
{

constexpr double kRowTolerance = 1e-9;

std::string join(const std::vector<std::string>& parts, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i)
    {
        if (i != 0)
            out += sep;
        out += parts[i];
    }
    return out;
}

std::string describe_row(const std::string& node, const std::vector<std::string>& labels)
{
    return node + " | " + join(labels, ",");
}

std::string format_sum(double value)
{
    std::ostringstream os;
    os.precision(10);
    os << value;
    return os.str();
}

bool payload_matches(NodeKind kind, const Payload& payload)
{
    switch (kind)
    {
    case NodeKind::decision:
        return std::holds_alternative<std::monostate>(payload);
    case NodeKind::chance:
        return std::holds_alternative<Cpt>(payload);
    case NodeKind::deterministic:
        return std::holds_alternative<DetTable>(payload);
    case NodeKind::value:
        return std::holds_alternative<ValueSpec>(payload);
    case NodeKind::utility:
        return std::holds_alternative<UtilitySpec>(payload);
    }
    return false;
}

bool has_domain(NodeKind kind)
{
    return kind != NodeKind::value && kind != NodeKind::utility;
}

/// Checks a set of keyed rows for arity, label validity, duplicates and
/// totality. Returns the index of each valid row's configuration.
class RowChecker
{
public:
    RowChecker(const NodeSpec& node, std::vector<const Domain*> parent_domains,
               std::vector<Violation>& out)
        : node_(node), domains_(std::move(parent_domains)), out_(out)
    {
        total_ = 1;
        for (const Domain* d : domains_)
            total_ *= d->size();
        seen_.assign(total_, false);
    }

    std::optional<std::size_t> accept(const std::vector<std::string>& labels)
    {
        if (labels.size() != domains_.size())
        {
            out_.push_back({ViolationCode::malformed_row, node_.id, labels,
                            "malformed row " + describe_row(node_.id, labels) + ": expected " +
                                std::to_string(domains_.size()) + " parent labels"});
            return std::nullopt;
        }
        std::size_t config = 0;
        for (std::size_t i = 0; i < labels.size(); ++i)
        {
            auto idx = domains_[i]->index_of(labels[i]);
            if (!idx)
            {
                out_.push_back({ViolationCode::bad_label, node_.id, labels,
                                "unknown label '" + labels[i] + "' for parent " + node_.parents[i] +
                                    " in row " + describe_row(node_.id, labels)});
                return std::nullopt;
            }
            config = config * domains_[i]->size() + *idx;
        }
        if (seen_[config])
        {
            out_.push_back({ViolationCode::duplicate_row, node_.id, labels,
                            "duplicate row " + describe_row(node_.id, labels)});
            return std::nullopt;
        }
        seen_[config] = true;
        return config;
    }

    void finish()
    {
        std::size_t missing = 0;
        std::optional<std::size_t> first;
        for (std::size_t c = 0; c < total_; ++c)
        {
            if (!seen_[c])
            {
                ++missing;
                if (!first)
                    first = c;
            }
        }
        if (missing == 0)
            return;
        std::vector<std::string> labels(domains_.size());
        std::size_t rest = *first;
        for (std::size_t i = domains_.size(); i-- > 0;)
        {
            labels[i] = domains_[i]->labels[rest % domains_[i]->size()];
            rest /= domains_[i]->size();
        }
        out_.push_back({ViolationCode::incomplete_table, node_.id, labels,
                        "incomplete table for " + node_.id + ": " + std::to_string(missing) + " of " +
                            std::to_string(total_) + " parent tuples missing (first: " +
                            describe_row(node_.id, labels) + ")"});
    }

private:
    const NodeSpec& node_;
    std::vector<const Domain*> domains_;
    std::vector<Violation>& out_;
    std::size_t total_ = 1;
    std::vector<bool> seen_;
};

std::set<std::string> descendants_or_self(const std::string& start,
                                          const std::map<std::string, std::vector<std::string>>& children)
{
    std::set<std::string> seen{start};
    std::vector<std::string> stack{start};
    while (!stack.empty())
    {
        std::string cur = stack.back();
        stack.pop_back();
        auto it = children.find(cur);
        if (it == children.end())
            continue;
        for (const auto& c : it->second)
            if (seen.insert(c).second)
                stack.push_back(c);
    }
    return seen;
}

}  // namespace

std::string_view to_string(AgentKind kind)
{
    switch (kind)
    {
    case AgentKind::defender:
        return "defender";
    case AgentKind::attacker:
        return "attacker";
    case AgentKind::nature:
        return "nature";
    }
    return "?";
}

std::string_view to_string(NodeKind kind)
{
    switch (kind)
    {
    case NodeKind::decision:
        return "decision";
    case NodeKind::chance:
        return "chance";
    case NodeKind::deterministic:
        return "deterministic";
    case NodeKind::value:
        return "value";
    case NodeKind::utility:
        return "utility";
    }
    return "?";
}

std::string_view to_string(ValueForm form)
{
    switch (form)
    {
    case ValueForm::table:
        return "table";
    case ValueForm::linear:
        return "linear";
    case ValueForm::power_root:
        return "power_root";
    case ValueForm::indicator:
        return "indicator";
    }
    return "?";
}

std::optional<AgentKind> parse_agent_kind(std::string_view text)
{
    for (auto k : {AgentKind::defender, AgentKind::attacker, AgentKind::nature})
        if (to_string(k) == text)
            return k;
    return std::nullopt;
}

std::optional<NodeKind> parse_node_kind(std::string_view text)
{
    for (auto k : {NodeKind::decision, NodeKind::chance, NodeKind::deterministic, NodeKind::value,
                   NodeKind::utility})
        if (to_string(k) == text)
            return k;
    return std::nullopt;
}

std::optional<ValueForm> parse_value_form(std::string_view text)
{
    for (auto f : {ValueForm::table, ValueForm::linear, ValueForm::power_root, ValueForm::indicator})
        if (to_string(f) == text)
            return f;
    return std::nullopt;
}

std::optional<std::size_t> Domain::index_of(std::string_view label) const
{
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - labels.begin());
}

const NodeSpec* DiagramSpec::find_node(std::string_view id) const
{
    auto it = std::find_if(nodes.begin(), nodes.end(), [&](const NodeSpec& n) { return n.id == id; });
    return it == nodes.end() ? nullptr : &*it;
}

NodeSpec* DiagramSpec::find_node(std::string_view id)
{
    auto it = std::find_if(nodes.begin(), nodes.end(), [&](const NodeSpec& n) { return n.id == id; });
    return it == nodes.end() ? nullptr : &*it;
}

InvalidDiagram::InvalidDiagram(std::vector<Violation> violations)
    : Error([&] {
          std::string msg = "invalid diagram:";
          for (const auto& v : violations)
              msg += "\n  " + v.message;
          return msg;
      }())
    , violations_(std::move(violations))
{
}

std::size_t CompiledNode::configurations() const
{
    std::size_t n = 1;
    for (auto c : parent_cards)
        n *= c;
    return n;
}

std::size_t CompiledNode::config_index(const std::vector<std::size_t>& parent_values) const
{
    std::size_t idx = 0;
    for (std::size_t i = 0; i < parent_cards.size(); ++i)
        idx = idx * parent_cards[i] + parent_values[i];
    return idx;
}

std::vector<std::size_t> CompiledNode::config_values(std::size_t config) const
{
    std::vector<std::size_t> values(parent_cards.size());
    for (std::size_t i = parent_cards.size(); i-- > 0;)
    {
        values[i] = config % parent_cards[i];
        config /= parent_cards[i];
    }
    return values;
}

std::vector<Violation> validate_diagram(const DiagramSpec& spec)
{
    std::vector<Violation> out;

    if (spec.nodes.empty())
        out.push_back({ViolationCode::no_nodes, "", {}, "no nodes declared"});

    // Agents.
    std::map<std::string, const Agent*> agents;
    std::size_t natures = 0;
    for (const auto& a : spec.agents)
    {
        if (!agents.emplace(a.id, &a).second)
            out.push_back({ViolationCode::duplicate_id, a.id, {}, "duplicate id: agent " + a.id});
        if (a.kind == AgentKind::nature)
            ++natures;
    }
    if (natures > 1)
        out.push_back({ViolationCode::bad_ownership, "", {}, "more than one agent of kind nature"});

    // Node ids.
    std::map<std::string, const NodeSpec*> nodes;
    for (const auto& n : spec.nodes)
    {
        if (n.id.empty())
            out.push_back({ViolationCode::bad_domain, n.id, {}, "node with empty id"});
        if (!nodes.emplace(n.id, &n).second)
            out.push_back({ViolationCode::duplicate_id, n.id, {}, "duplicate id: node " + n.id});
    }

    auto agent_kind = [&](const std::string& id) -> std::optional<AgentKind> {
        auto it = agents.find(id);
        if (it == agents.end())
            return std::nullopt;
        return it->second->kind;
    };

    // Domains, ownership, parents and payloads.
    std::set<const NodeSpec*> checked;
    for (const auto& n : spec.nodes)
    {
        if (nodes.at(n.id) != &n)
            continue;  // duplicates are reported above
        checked.insert(&n);

        if (has_domain(n.kind))
        {
            const auto& d = n.domain;
            if (d.labels.empty())
                out.push_back({ViolationCode::bad_domain, n.id, {}, "empty domain for node " + n.id});
            std::set<std::string> uniq(d.labels.begin(), d.labels.end());
            if (uniq.size() != d.labels.size())
                out.push_back({ViolationCode::bad_domain, n.id, {}, "duplicate label in domain of " + n.id});
            if (d.has_tags() && d.numeric_tags.size() != d.labels.size())
                out.push_back({ViolationCode::bad_domain, n.id, {},
                               "numeric tags of " + n.id + " must cover every label"});
            for (double t : d.numeric_tags)
                if (!std::isfinite(t))
                    out.push_back({ViolationCode::bad_domain, n.id, {}, "non-finite numeric tag in " + n.id});
        }
        else if (!n.domain.labels.empty())
        {
            out.push_back({ViolationCode::bad_domain, n.id, {},
                           std::string(to_string(n.kind)) + " node " + n.id + " must not declare a domain"});
        }

        if (n.owner)
        {
            auto kind = agent_kind(*n.owner);
            if (!kind)
                out.push_back({ViolationCode::unknown_reference, n.id, {},
                               "unknown agent reference '" + *n.owner + "' on node " + n.id});
            else if (n.kind == NodeKind::chance && *kind != AgentKind::nature)
                out.push_back({ViolationCode::bad_ownership, n.id, {},
                               "chance node " + n.id + " must not be owned by " + *n.owner});
            else if ((n.kind == NodeKind::decision || n.kind == NodeKind::value || n.kind == NodeKind::utility) &&
                     *kind == AgentKind::nature)
                out.push_back({ViolationCode::bad_ownership, n.id, {},
                               std::string(to_string(n.kind)) + " node " + n.id + " must be owned by a non-nature agent"});
        }
        else if (n.kind == NodeKind::decision || n.kind == NodeKind::value || n.kind == NodeKind::utility)
        {
            out.push_back({ViolationCode::bad_ownership, n.id, {},
                           std::string(to_string(n.kind)) + " node " + n.id + " needs an owning agent"});
        }

        bool parents_ok = true;
        std::set<std::string> seen_parents;
        for (const auto& p : n.parents)
        {
            if (!seen_parents.insert(p).second)
            {
                out.push_back({ViolationCode::duplicate_id, n.id, {}, "duplicate parent " + p + " of node " + n.id});
                parents_ok = false;
                continue;
            }
            auto it = nodes.find(p);
            if (it == nodes.end())
            {
                out.push_back({ViolationCode::unknown_reference, n.id, {},
                               "unknown parent reference '" + p + "' on node " + n.id});
                parents_ok = false;
                continue;
            }
            const NodeSpec& parent = *it->second;
            if (n.kind == NodeKind::utility)
            {
                if (parent.kind != NodeKind::value || parent.owner != n.owner)
                {
                    out.push_back({ViolationCode::bad_utility, n.id, {},
                                   "utility node " + n.id + " parent " + p + " is not a value node of the same owner"});
                    parents_ok = false;
                }
            }
            else if (!has_domain(parent.kind))
            {
                out.push_back({ViolationCode::bad_value_spec, n.id, {},
                               "node " + n.id + " cannot depend on " + std::string(to_string(parent.kind)) +
                                   " node " + p});
                parents_ok = false;
            }
            else if (parent.domain.labels.empty())
            {
                parents_ok = false;
            }
        }

        if (!payload_matches(n.kind, n.payload))
        {
            out.push_back({ViolationCode::missing_payload, n.id, {},
                           "missing or mismatched table for " + std::string(to_string(n.kind)) + " node " + n.id});
            continue;
        }
        if (!parents_ok)
            continue;

        std::vector<const Domain*> pdoms;
        for (const auto& p : n.parents)
            pdoms.push_back(&nodes.at(p)->domain);

        if (const auto* cpt = std::get_if<Cpt>(&n.payload))
        {
            RowChecker rows(n, pdoms, out);
            for (const auto& r : cpt->rows)
            {
                if (!rows.accept(r.parent_labels))
                    continue;
                if (r.probabilities.size() != n.domain.size())
                {
                    out.push_back({ViolationCode::malformed_row, n.id, r.parent_labels,
                                   "malformed row " + describe_row(n.id, r.parent_labels) + ": expected " +
                                       std::to_string(n.domain.size()) + " probabilities"});
                    continue;
                }
                double sum = 0.0;
                bool in_range = true;
                for (double p : r.probabilities)
                {
                    if (!std::isfinite(p) || p < 0.0 || p > 1.0)
                        in_range = false;
                    sum += p;
                }
                if (!in_range)
                    out.push_back({ViolationCode::non_stochastic_row, n.id, r.parent_labels,
                                   "non-stochastic row " + describe_row(n.id, r.parent_labels) +
                                       ": probability outside [0,1]"});
                else if (std::abs(sum - 1.0) > kRowTolerance)
                    out.push_back({ViolationCode::non_stochastic_row, n.id, r.parent_labels,
                                   "non-stochastic row " + describe_row(n.id, r.parent_labels) + ": row sums to " +
                                       format_sum(sum)});
            }
            rows.finish();
        }
        else if (const auto* det = std::get_if<DetTable>(&n.payload))
        {
            RowChecker rows(n, pdoms, out);
            for (const auto& r : det->rows)
            {
                if (!rows.accept(r.parent_labels))
                    continue;
                if (!n.domain.index_of(r.label))
                    out.push_back({ViolationCode::bad_label, n.id, r.parent_labels,
                                   "output label '" + r.label + "' not in domain of " + n.id});
            }
            rows.finish();
        }
        else if (const auto* val = std::get_if<ValueSpec>(&n.payload))
        {
            if (val->form == ValueForm::table)
            {
                RowChecker rows(n, pdoms, out);
                for (const auto& r : val->rows)
                {
                    if (!rows.accept(r.parent_labels))
                        continue;
                    if (!std::isfinite(r.score))
                        out.push_back({ViolationCode::bad_value_spec, n.id, r.parent_labels,
                                       "non-finite score in " + describe_row(n.id, r.parent_labels)});
                }
                rows.finish();
            }
            else if (n.parents.size() != 1)
            {
                out.push_back({ViolationCode::bad_value_spec, n.id, {},
                               std::string(to_string(val->form)) + " value node " + n.id + " needs exactly one parent"});
            }
            else
            {
                const Domain& x = *pdoms.front();
                if (val->form == ValueForm::indicator)
                {
                    for (const auto& l : x.labels)
                    {
                        bool zero = std::count(val->zero_labels.begin(), val->zero_labels.end(), l) > 0;
                        bool one = std::count(val->one_labels.begin(), val->one_labels.end(), l) > 0;
                        if (zero == one)
                            out.push_back({ViolationCode::bad_value_spec, n.id, {},
                                           "indicator " + n.id + " must map label '" + l + "' to exactly one of 0/1"});
                    }
                    for (const auto* set : {&val->zero_labels, &val->one_labels})
                        for (const auto& l : *set)
                            if (!x.index_of(l))
                                out.push_back({ViolationCode::bad_label, n.id, {},
                                               "indicator " + n.id + " references unknown label '" + l + "'"});
                }
                else if (!x.has_tags())
                {
                    out.push_back({ViolationCode::bad_value_spec, n.id, {},
                                   std::string(to_string(val->form)) + " value node " + n.id +
                                       " needs a parent domain with numeric tags"});
                }
                else if (!(val->scale > 0.0) || !std::isfinite(val->scale))
                {
                    out.push_back({ViolationCode::bad_value_spec, n.id, {}, "scale of " + n.id + " must be positive"});
                }
                else if (val->form == ValueForm::linear && !std::isfinite(val->offset))
                {
                    out.push_back({ViolationCode::bad_value_spec, n.id, {}, "offset of " + n.id + " must be finite"});
                }
                else if (val->form == ValueForm::power_root)
                {
                    if (!(val->root > 0.0) || !std::isfinite(val->root))
                        out.push_back({ViolationCode::bad_value_spec, n.id, {}, "root of " + n.id + " must be positive"});
                    for (double t : x.numeric_tags)
                        if (t < 0.0)
                        {
                            out.push_back({ViolationCode::bad_value_spec, n.id, {},
                                           "power_root value node " + n.id + " needs non-negative inputs"});
                            break;
                        }
                }
            }
        }
        else if (const auto* util = std::get_if<UtilitySpec>(&n.payload))
        {
            double sum = 0.0;
            std::set<std::string> weighted;
            for (const auto& [node, w] : util->weights)
            {
                if (!weighted.insert(node).second)
                    out.push_back({ViolationCode::bad_utility, n.id, {}, "duplicate weight for " + node + " in " + n.id});
                if (std::find(n.parents.begin(), n.parents.end(), node) == n.parents.end())
                    out.push_back({ViolationCode::bad_utility, n.id, {},
                                   "weight for " + node + " which is not a parent of " + n.id});
                if (!std::isfinite(w) || w < 0.0 || w > 1.0)
                    out.push_back({ViolationCode::bad_utility, n.id, {}, "weight for " + node + " outside [0,1]"});
                sum += w;
            }
            for (const auto& p : n.parents)
                if (!weighted.count(p))
                    out.push_back({ViolationCode::bad_utility, n.id, {}, "missing weight for " + p + " in " + n.id});
            if (std::abs(sum - 1.0) > kRowTolerance)
                out.push_back({ViolationCode::bad_utility, n.id, {},
                               "utility weights of " + n.id + " sum to " + format_sum(sum)});
        }
    }

    // Acyclicity, over arcs between known nodes.
    std::map<std::string, std::vector<std::string>> children;
    std::map<std::string, std::size_t> indegree;
    for (const auto& [id, n] : nodes)
    {
        indegree[id];
        for (const auto& p : n->parents)
            if (nodes.count(p) && p != id)
            {
                children[p].push_back(id);
                ++indegree[id];
            }
            else if (p == id)
            {
                ++indegree[id];
            }
    }
    {
        auto deg = indegree;
        std::vector<std::string> ready;
        for (const auto& [id, d] : deg)
            if (d == 0)
                ready.push_back(id);
        std::size_t removed = 0;
        while (!ready.empty())
        {
            std::string cur = ready.back();
            ready.pop_back();
            ++removed;
            for (const auto& c : children[cur])
                if (--deg[c] == 0)
                    ready.push_back(c);
        }
        if (removed != deg.size())
        {
            std::vector<std::string> stuck;
            for (const auto& [id, d] : deg)
                if (d != 0)
                    stuck.push_back(id);
            out.push_back({ViolationCode::cycle, stuck.front(), {}, "cycle detected among " + join(stuck, ",")});
        }
    }

    // Temporal order of decisions.
    std::set<std::string> ordered_agents;
    std::map<std::string, std::string> decision_seen;
    for (const auto& order : spec.orders)
    {
        auto kind = agent_kind(order.agent);
        if (!kind)
        {
            out.push_back({ViolationCode::unknown_reference, "", {}, "unknown agent reference '" + order.agent + "' in order"});
            continue;
        }
        if (!ordered_agents.insert(order.agent).second)
            out.push_back({ViolationCode::duplicate_id, "", {}, "duplicate temporal order for agent " + order.agent});
        for (const auto& d : order.decisions)
        {
            auto it = nodes.find(d);
            if (it == nodes.end())
            {
                out.push_back({ViolationCode::unknown_reference, d, {}, "unknown decision reference '" + d + "' in order"});
                continue;
            }
            if (it->second->kind != NodeKind::decision || it->second->owner != order.agent)
            {
                out.push_back({ViolationCode::temporal_order, d, {},
                               "order of " + order.agent + " lists " + d + " which is not one of its decisions"});
                continue;
            }
            if (!decision_seen.emplace(d, order.agent).second)
                out.push_back({ViolationCode::duplicate_id, d, {}, "decision " + d + " listed twice in temporal order"});
        }
        for (std::size_t i = 0; i < order.decisions.size(); ++i)
        {
            auto it = nodes.find(order.decisions[i]);
            if (it == nodes.end())
                continue;
            std::set<std::string> later;
            for (std::size_t j = i; j < order.decisions.size(); ++j)
            {
                auto desc = descendants_or_self(order.decisions[j], children);
                later.insert(desc.begin(), desc.end());
            }
            for (const auto& p : it->second->parents)
                if (later.count(p))
                    out.push_back({ViolationCode::temporal_order, order.decisions[i], {},
                                   "information arc violates temporal order: " + p + " -> " + order.decisions[i]});
        }
    }
    for (const auto& n : spec.nodes)
        if (n.kind == NodeKind::decision && checked.count(&n) && !decision_seen.count(n.id))
            out.push_back({ViolationCode::temporal_order, n.id, {}, "decision " + n.id + " missing from temporal order"});

    return out;
}

std::vector<Violation> validate_diagram(const Diagram& diagram)
{
    return validate_diagram(diagram.spec());
}

std::vector<std::vector<std::string>> label_tuples(const std::vector<const Domain*>& domains)
{
    std::vector<std::vector<std::string>> out;
    std::size_t total = 1;
    for (const Domain* d : domains)
        total *= d->size();
    out.reserve(total);
    for (std::size_t c = 0; c < total; ++c)
    {
        std::vector<std::string> tuple(domains.size());
        std::size_t rest = c;
        for (std::size_t i = domains.size(); i-- > 0;)
        {
            tuple[i] = domains[i]->labels[rest % domains[i]->size()];
            rest /= domains[i]->size();
        }
        out.push_back(std::move(tuple));
    }
    return out;
}

Diagram build_diagram(DiagramSpec spec)
{
    auto violations = validate_diagram(spec);
    if (!violations.empty())
        throw InvalidDiagram(std::move(violations));

    Diagram d;
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < spec.nodes.size(); ++i)
        index.emplace(spec.nodes[i].id, i);

    d.nodes_.resize(spec.nodes.size());
    for (std::size_t i = 0; i < spec.nodes.size(); ++i)
    {
        NodeSpec& ns = spec.nodes[i];
        CompiledNode& cn = d.nodes_[i];
        cn.id = ns.id;
        cn.kind = ns.kind;
        cn.owner = ns.owner;
        cn.domain = ns.domain;
        for (const auto& p : ns.parents)
        {
            std::size_t pi = index.at(p);
            cn.parents.push_back(pi);
            cn.parent_cards.push_back(spec.nodes[pi].domain.size());
        }
    }
    for (std::size_t i = 0; i < d.nodes_.size(); ++i)
        for (auto p : d.nodes_[i].parents)
            d.nodes_[p].children.push_back(i);

    auto row_config = [&](const CompiledNode& cn, const std::vector<std::string>& labels) {
        std::size_t c = 0;
        for (std::size_t k = 0; k < labels.size(); ++k)
            c = c * cn.parent_cards[k] + *d.nodes_[cn.parents[k]].domain.index_of(labels[k]);
        return c;
    };
    auto parent_domains = [&](const CompiledNode& cn) {
        std::vector<const Domain*> doms;
        for (auto p : cn.parents)
            doms.push_back(&d.nodes_[p].domain);
        return doms;
    };

    // Dense tables; spec rows are rewritten in canonical order.
    for (std::size_t i = 0; i < spec.nodes.size(); ++i)
    {
        NodeSpec& ns = spec.nodes[i];
        CompiledNode& cn = d.nodes_[i];
        const std::size_t configs = cn.configurations();
        if (auto* cpt = std::get_if<Cpt>(&ns.payload))
        {
            const std::size_t card = cn.domain.size();
            cn.cpt.assign(configs * card, 0.0);
            for (const auto& r : cpt->rows)
                std::copy(r.probabilities.begin(), r.probabilities.end(),
                          cn.cpt.begin() + static_cast<std::ptrdiff_t>(row_config(cn, r.parent_labels) * card));
            auto tuples = label_tuples(parent_domains(cn));
            cpt->rows.clear();
            for (std::size_t c = 0; c < configs; ++c)
                cpt->rows.push_back({tuples[c], std::vector<double>(cn.cpt.begin() + static_cast<std::ptrdiff_t>(c * card),
                                                                    cn.cpt.begin() + static_cast<std::ptrdiff_t>((c + 1) * card))});
        }
        else if (auto* det = std::get_if<DetTable>(&ns.payload))
        {
            cn.det.assign(configs, 0);
            for (const auto& r : det->rows)
                cn.det[row_config(cn, r.parent_labels)] = *cn.domain.index_of(r.label);
            auto tuples = label_tuples(parent_domains(cn));
            det->rows.clear();
            for (std::size_t c = 0; c < configs; ++c)
                det->rows.push_back({tuples[c], cn.domain.labels[cn.det[c]]});
        }
        else if (auto* val = std::get_if<ValueSpec>(&ns.payload))
        {
            cn.scores.assign(configs, 0.0);
            if (val->form == ValueForm::table)
            {
                for (const auto& r : val->rows)
                    cn.scores[row_config(cn, r.parent_labels)] = r.score;
                auto tuples = label_tuples(parent_domains(cn));
                val->rows.clear();
                for (std::size_t c = 0; c < configs; ++c)
                    val->rows.push_back({tuples[c], cn.scores[c]});
            }
            else
            {
                const Domain& x = d.nodes_[cn.parents.front()].domain;
                for (std::size_t c = 0; c < configs; ++c)
                {
                    switch (val->form)
                    {
                    case ValueForm::linear:
                        cn.scores[c] = val->offset - x.numeric_tags[c] / val->scale;
                        break;
                    case ValueForm::power_root:
                        cn.scores[c] = std::pow(x.numeric_tags[c] / val->scale, 1.0 / val->root);
                        break;
                    case ValueForm::indicator:
                        cn.scores[c] = std::count(val->one_labels.begin(), val->one_labels.end(), x.labels[c]) ? 1.0 : 0.0;
                        break;
                    case ValueForm::table:
                        break;
                    }
                }
            }
            for (double s : cn.scores)
                if (!std::isfinite(s))
                    throw InvalidDiagram({{ViolationCode::bad_value_spec, cn.id, {}, "non-finite score emitted by " + cn.id}});
        }
        else if (auto* util = std::get_if<UtilitySpec>(&ns.payload))
        {
            for (const auto& [node, w] : util->weights)
                cn.weights.emplace_back(index.at(node), w);
        }
    }

    // Kahn's algorithm with a min-heap keyed by id.
    using Item = std::pair<std::string, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
    std::vector<std::size_t> deg(d.nodes_.size());
    for (std::size_t i = 0; i < d.nodes_.size(); ++i)
    {
        deg[i] = d.nodes_[i].parents.size();
        if (deg[i] == 0)
            ready.emplace(d.nodes_[i].id, i);
    }
    while (!ready.empty())
    {
        auto [id, i] = ready.top();
        ready.pop();
        d.topo_.push_back(i);
        for (auto c : d.nodes_[i].children)
            if (--deg[c] == 0)
                ready.emplace(d.nodes_[c].id, c);
    }

    d.spec_ = std::move(spec);
    return d;
}

std::optional<std::size_t> Diagram::find(std::string_view id) const
{
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].id == id)
            return i;
    return std::nullopt;
}

std::size_t Diagram::index_of(std::string_view id) const
{
    auto i = find(id);
    if (!i)
        throw Error("unknown node id '" + std::string(id) + "'");
    return *i;
}

const Agent* Diagram::find_agent(std::string_view id) const
{
    for (const auto& a : spec_.agents)
        if (a.id == id)
            return &a;
    return nullptr;
}

const Agent* Diagram::agent_of_kind(AgentKind kind) const
{
    const Agent* found = nullptr;
    for (const auto& a : spec_.agents)
    {
        if (a.kind != kind)
            continue;
        if (found)
            return nullptr;
        found = &a;
    }
    return found;
}

std::vector<std::size_t> Diagram::decisions_of(std::string_view agent) const
{
    std::vector<std::size_t> out;
    for (const auto& order : spec_.orders)
        if (order.agent == agent)
            for (const auto& d : order.decisions)
                out.push_back(index_of(d));
    return out;
}

std::size_t Diagram::utility_of(std::string_view agent) const
{
    std::optional<std::size_t> found;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
    {
        if (nodes_[i].kind != NodeKind::utility || nodes_[i].owner != agent)
            continue;
        if (found)
            throw Error("agent '" + std::string(agent) + "' owns more than one utility node");
        found = i;
    }
    if (!found)
        throw Error("agent '" + std::string(agent) + "' owns no utility node");
    return *found;
}

std::vector<std::string> topological_order(const Diagram& diagram)
{
    std::vector<std::string> out;
    for (auto i : diagram.topological_order())
        out.push_back(diagram.node(i).id);
    return out;
}

Diagram with_chance_node(const Diagram& diagram,
                         std::string_view node,
                         std::vector<std::string> parents,
                         const std::vector<std::vector<double>>& rows)
{
    DiagramSpec spec = diagram.spec();
    NodeSpec* ns = spec.find_node(node);
    if (!ns)
        throw Error("unknown node id '" + std::string(node) + "'");
    if (!ns->domain.size())
        throw Error("node '" + std::string(node) + "' has no domain");

    std::vector<const Domain*> doms;
    for (const auto& p : parents)
    {
        const NodeSpec* ps = spec.find_node(p);
        if (!ps)
            throw Error("unknown node id '" + p + "'");
        doms.push_back(&ps->domain);
    }
    auto tuples = label_tuples(doms);
    if (tuples.size() != rows.size())
        throw Error("expected " + std::to_string(tuples.size()) + " rows for chance node " + std::string(node));

    Cpt cpt;
    for (std::size_t i = 0; i < rows.size(); ++i)
        cpt.rows.push_back({tuples[i], rows[i]});

    if (ns->kind == NodeKind::decision)
        for (auto& order : spec.orders)
            std::erase(order.decisions, ns->id);
    ns->kind = NodeKind::chance;
    ns->owner.reset();
    ns->parents = std::move(parents);
    ns->payload = std::move(cpt);
    std::erase_if(spec.orders, [](const DecisionOrder& o) { return o.decisions.empty(); });
    return build_diagram(std::move(spec));
}

}  // namespace aramaid
