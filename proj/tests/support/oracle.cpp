#include "oracle.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracle
{

using namespace aramaid;

namespace
{

const NodeSpec& node(const DiagramSpec& s, const std::string& id)
{
    for (const auto& n : s.nodes)
        if (n.id == id)
            return n;
    throw std::logic_error("oracle: no node " + id);
}

std::vector<const NodeSpec*> domain_nodes_in_order(const DiagramSpec& s)
{
    std::vector<const NodeSpec*> out;
    std::map<std::string, bool> placed;
    bool progress = true;
    while (progress)
    {
        progress = false;
        for (const auto& n : s.nodes)
        {
            if (placed[n.id])
                continue;
            bool ready = true;
            for (const auto& p : n.parents)
                ready = ready && placed[p];
            if (!ready)
                continue;
            placed[n.id] = true;
            progress = true;
            if (n.kind != NodeKind::value && n.kind != NodeKind::utility)
                out.push_back(&n);
        }
    }
    return out;
}

std::vector<std::string> parent_labels(const NodeSpec& n, const Labels& at)
{
    std::vector<std::string> out;
    for (const auto& p : n.parents)
        out.push_back(at.at(p));
    return out;
}

std::size_t position(const std::vector<std::string>& v, const std::string& x)
{
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] == x)
            return i;
    throw std::logic_error("oracle: label " + x + " not found");
}

/// P(node = label | parents) at the assignment.
double conditional(const DiagramSpec& s, const NodeSpec& n, const std::string& label, const Labels& at, const Rules& rules)
{
    const auto key = parent_labels(n, at);
    switch (n.kind)
    {
    case NodeKind::chance:
        for (const auto& row : std::get<Cpt>(n.payload).rows)
            if (row.parent_labels == key)
                return row.probabilities[position(n.domain.labels, label)];
        throw std::logic_error("oracle: missing cpt row for " + n.id);
    case NodeKind::deterministic:
        for (const auto& row : std::get<DetTable>(n.payload).rows)
            if (row.parent_labels == key)
                return row.label == label ? 1.0 : 0.0;
        throw std::logic_error("oracle: missing det row for " + n.id);
    case NodeKind::decision: {
        auto it = rules.find(n.id);
        if (it == rules.end())
            return 1.0 / static_cast<double>(n.domain.labels.size());
        const auto& rule = it->second;
        if (rule.size() == 1)
            return rule.front() == label ? 1.0 : 0.0;
        std::size_t index = 0;
        for (std::size_t k = 0; k < n.parents.size(); ++k)
        {
            const auto& pd = node(s, n.parents[k]).domain.labels;
            index = index * pd.size() + position(pd, key[k]);
        }
        return rule.at(index) == label ? 1.0 : 0.0;
    }
    default:
        throw std::logic_error("oracle: no distribution for " + n.id);
    }
}

void walk(const DiagramSpec& s,
          const std::vector<const NodeSpec*>& order,
          std::size_t depth,
          Labels& at,
          double p,
          const Rules& rules,
          const Labels& evidence,
          const std::function<void(const Labels&, double)>& leaf)
{
    if (depth == order.size())
    {
        leaf(at, p);
        return;
    }
    const NodeSpec& n = *order[depth];
    auto ev = evidence.find(n.id);
    for (const auto& label : n.domain.labels)
    {
        if (ev != evidence.end() && ev->second != label)
            continue;
        at[n.id] = label;
        const double q = conditional(s, n, label, at, rules);
        if (q == 0.0)
            continue;
        walk(s, order, depth + 1, at, p * q, rules, evidence, leaf);
    }
    at.erase(n.id);
}

}  // namespace

double value_score(const DiagramSpec& s, const std::string& id, const Labels& at)
{
    const NodeSpec& n = node(s, id);
    const auto& v = std::get<ValueSpec>(n.payload);
    if (v.form == ValueForm::table)
    {
        const auto key = parent_labels(n, at);
        for (const auto& row : v.rows)
            if (row.parent_labels == key)
                return row.score;
        throw std::logic_error("oracle: missing value row for " + id);
    }
    const NodeSpec& parent = node(s, n.parents.front());
    const std::string& label = at.at(parent.id);
    if (v.form == ValueForm::indicator)
    {
        for (const auto& z : v.zero_labels)
            if (z == label)
                return 0.0;
        for (const auto& o : v.one_labels)
            if (o == label)
                return 1.0;
        throw std::logic_error("oracle: unmapped indicator label");
    }
    const double x = parent.domain.numeric_tags[position(parent.domain.labels, label)];
    if (v.form == ValueForm::linear)
        return v.offset - x / v.scale;
    return std::pow(x / v.scale, 1.0 / v.root);
}

double expected_utility(const DiagramSpec& s, const std::string& agent, const Rules& rules, const Labels& evidence)
{
    const NodeSpec* utility = nullptr;
    for (const auto& n : s.nodes)
        if (n.kind == NodeKind::utility && n.owner == agent)
            utility = &n;
    if (!utility)
        throw std::logic_error("oracle: no utility for " + agent);
    const auto& weights = std::get<UtilitySpec>(utility->payload).weights;

    double total = 0.0;
    double weighted = 0.0;
    Labels at;
    walk(s, domain_nodes_in_order(s), 0, at, 1.0, rules, evidence, [&](const Labels& full, double p) {
        double u = 0.0;
        for (const auto& [v, w] : weights)
            u += w * value_score(s, v, full);
        total += p;
        weighted += p * u;
    });
    if (!(total > 0.0))
        throw ImpossibleEvidence{};
    return weighted / total;
}

std::vector<double> marginal(const DiagramSpec& s, const Rules& rules, const Labels& evidence, const std::string& target)
{
    const auto& labels = node(s, target).domain.labels;
    std::vector<double> out(labels.size(), 0.0);
    Labels at;
    walk(s, domain_nodes_in_order(s), 0, at, 1.0, rules, evidence, [&](const Labels& full, double p) {
        out[position(labels, full.at(target))] += p;
    });
    double total = 0.0;
    for (double x : out)
        total += x;
    if (!(total > 0.0))
        throw ImpossibleEvidence{};
    for (double& x : out)
        x /= total;
    return out;
}

}  // namespace oracle
