#include "aramaid/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>

namespace aramaid
{

Policy& Policy::fix(std::string node, std::string alternative)
{
    rules_[std::move(node)] = {std::move(alternative)};
    return *this;
}

Policy& Policy::set_rule(std::string node, std::vector<std::string> choices)
{
    rules_[std::move(node)] = std::move(choices);
    return *this;
}

Policy& Policy::merge(const Policy& other)
{
    for (const auto& [node, rule] : other.rules_)
        rules_[node] = rule;
    return *this;
}

const std::vector<std::string>* Policy::rule(std::string_view node) const
{
    auto it = rules_.find(node);
    return it == rules_.end() ? nullptr : &it->second;
}

namespace
{

/// Dense table over a scope of variables, row-major with the last variable
/// varying fastest. `util`, when present, carries probability times utility
/// alongside `values`; products follow (a, ua)(b, ub) = (ab, a ub + ua b).
struct Factor
{
    std::vector<std::size_t> vars;
    std::vector<std::size_t> cards;
    std::vector<double> values;
    std::vector<double> util;

    bool contains(std::size_t v) const { return std::find(vars.begin(), vars.end(), v) != vars.end(); }
};

std::vector<std::size_t> strides_in(const Factor& f, const std::vector<std::size_t>& scope)
{
    std::vector<std::size_t> own(f.vars.size());
    std::size_t s = 1;
    for (std::size_t i = f.vars.size(); i-- > 0;)
    {
        own[i] = s;
        s *= f.cards[i];
    }
    std::vector<std::size_t> out(scope.size(), 0);
    for (std::size_t k = 0; k < scope.size(); ++k)
        for (std::size_t i = 0; i < f.vars.size(); ++i)
            if (f.vars[i] == scope[k])
                out[k] = own[i];
    return out;
}

/// Walks every assignment of `cards` in row-major order, calling
/// fn(position, offset_a, offset_b) with offsets tracked through strides.
template <typename Fn>
void odometer(const std::vector<std::size_t>& cards,
              const std::vector<std::size_t>& sa,
              const std::vector<std::size_t>& sb,
              Fn&& fn)
{
    std::size_t total = 1;
    for (auto c : cards)
        total *= c;
    std::vector<std::size_t> digit(cards.size(), 0);
    std::size_t a = 0;
    std::size_t b = 0;
    for (std::size_t pos = 0; pos < total; ++pos)
    {
        fn(pos, a, b);
        for (std::size_t k = cards.size(); k-- > 0;)
        {
            if (++digit[k] < cards[k])
            {
                a += sa[k];
                b += sb[k];
                break;
            }
            a -= sa[k] * (cards[k] - 1);
            b -= sb[k] * (cards[k] - 1);
            digit[k] = 0;
        }
    }
}

Factor multiply(const Factor& x, const Factor& y)
{
    Factor r;
    r.vars = x.vars;
    r.cards = x.cards;
    for (std::size_t i = 0; i < y.vars.size(); ++i)
        if (!x.contains(y.vars[i]))
        {
            r.vars.push_back(y.vars[i]);
            r.cards.push_back(y.cards[i]);
        }
    std::size_t total = 1;
    for (auto c : r.cards)
        total *= c;
    r.values.resize(total);
    auto sx = strides_in(x, r.vars);
    auto sy = strides_in(y, r.vars);
    if (x.util.empty() && y.util.empty())
    {
        odometer(r.cards, sx, sy, [&](std::size_t pos, std::size_t a, std::size_t b) {
            r.values[pos] = x.values[a] * y.values[b];
        });
        return r;
    }
    r.util.resize(total);
    odometer(r.cards, sx, sy, [&](std::size_t pos, std::size_t a, std::size_t b) {
        r.values[pos] = x.values[a] * y.values[b];
        double u = 0.0;
        if (!y.util.empty())
            u += x.values[a] * y.util[b];
        if (!x.util.empty())
            u += x.util[a] * y.values[b];
        r.util[pos] = u;
    });
    return r;
}

Factor sum_out(const Factor& f, std::size_t var)
{
    Factor r;
    for (std::size_t i = 0; i < f.vars.size(); ++i)
        if (f.vars[i] != var)
        {
            r.vars.push_back(f.vars[i]);
            r.cards.push_back(f.cards[i]);
        }
    std::size_t total = 1;
    for (auto c : r.cards)
        total *= c;
    r.values.assign(total, 0.0);
    auto into = strides_in(r, f.vars);
    std::vector<std::size_t> unused(f.vars.size(), 0);
    if (f.util.empty())
    {
        odometer(f.cards, into, unused, [&](std::size_t pos, std::size_t a, std::size_t) {
            r.values[a] += f.values[pos];
        });
        return r;
    }
    r.util.assign(total, 0.0);
    odometer(f.cards, into, unused, [&](std::size_t pos, std::size_t a, std::size_t) {
        r.values[a] += f.values[pos];
        r.util[a] += f.util[pos];
    });
    return r;
}

/// Policy and evidence resolved to indices and checked against the diagram.
struct Resolved
{
    std::vector<std::vector<std::size_t>> rules;           // per node; decisions only
    std::vector<std::optional<std::size_t>> evidence;      // per node
};

Resolved resolve(const Diagram& d, const Policy& policy, const Evidence& evidence)
{
    Resolved r;
    r.rules.resize(d.size());
    r.evidence.resize(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
    {
        const auto& n = d.node(i);
        if (n.kind != NodeKind::decision)
            continue;
        const auto* rule = policy.rule(n.id);
        if (!rule)
            throw InferenceError("policy has no rule for decision " + n.id);
        const std::size_t configs = n.configurations();
        if (rule->size() != 1 && rule->size() != configs)
            throw InferenceError("rule for decision " + n.id + " has " + std::to_string(rule->size()) +
                                 " entries, expected 1 or " + std::to_string(configs));
        auto& out = r.rules[i];
        out.resize(configs);
        for (std::size_t c = 0; c < configs; ++c)
        {
            const auto& label = rule->size() == 1 ? rule->front() : (*rule)[c];
            auto idx = n.domain.index_of(label);
            if (!idx)
                throw InferenceError("alternative '" + label + "' not in domain of decision " + n.id);
            out[c] = *idx;
        }
    }
    for (const auto& [id, label] : evidence)
    {
        auto i = d.find(id);
        if (!i)
            throw InferenceError("evidence on unknown node '" + id + "'");
        const auto& n = d.node(*i);
        if (n.kind != NodeKind::chance && n.kind != NodeKind::deterministic)
            throw InferenceError("evidence on " + std::string(to_string(n.kind)) + " node " + id);
        auto idx = n.domain.index_of(label);
        if (!idx)
            throw InferenceError("evidence label '" + label + "' not in domain of " + id);
        r.evidence[*i] = *idx;
    }
    return r;
}

/// Conditional factor P(node | parents), with decisions and deterministic
/// nodes as 0/1 indicators.
Factor node_factor(const Diagram& d, std::size_t i, const Resolved& r)
{
    const auto& n = d.node(i);
    Factor f;
    f.vars = n.parents;
    f.cards = n.parent_cards;
    f.vars.push_back(i);
    f.cards.push_back(n.domain.size());
    const std::size_t configs = n.configurations();
    const std::size_t card = n.domain.size();
    f.values.assign(configs * card, 0.0);
    for (std::size_t c = 0; c < configs; ++c)
    {
        switch (n.kind)
        {
        case NodeKind::chance:
            std::copy_n(n.cpt.begin() + static_cast<std::ptrdiff_t>(c * card), card,
                        f.values.begin() + static_cast<std::ptrdiff_t>(c * card));
            break;
        case NodeKind::deterministic:
            f.values[c * card + n.det[c]] = 1.0;
            break;
        case NodeKind::decision:
            f.values[c * card + r.rules[i][c]] = 1.0;
            break;
        default:
            break;
        }
    }
    return f;
}

Factor indicator(const Diagram& d, std::size_t i, std::size_t value)
{
    Factor f;
    f.vars = {i};
    f.cards = {d.node(i).domain.size()};
    f.values.assign(f.cards[0], 0.0);
    f.values[value] = 1.0;
    return f;
}

/// Utility as a single factor over the union of the value nodes' parents,
/// held in the utility channel with unit probability.
Factor utility_factor(const Diagram& d, std::size_t utility)
{
    const auto& u = d.node(utility);
    Factor f;
    for (const auto& [v, w] : u.weights)
        for (auto p : d.node(v).parents)
            if (!f.contains(p))
            {
                f.vars.push_back(p);
                f.cards.push_back(d.node(p).domain.size());
            }
    std::size_t total = 1;
    for (auto c : f.cards)
        total *= c;
    f.values.assign(total, 1.0);
    f.util.assign(total, 0.0);
    for (const auto& [v, w] : u.weights)
    {
        const auto& vn = d.node(v);
        Factor score;
        score.vars = vn.parents;
        score.cards = vn.parent_cards;
        score.values = vn.scores;
        auto s = strides_in(score, f.vars);
        std::vector<std::size_t> unused(f.vars.size(), 0);
        const double weight = w;
        odometer(f.cards, s, unused, [&](std::size_t pos, std::size_t a, std::size_t) {
            f.util[pos] += weight * score.values[a];
        });
    }
    return f;
}

std::vector<bool> ancestors_or_self(const Diagram& d, const std::vector<std::size_t>& seeds)
{
    std::vector<bool> in(d.size(), false);
    std::vector<std::size_t> stack(seeds.begin(), seeds.end());
    while (!stack.empty())
    {
        auto i = stack.back();
        stack.pop_back();
        if (in[i])
            continue;
        in[i] = true;
        for (auto p : d.node(i).parents)
            stack.push_back(p);
    }
    return in;
}

/// Eliminates every variable in `relevant` except `keep` (if any). Variables
/// are taken in reverse topological order: a variable becomes eligible once
/// all its children are gone, and eligible variables are ordered by minimum
/// interaction degree, then by id.
Factor eliminate(const Diagram& d,
                 std::vector<Factor> factors,
                 const std::vector<bool>& relevant,
                 std::optional<std::size_t> keep)
{
    std::vector<bool> pending(d.size(), false);
    std::size_t remaining = 0;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (relevant[i] && d.node(i).has_domain() && i != keep)
        {
            pending[i] = true;
            ++remaining;
        }

    std::vector<std::size_t> seen(d.size(), 0);
    std::size_t stamp = 0;
    while (remaining > 0)
    {
        std::optional<std::size_t> best;
        std::size_t best_degree = std::numeric_limits<std::size_t>::max();
        for (std::size_t v = 0; v < d.size(); ++v)
        {
            if (!pending[v])
                continue;
            const auto& children = d.node(v).children;
            if (std::any_of(children.begin(), children.end(), [&](std::size_t c) { return pending[c]; }))
                continue;
            ++stamp;
            std::size_t degree = 0;
            for (const auto& f : factors)
                if (f.contains(v))
                    for (auto w : f.vars)
                        if (w != v && seen[w] != stamp)
                        {
                            seen[w] = stamp;
                            ++degree;
                        }
            if (!best || degree < best_degree || (degree == best_degree && d.node(v).id < d.node(*best).id))
            {
                best = v;
                best_degree = degree;
            }
        }
        const std::size_t v = *best;
        pending[v] = false;
        --remaining;

        std::optional<Factor> product;
        std::vector<Factor> rest;
        rest.reserve(factors.size());
        for (auto& f : factors)
        {
            if (!f.contains(v))
            {
                rest.push_back(std::move(f));
                continue;
            }
            product = product ? multiply(*product, f) : std::move(f);
        }
        if (product)
            rest.push_back(sum_out(*product, v));
        factors = std::move(rest);
    }

    Factor result;
    result.values = {1.0};
    for (const auto& f : factors)
        result = multiply(result, f);
    return result;
}

/// Known value of every node fixed by evidence or by a constant decision rule.
std::vector<std::optional<std::size_t>> known_values(const Diagram& d, const Resolved& r)
{
    std::vector<std::optional<std::size_t>> known = r.evidence;
    for (std::size_t i = 0; i < d.size(); ++i)
    {
        const auto& rule = r.rules[i];
        if (d.node(i).kind != NodeKind::decision || rule.empty())
            continue;
        if (std::all_of(rule.begin(), rule.end(), [&](std::size_t v) { return v == rule.front(); }))
            known[i] = rule.front();
    }
    return known;
}

/// Slice of `f` at the known values of its variables.
Factor restrict(const Factor& f, const std::vector<std::optional<std::size_t>>& known)
{
    if (std::none_of(f.vars.begin(), f.vars.end(), [&](std::size_t v) { return known[v].has_value(); }))
        return f;
    Factor r;
    std::vector<std::size_t> own(f.vars.size());
    std::size_t s = 1;
    for (std::size_t i = f.vars.size(); i-- > 0;)
    {
        own[i] = s;
        s *= f.cards[i];
    }
    std::size_t base = 0;
    std::vector<std::size_t> strides;
    for (std::size_t i = 0; i < f.vars.size(); ++i)
    {
        if (known[f.vars[i]])
        {
            base += own[i] * *known[f.vars[i]];
            continue;
        }
        r.vars.push_back(f.vars[i]);
        r.cards.push_back(f.cards[i]);
        strides.push_back(own[i]);
    }
    std::size_t total = 1;
    for (auto c : r.cards)
        total *= c;
    r.values.resize(total);
    if (!f.util.empty())
        r.util.resize(total);
    std::vector<std::size_t> unused(strides.size(), 0);
    odometer(r.cards, strides, unused, [&](std::size_t pos, std::size_t a, std::size_t) {
        r.values[pos] = f.values[base + a];
        if (!f.util.empty())
            r.util[pos] = f.util[base + a];
    });
    return r;
}

/// Factors of the relevant nodes, sliced at known values. Constant decisions
/// contribute nothing after slicing. The `keep` node is never sliced; its
/// evidence, if any, enters as an indicator.
std::vector<Factor> relevant_factors(const Diagram& d,
                                     const Resolved& r,
                                     const std::vector<bool>& relevant,
                                     std::vector<std::optional<std::size_t>>& known,
                                     std::optional<std::size_t> keep = std::nullopt)
{
    known = known_values(d, r);
    std::optional<std::size_t> keep_value;
    if (keep)
    {
        keep_value = known[*keep];
        known[*keep].reset();
    }
    std::vector<Factor> factors;
    for (std::size_t i = 0; i < d.size(); ++i)
    {
        if (!relevant[i] || !d.node(i).has_domain())
            continue;
        if (d.node(i).kind == NodeKind::decision && known[i])
            continue;
        factors.push_back(restrict(node_factor(d, i, r), known));
    }
    if (keep_value)
        factors.push_back(indicator(d, *keep, *keep_value));
    return factors;
}

/// Keeps the factors connected (through shared variables) to `anchor`. Every
/// other component multiplies numerator and denominator alike and cancels;
/// it is only checked for positive mass.
std::vector<Factor> anchored_component(const Diagram& d, std::vector<Factor> factors, std::size_t anchor)
{
    const std::size_t n = factors.size();
    std::vector<std::size_t> group(n);
    for (std::size_t i = 0; i < n; ++i)
        group[i] = i;
    auto find = [&](std::size_t i) {
        while (group[i] != i)
            i = group[i] = group[group[i]];
        return i;
    };
    std::vector<std::optional<std::size_t>> owner(d.size());
    for (std::size_t i = 0; i < n; ++i)
        for (auto v : factors[i].vars)
        {
            if (owner[v])
                group[find(i)] = find(*owner[v]);
            else
                owner[v] = i;
        }

    const std::size_t root = find(anchor);
    std::vector<Factor> kept;
    std::map<std::size_t, std::vector<Factor>> others;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (find(i) == root)
            kept.push_back(std::move(factors[i]));
        else
            others[find(i)].push_back(std::move(factors[i]));
    }
    for (auto& [g, fs] : others)
    {
        std::vector<bool> vars(d.size(), false);
        for (const auto& f : fs)
            for (auto v : f.vars)
                vars[v] = true;
        if (!(eliminate(d, std::move(fs), vars, std::nullopt).values.front() > 0.0))
            throw ImpossibleEvidence();
    }
    return kept;
}

std::vector<std::size_t> evidence_nodes(const Resolved& r)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < r.evidence.size(); ++i)
        if (r.evidence[i])
            out.push_back(i);
    return out;
}

/// Depth-first enumeration over every node with a domain, in topological
/// order. Calls leaf(values, probability) for each assignment of positive
/// probability consistent with the evidence.
template <typename Leaf>
void enumerate(const Diagram& d, const Resolved& r, Leaf&& leaf)
{
    std::vector<std::size_t> order;
    for (auto i : d.topological_order())
        if (d.node(i).has_domain())
            order.push_back(i);
    std::vector<std::size_t> values(d.size(), 0);
    std::vector<std::size_t> parent_values;

    auto recurse = [&](auto&& self, std::size_t depth, double p) -> void {
        if (depth == order.size())
        {
            leaf(values, p);
            return;
        }
        const std::size_t i = order[depth];
        const auto& n = d.node(i);
        std::size_t config = 0;
        for (std::size_t k = 0; k < n.parents.size(); ++k)
            config = config * n.parent_cards[k] + values[n.parents[k]];
        const auto& ev = r.evidence[i];
        auto visit = [&](std::size_t value, double q) {
            if (q == 0.0 || (ev && *ev != value))
                return;
            values[i] = value;
            self(self, depth + 1, p * q);
        };
        switch (n.kind)
        {
        case NodeKind::chance:
            for (std::size_t v = 0; v < n.domain.size(); ++v)
                visit(v, n.cpt[config * n.domain.size() + v]);
            break;
        case NodeKind::deterministic:
            visit(n.det[config], 1.0);
            break;
        case NodeKind::decision:
            visit(r.rules[i][config], 1.0);
            break;
        default:
            break;
        }
    };
    recurse(recurse, 0, 1.0);
}

double utility_at(const Diagram& d, std::size_t utility, const std::vector<std::size_t>& values)
{
    double u = 0.0;
    for (const auto& [v, w] : d.node(utility).weights)
    {
        const auto& vn = d.node(v);
        std::size_t config = 0;
        for (std::size_t k = 0; k < vn.parents.size(); ++k)
            config = config * vn.parent_cards[k] + values[vn.parents[k]];
        u += w * vn.scores[config];
    }
    return u;
}

}  // namespace

double joint_probability(const Diagram& d, const Policy& policy, const Assignment& assignment)
{
    Resolved r = resolve(d, policy, {});
    std::vector<std::size_t> values(d.size(), 0);
    for (std::size_t i = 0; i < d.size(); ++i)
    {
        const auto& n = d.node(i);
        if (!n.has_domain())
            continue;
        auto it = assignment.find(n.id);
        if (it == assignment.end())
            throw InferenceError("incomplete assignment: no value for " + n.id);
        auto idx = n.domain.index_of(it->second);
        if (!idx)
            throw InferenceError("assignment label '" + it->second + "' not in domain of " + n.id);
        values[i] = *idx;
    }
    double p = 1.0;
    for (std::size_t i = 0; i < d.size(); ++i)
    {
        const auto& n = d.node(i);
        if (!n.has_domain())
            continue;
        std::size_t config = 0;
        for (std::size_t k = 0; k < n.parents.size(); ++k)
            config = config * n.parent_cards[k] + values[n.parents[k]];
        switch (n.kind)
        {
        case NodeKind::chance:
            p *= n.cpt[config * n.domain.size() + values[i]];
            break;
        case NodeKind::deterministic:
            if (n.det[config] != values[i])
                return 0.0;
            break;
        case NodeKind::decision:
            if (r.rules[i][config] != values[i])
                return 0.0;
            break;
        default:
            break;
        }
    }
    return p;
}

std::vector<double> marginal_distribution(const Diagram& d,
                                          const Policy& policy,
                                          const Evidence& evidence,
                                          std::string_view target,
                                          Engine engine)
{
    const std::size_t t = d.index_of(target);
    if (!d.node(t).has_domain())
        throw InferenceError("node " + std::string(target) + " has no domain");
    Resolved r = resolve(d, policy, evidence);
    std::vector<double> dist(d.node(t).domain.size(), 0.0);

    if (engine == Engine::enumeration)
    {
        enumerate(d, r, [&](const std::vector<std::size_t>& values, double p) { dist[values[t]] += p; });
    }
    else
    {
        auto seeds = evidence_nodes(r);
        seeds.push_back(t);
        auto relevant = ancestors_or_self(d, seeds);
        std::vector<std::optional<std::size_t>> known;
        auto factors = relevant_factors(d, r, relevant, known, t);
        for (std::size_t i = 0; i < d.size(); ++i)
            if (known[i])
                relevant[i] = false;
        std::size_t anchor = 0;
        while (!factors[anchor].contains(t))
            ++anchor;
        factors = anchored_component(d, std::move(factors), anchor);
        Factor f = eliminate(d, std::move(factors), relevant, t);
        dist = f.values;
    }

    double total = 0.0;
    for (double p : dist)
        total += p;
    if (!(total > 0.0))
        throw ImpossibleEvidence();
    for (double& p : dist)
        p /= total;
    return dist;
}

double expected_utility(const Diagram& d,
                        std::string_view agent,
                        const Policy& policy,
                        const Evidence& evidence,
                        Engine engine)
{
    const std::size_t u = d.utility_of(agent);
    Resolved r = resolve(d, policy, evidence);

    double weighted = 0.0;
    double total = 0.0;
    if (engine == Engine::enumeration)
    {
        enumerate(d, r, [&](const std::vector<std::size_t>& values, double p) {
            total += p;
            weighted += p * utility_at(d, u, values);
        });
    }
    else
    {
        auto seeds = evidence_nodes(r);
        for (const auto& [v, w] : d.node(u).weights)
            for (auto p : d.node(v).parents)
                seeds.push_back(p);
        auto relevant = ancestors_or_self(d, seeds);
        std::vector<std::optional<std::size_t>> known;
        auto factors = relevant_factors(d, r, relevant, known);
        for (std::size_t i = 0; i < d.size(); ++i)
            if (known[i])
                relevant[i] = false;
        factors.push_back(restrict(utility_factor(d, u), known));
        factors = anchored_component(d, std::move(factors), factors.size() - 1);
        const Factor result = eliminate(d, std::move(factors), relevant, std::nullopt);
        total = result.values.front();
        weighted = result.util.empty() ? 0.0 : result.util.front();
    }
    if (!(total > 0.0))
        throw ImpossibleEvidence();
    return weighted / total;
}

std::vector<std::string> EuTable::labels_of(std::size_t cell) const
{
    std::vector<std::string> out(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;)
    {
        out[k] = axes[k].labels[cell % axes[k].labels.size()];
        cell /= axes[k].labels.size();
    }
    return out;
}

std::size_t EuTable::cell_index(const std::vector<std::string>& labels) const
{
    if (labels.size() != axes.size())
        throw Error("expected " + std::to_string(axes.size()) + " labels");
    std::size_t idx = 0;
    for (std::size_t k = 0; k < axes.size(); ++k)
    {
        const auto& l = axes[k].labels;
        auto it = std::find(l.begin(), l.end(), labels[k]);
        if (it == l.end())
            throw Error("label '" + labels[k] + "' not on axis " + axes[k].node);
        idx = idx * l.size() + static_cast<std::size_t>(it - l.begin());
    }
    return idx;
}

EuTable decision_table(const Diagram& d,
                       std::string_view agent,
                       const std::vector<std::string>& axes,
                       const Policy& fixed,
                       Engine engine)
{
    if (!d.find_agent(agent))
        throw InferenceError("unknown agent '" + std::string(agent) + "'");

    EuTable table;
    table.agent = agent;
    std::set<std::string, std::less<>> on_axes;
    for (const auto& id : axes)
    {
        const auto& n = d.node(d.index_of(id));
        if (!n.has_domain())
            throw InferenceError("axis " + id + " is a " + std::string(to_string(n.kind)) + " node");
        if (!on_axes.insert(id).second)
            throw InferenceError("axis " + id + " listed twice");
        table.axes.push_back({id, n.domain.labels, n.kind == NodeKind::decision && n.owner == agent});
    }

    // Unfixed decisions of other agents become uniform chance nodes.
    Diagram model = d;
    for (std::size_t i = 0; i < d.size(); ++i)
    {
        const auto& n = d.node(i);
        if (n.kind != NodeKind::decision || on_axes.count(n.id) || fixed.contains(n.id))
            continue;
        if (n.owner == agent)
            throw InferenceError("decision " + n.id + " of " + std::string(agent) + " is neither an axis nor fixed");
        std::vector<double> uniform(n.domain.size(), 1.0 / static_cast<double>(n.domain.size()));
        model = with_chance_node(model, n.id, {}, {uniform});
    }

    std::size_t cells = 1;
    for (const auto& a : table.axes)
        cells *= a.labels.size();
    table.cells.resize(cells);
    for (std::size_t c = 0; c < cells; ++c)
    {
        auto labels = table.labels_of(c);
        Policy policy = fixed;
        Evidence evidence;
        for (std::size_t k = 0; k < table.axes.size(); ++k)
        {
            const auto& n = model.node(model.index_of(table.axes[k].node));
            if (n.kind == NodeKind::decision)
                policy.fix(n.id, labels[k]);
            else
                evidence[n.id] = labels[k];
        }
        table.cells[c] = expected_utility(model, agent, policy, evidence, engine);
    }

    // Group key: the cell with own-decision axes zeroed out.
    table.is_max.assign(cells, false);
    std::vector<std::size_t> group(cells);
    std::vector<std::size_t> stride(table.axes.size());
    {
        std::size_t s = 1;
        for (std::size_t k = table.axes.size(); k-- > 0;)
        {
            stride[k] = s;
            s *= table.axes[k].labels.size();
        }
    }
    for (std::size_t c = 0; c < cells; ++c)
    {
        std::size_t key = c;
        for (std::size_t k = 0; k < table.axes.size(); ++k)
            if (table.axes[k].own_decision)
                key -= ((c / stride[k]) % table.axes[k].labels.size()) * stride[k];
        group[c] = key;
    }
    std::vector<double> best(cells, -std::numeric_limits<double>::infinity());
    for (std::size_t c = 0; c < cells; ++c)
        best[group[c]] = std::max(best[group[c]], table.cells[c]);
    for (std::size_t c = 0; c < cells; ++c)
        table.is_max[c] = table.cells[c] >= best[group[c]] - kTieTolerance;
    return table;
}

}  // namespace aramaid
