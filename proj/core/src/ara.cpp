#include "aramaid/ara.hpp"

#include "aramaid/number.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace aramaid
{

std::string_view to_string(QuantityKind kind)
{
    switch (kind)
    {
    case QuantityKind::belief:
        return "belief";
    case QuantityKind::cpt_row:
        return "cpt";
    case QuantityKind::utility_weights:
        return "weights";
    case QuantityKind::value_scale:
        return "scale";
    case QuantityKind::value_root:
        return "root";
    case QuantityKind::value_offset:
        return "offset";
    }
    return "?";
}

bool ParameterUncertainty::all_point() const
{
    return std::all_of(quantities.begin(), quantities.end(),
                       [](const UncertainQuantity& q) { return std::holds_alternative<PointRule>(q.rule); });
}

double AttackForecast::probability(const std::vector<std::string>& context, std::string_view alternative) const
{
    auto c = std::find(contexts.begin(), contexts.end(), context);
    if (c == contexts.end())
        throw ForecastError("context missing from forecast");
    auto a = std::find(alternatives.begin(), alternatives.end(), alternative);
    if (a == alternatives.end())
        throw ForecastError("unknown alternative '" + std::string(alternative) + "'");
    return probabilities[static_cast<std::size_t>(c - contexts.begin())][static_cast<std::size_t>(a - alternatives.begin())];
}

std::string AttackForecast::to_csv() const
{
    std::ostringstream os;
    os << "decision," << decision << "\n";
    os << "draws," << draws << "\n";
    os << "seed," << seed << "\n";
    for (const auto& n : context_nodes)
        os << n << ",";
    for (std::size_t a = 0; a < alternatives.size(); ++a)
        os << alternatives[a] << (a + 1 < alternatives.size() ? "," : "\n");
    for (std::size_t c = 0; c < contexts.size(); ++c)
    {
        for (const auto& l : contexts[c])
            os << l << ",";
        for (std::size_t a = 0; a < alternatives.size(); ++a)
            os << format_number(probabilities[c][a]) << (a + 1 < alternatives.size() ? "," : "\n");
    }
    return os.str();
}

Diagram attacker_view(const Diagram& d, const AttackerBeliefs& beliefs, const std::vector<std::string>& observed)
{
    std::set<std::string, std::less<>> defender_decisions;
    for (const auto& n : d.nodes())
    {
        if (n.kind != NodeKind::decision || !n.owner)
            continue;
        const Agent* owner = d.find_agent(*n.owner);
        if (owner && owner->kind == AgentKind::defender)
            defender_decisions.insert(n.id);
    }

    std::set<std::string, std::less<>> seen;
    for (const auto& id : observed)
    {
        if (!defender_decisions.count(id))
            throw ForecastError("observed node " + id + " is not a defender decision");
        if (beliefs.distributions.count(id))
            throw ForecastError("decision " + id + " is both observed and belief-distributed");
        seen.insert(id);
    }
    for (const auto& [id, dist] : beliefs.distributions)
    {
        if (!defender_decisions.count(id))
            throw ForecastError("belief on " + id + " which is not a defender decision");
        seen.insert(id);
    }
    for (const auto& id : defender_decisions)
        if (!seen.count(id))
            throw ForecastError("missing belief for unobserved defender decision " + id);

    Diagram view = d;
    for (const auto& [id, dist] : beliefs.distributions)
    {
        const auto& n = view.node(view.index_of(id));
        if (dist.size() != n.domain.size())
            throw ForecastError("belief on " + id + " needs " + std::to_string(n.domain.size()) + " probabilities");
        view = with_chance_node(view, id, {}, {dist});
    }
    return view;
}

BestResponse best_response(const Diagram& view, std::string_view agent, const Assignment& context, Engine engine)
{
    auto own = view.decisions_of(agent);
    if (own.size() != 1)
        throw ForecastError("agent " + std::string(agent) + " must have exactly one free decision, found " +
                            std::to_string(own.size()));
    const auto& decision = view.node(own.front());

    Policy base;
    Evidence evidence;
    for (const auto& [id, label] : context)
    {
        const auto& n = view.node(view.index_of(id));
        if (n.kind == NodeKind::decision)
        {
            if (n.owner == agent)
                throw ForecastError("context fixes the agent's own decision " + id);
            base.fix(id, label);
        }
        else
        {
            evidence[id] = label;
        }
    }

    BestResponse out;
    out.decision = decision.id;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& alt : decision.domain.labels)
    {
        Policy policy = base;
        policy.fix(decision.id, alt);
        double eu = expected_utility(view, agent, policy, evidence, engine);
        out.utilities.emplace_back(alt, eu);
        best = std::max(best, eu);
    }
    for (const auto& [alt, eu] : out.utilities)
        if (eu >= best - kTieTolerance)
            out.optimal.push_back(alt);
    return out;
}

namespace
{

const ValueSpec& value_spec_of(const DiagramSpec& spec, const std::string& node)
{
    const NodeSpec* n = spec.find_node(node);
    if (!n || !std::holds_alternative<ValueSpec>(n->payload))
        throw SamplingError("node " + node + " is not a value node");
    return std::get<ValueSpec>(n->payload);
}

const CptRow* find_row(const NodeSpec& n, const std::vector<std::string>& row)
{
    auto* cpt = std::get_if<Cpt>(&n.payload);
    if (!cpt)
        return nullptr;
    for (const auto& r : cpt->rows)
        if (r.parent_labels == row)
            return &r;
    return nullptr;
}

CptRow* find_row(NodeSpec& n, const std::vector<std::string>& row)
{
    auto* cpt = std::get_if<Cpt>(&n.payload);
    if (!cpt)
        return nullptr;
    for (auto& r : cpt->rows)
        if (r.parent_labels == row)
            return &r;
    return nullptr;
}

/// Number of components a quantity draws.
std::size_t arity(const DiagramSpec& spec, const UncertainQuantity& q)
{
    const NodeSpec* n = spec.find_node(q.node);
    if (!n)
        throw SamplingError("uncertain quantity references unknown node " + q.node);
    switch (q.kind)
    {
    case QuantityKind::belief:
        if (n->kind != NodeKind::chance || !n->parents.empty())
            throw SamplingError("belief on " + q.node + " requires a belief-distributed decision");
        return n->domain.size();
    case QuantityKind::cpt_row: {
        if (!find_row(*n, q.row))
            throw SamplingError("no row (" + q.node + " | " + [&] {
                std::string s;
                for (const auto& l : q.row)
                    s += (s.empty() ? "" : ",") + l;
                return s;
            }() + ") to sample");
        return n->domain.size();
    }
    case QuantityKind::utility_weights:
        if (!std::holds_alternative<UtilitySpec>(n->payload))
            throw SamplingError("node " + q.node + " is not a utility node");
        return std::get<UtilitySpec>(n->payload).weights.size();
    case QuantityKind::value_scale: {
        auto form = value_spec_of(spec, q.node).form;
        if (form != ValueForm::linear && form != ValueForm::power_root)
            throw SamplingError("value node " + q.node + " has no scale");
        return 1;
    }
    case QuantityKind::value_root:
        if (value_spec_of(spec, q.node).form != ValueForm::power_root)
            throw SamplingError("value node " + q.node + " has no root");
        return 1;
    case QuantityKind::value_offset:
        if (value_spec_of(spec, q.node).form != ValueForm::linear)
            throw SamplingError("value node " + q.node + " has no offset");
        return 1;
    }
    return 0;
}

bool is_scalar(QuantityKind kind)
{
    return kind == QuantityKind::value_scale || kind == QuantityKind::value_root || kind == QuantityKind::value_offset;
}

std::vector<double> dirichlet(std::mt19937_64& rng, const std::vector<double>& alpha)
{
    std::vector<double> out(alpha.size());
    for (int attempt = 0; attempt < 64; ++attempt)
    {
        double sum = 0.0;
        for (std::size_t i = 0; i < alpha.size(); ++i)
        {
            std::gamma_distribution<double> gamma(alpha[i], 1.0);
            out[i] = gamma(rng);
            sum += out[i];
        }
        if (sum > 0.0 && std::isfinite(sum))
        {
            for (double& x : out)
                x /= sum;
            return out;
        }
    }
    throw SamplingError("dirichlet draw underflowed");
}

}  // namespace

void check_uncertainty(const DiagramSpec& spec, const ParameterUncertainty& uncertainty)
{
    for (const auto& q : uncertainty.quantities)
    {
        const std::size_t n = arity(spec, q);
        if (const auto* dir = std::get_if<DirichletRule>(&q.rule))
        {
            if (is_scalar(q.kind))
                throw SamplingError("dirichlet rule on scalar " + std::string(to_string(q.kind)) + " of " + q.node);
            if (dir->concentration.size() != n)
                throw SamplingError("dirichlet rule on " + q.node + " needs " + std::to_string(n) + " concentrations");
            for (double a : dir->concentration)
                if (!(a > 0.0) || !std::isfinite(a))
                    throw SamplingError("dirichlet concentration must be positive");
        }
        else if (const auto* uni = std::get_if<UniformRule>(&q.rule))
        {
            if (q.kind == QuantityKind::belief || q.kind == QuantityKind::cpt_row)
                throw SamplingError("uniform rule on probability row of " + q.node + "; use dirichlet");
            if (!std::isfinite(uni->low) || !std::isfinite(uni->high) || uni->low > uni->high)
                throw SamplingError("uniform interval of " + q.node + " is empty");
            if ((q.kind == QuantityKind::value_scale || q.kind == QuantityKind::value_root) && !(uni->low > 0.0))
                throw SamplingError(std::string(to_string(q.kind)) + " interval of " + q.node + " must be positive");
        }
    }
}

DiagramSpec sample_parameters(const DiagramSpec& spec,
                              const ParameterUncertainty& uncertainty,
                              std::uint64_t seed,
                              std::uint64_t draw)
{
    DiagramSpec out = spec;
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(draw), static_cast<std::uint32_t>(draw >> 32)};
    std::mt19937_64 rng(seq);

    for (const auto& q : uncertainty.quantities)
    {
        if (std::holds_alternative<PointRule>(q.rule))
            continue;
        NodeSpec& n = *out.find_node(q.node);
        switch (q.kind)
        {
        case QuantityKind::belief:
        case QuantityKind::cpt_row: {
            const auto& alpha = std::get<DirichletRule>(q.rule).concentration;
            CptRow* row = q.kind == QuantityKind::belief ? &std::get<Cpt>(n.payload).rows.front() : find_row(n, q.row);
            row->probabilities = dirichlet(rng, alpha);
            break;
        }
        case QuantityKind::utility_weights: {
            auto& weights = std::get<UtilitySpec>(n.payload).weights;
            if (const auto* dir = std::get_if<DirichletRule>(&q.rule))
            {
                auto w = dirichlet(rng, dir->concentration);
                for (std::size_t i = 0; i < weights.size(); ++i)
                    weights[i].second = w[i];
            }
            else
            {
                const auto& uni = std::get<UniformRule>(q.rule);
                std::uniform_real_distribution<double> jitter(uni.low, uni.high);
                std::vector<double> w(weights.size());
                double sum = 0.0;
                for (std::size_t i = 0; i < weights.size(); ++i)
                {
                    w[i] = std::clamp(weights[i].second + jitter(rng), 0.0, 1.0);
                    sum += w[i];
                }
                if (sum > 0.0)
                    for (std::size_t i = 0; i < weights.size(); ++i)
                        weights[i].second = w[i] / sum;
            }
            break;
        }
        case QuantityKind::value_scale:
        case QuantityKind::value_root:
        case QuantityKind::value_offset: {
            const auto& uni = std::get<UniformRule>(q.rule);
            std::uniform_real_distribution<double> dist(uni.low, uni.high);
            const double x = uni.low == uni.high ? uni.low : dist(rng);
            auto& v = std::get<ValueSpec>(n.payload);
            if (q.kind == QuantityKind::value_scale)
                v.scale = x;
            else if (q.kind == QuantityKind::value_root)
                v.root = x;
            else
                v.offset = x;
            break;
        }
        }
    }
    return out;
}

AttackForecast forecast_attack(const Diagram& d,
                               const AttackerBeliefs& beliefs,
                               const ParameterUncertainty& uncertainty,
                               std::uint64_t draws,
                               std::uint64_t seed,
                               const ForecastOptions& options)
{
    if (draws == 0)
        throw ForecastError("draws must be positive");
    const Agent* attacker = d.agent_of_kind(AgentKind::attacker);
    const Agent* defender = d.agent_of_kind(AgentKind::defender);
    if (!attacker || !defender)
        throw ForecastError("forecast needs exactly one attacker and one defender agent");

    std::vector<std::string> observed;
    for (auto i : d.decisions_of(defender->id))
        if (!beliefs.distributions.count(d.node(i).id))
            observed.push_back(d.node(i).id);
    const Diagram view = attacker_view(d, beliefs, observed);
    check_uncertainty(view.spec(), uncertainty);

    auto own = view.decisions_of(attacker->id);
    if (own.size() != 1)
        throw ForecastError("attacker must have exactly one decision");
    const auto& decision = view.node(own.front());

    AttackForecast fc;
    fc.decision = decision.id;
    fc.alternatives = decision.domain.labels;
    fc.draws = draws;
    fc.seed = seed;
    std::vector<const Domain*> doms;
    for (auto p : decision.parents)
    {
        fc.context_nodes.push_back(view.node(p).id);
        doms.push_back(&view.node(p).domain);
    }
    fc.contexts = label_tuples(doms);
    for (auto p : decision.parents)
    {
        const auto& pn = view.node(p);
        if (pn.kind == NodeKind::decision)
            continue;
        // Contexts fixed by chance nodes are evidence; they must be possible.
        if (pn.kind != NodeKind::chance && pn.kind != NodeKind::deterministic)
            throw ForecastError("unsupported context node " + pn.id);
    }

    const std::size_t n_ctx = fc.contexts.size();
    const std::size_t n_alt = fc.alternatives.size();

    // shares[draw][context][alternative]
    auto solve_draw = [&](const Diagram& model) {
        std::vector<std::vector<double>> shares(n_ctx, std::vector<double>(n_alt, 0.0));
        for (std::size_t c = 0; c < n_ctx; ++c)
        {
            Assignment context;
            for (std::size_t k = 0; k < fc.context_nodes.size(); ++k)
                context[fc.context_nodes[k]] = fc.contexts[c][k];
            auto br = best_response(model, attacker->id, context, options.engine);
            const double share = 1.0 / static_cast<double>(br.optimal.size());
            for (const auto& alt : br.optimal)
            {
                auto a = static_cast<std::size_t>(std::find(fc.alternatives.begin(), fc.alternatives.end(), alt) -
                                                  fc.alternatives.begin());
                shares[c][a] = share;
            }
        }
        return shares;
    };

    std::vector<std::vector<std::vector<double>>> per_draw(draws);
    if (uncertainty.all_point())
    {
        auto shares = solve_draw(view);
        std::fill(per_draw.begin(), per_draw.end(), shares);
    }
    else
    {
        const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(std::min<std::uint64_t>(draws, 256))));
        std::vector<std::exception_ptr> errors(threads);
        auto worker = [&](unsigned t) {
            try
            {
                for (std::uint64_t i = t; i < draws; i += threads)
                    per_draw[i] = solve_draw(build_diagram(sample_parameters(view.spec(), uncertainty, seed, i)));
            }
            catch (...)
            {
                errors[t] = std::current_exception();
            }
        };
        if (threads == 1)
        {
            worker(0);
        }
        else
        {
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < threads; ++t)
                pool.emplace_back(worker, t);
            for (auto& th : pool)
                th.join();
        }
        for (const auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    // Sequential reduction in draw order keeps the result independent of threading.
    fc.probabilities.assign(n_ctx, std::vector<double>(n_alt, 0.0));
    for (std::size_t c = 0; c < n_ctx; ++c)
        for (std::size_t a = 0; a < n_alt; ++a)
        {
            double tally = 0.0;
            for (std::uint64_t i = 0; i < draws; ++i)
                tally += per_draw[i][c][a];
            fc.probabilities[c][a] = tally / static_cast<double>(draws);
        }
    return fc;
}

std::vector<std::vector<std::string>> enumerate_rules(const Diagram& d, std::string_view decision)
{
    const auto& n = d.node(d.index_of(decision));
    if (n.kind != NodeKind::decision)
        throw Error("node " + n.id + " is not a decision");
    const std::size_t configs = n.configurations();
    const std::size_t alts = n.domain.size();
    std::size_t count = 1;
    for (std::size_t c = 0; c < configs; ++c)
    {
        count *= alts;
        if (count > 1'000'000)
            throw Error("too many rules for decision " + n.id);
    }
    std::vector<std::vector<std::string>> rules;
    rules.reserve(count);
    for (std::size_t r = 0; r < count; ++r)
    {
        std::vector<std::string> choices(configs);
        std::size_t rest = r;
        for (std::size_t c = configs; c-- > 0;)
        {
            choices[c] = n.domain.labels[rest % alts];
            rest /= alts;
        }
        rules.push_back(std::move(choices));
    }
    return rules;
}

DefenderSolution solve_defender(const Diagram& d, const AttackForecast& forecast, Engine engine)
{
    const Agent* defender = d.agent_of_kind(AgentKind::defender);
    if (!defender)
        throw ForecastError("diagram has no unique defender agent");
    const auto& attack = d.node(d.index_of(forecast.decision));
    if (attack.kind != NodeKind::decision)
        throw ForecastError("forecast decision " + forecast.decision + " is not a decision node");
    std::vector<std::string> parents;
    std::vector<const Domain*> doms;
    for (auto p : attack.parents)
    {
        parents.push_back(d.node(p).id);
        doms.push_back(&d.node(p).domain);
    }
    if (parents != forecast.context_nodes || forecast.alternatives != attack.domain.labels)
        throw ForecastError("forecast does not match the parents or alternatives of " + attack.id);

    std::vector<std::vector<double>> rows;
    for (const auto& ctx : label_tuples(doms))
    {
        auto it = std::find(forecast.contexts.begin(), forecast.contexts.end(), ctx);
        if (it == forecast.contexts.end())
            throw ForecastError("context missing from forecast");
        rows.push_back(forecast.probabilities[static_cast<std::size_t>(it - forecast.contexts.begin())]);
    }
    const Diagram model = with_chance_node(d, attack.id, parents, rows);

    for (const auto& n : model.nodes())
        if (n.kind == NodeKind::decision && n.owner != defender->id)
            throw ForecastError("decision " + n.id + " of another agent is not forecast");

    std::vector<std::string> decisions;
    std::vector<std::vector<std::vector<std::string>>> options;
    for (auto i : model.decisions_of(defender->id))
    {
        decisions.push_back(model.node(i).id);
        options.push_back(enumerate_rules(model, model.node(i).id));
    }

    std::size_t total = 1;
    constexpr std::size_t kMaxPolicies = 1'000'000;
    for (const auto& o : options)
    {
        if (o.empty() || total > kMaxPolicies / o.size())
            throw ForecastError("defender policy space exceeds " + std::to_string(kMaxPolicies) + " policies");
        total *= o.size();
    }

    DefenderSolution sol;
    sol.ranking.reserve(total);
    for (std::size_t idx = 0; idx < total; ++idx)
    {
        Policy policy;
        std::size_t rest = idx;
        for (std::size_t k = decisions.size(); k-- > 0;)
        {
            policy.set_rule(decisions[k], options[k][rest % options[k].size()]);
            rest /= options[k].size();
        }
        sol.ranking.push_back({policy, expected_utility(model, defender->id, policy, {}, engine)});
    }
    std::stable_sort(sol.ranking.begin(), sol.ranking.end(),
                     [](const RankedPolicy& a, const RankedPolicy& b) { return a.expected_utility > b.expected_utility; });
    sol.policy = sol.ranking.front().policy;
    sol.expected_utility = sol.ranking.front().expected_utility;
    return sol;
}

}  // namespace aramaid
