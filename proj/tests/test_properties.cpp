#include "aramaid/drilling.hpp"
#include "aramaid/inference.hpp"
#include "aramaid/model_format.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "random_diagram.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace aramaid;
using testsupport::random_diagram;
using testsupport::random_evidence;
using testsupport::random_rules;
using testsupport::to_policy;

namespace
{

std::vector<std::string> strategic_agents(const DiagramSpec& s)
{
    std::vector<std::string> out;
    for (const auto& a : s.agents)
        if (a.kind != AgentKind::nature)
            out.push_back(a.id);
    return out;
}

Evidence to_evidence(const oracle::Labels& l)
{
    return Evidence(l.begin(), l.end());
}

/// Every value node rewritten as a table of a * score + b.
DiagramSpec affine_values(const DiagramSpec& s, double a, double b)
{
    DiagramSpec out = s;
    for (auto& n : out.nodes)
    {
        if (n.kind != NodeKind::value)
            continue;
        std::vector<const Domain*> doms;
        for (const auto& p : n.parents)
            doms.push_back(&s.find_node(p)->domain);
        ValueSpec table;
        for (const auto& tuple : label_tuples(doms))
        {
            oracle::Labels at;
            for (std::size_t k = 0; k < tuple.size(); ++k)
                at[n.parents[k]] = tuple[k];
            table.rows.push_back({tuple, a * oracle::value_score(s, n.id, at) + b});
        }
        n.payload = table;
    }
    return out;
}

std::string renamed(const std::string& id)
{
    return "z" + id + "_r";
}

DiagramSpec rename_nodes(DiagramSpec s)
{
    for (auto& n : s.nodes)
    {
        n.id = renamed(n.id);
        for (auto& p : n.parents)
            p = renamed(p);
        if (auto* u = std::get_if<UtilitySpec>(&n.payload))
            for (auto& w : u->weights)
                w.first = renamed(w.first);
    }
    for (auto& o : s.orders)
        for (auto& d : o.decisions)
            d = renamed(d);
    return s;
}

}  // namespace

TEST(Properties, EliminationMatchesBruteForceOnRandomDiagrams)
{
    std::mt19937_64 rng(20240601);
    int compared = 0;
    for (int i = 0; i < 200; ++i)
    {
        const DiagramSpec spec = random_diagram(rng);
        ASSERT_TRUE(validate_diagram(spec).empty()) << i;
        const Diagram d = build_diagram(spec);
        EXPECT_EQ(topological_order(d).size(), d.size());
        const auto rules = random_rules(spec, rng);
        const auto evidence = random_evidence(spec, rng, 0.3);
        for (const auto& agent : strategic_agents(spec))
        {
            double reference = 0.0;
            try
            {
                reference = oracle::expected_utility(spec, agent, rules, evidence);
            }
            catch (const oracle::ImpossibleEvidence&)
            {
                EXPECT_THROW(expected_utility(d, agent, to_policy(rules), to_evidence(evidence)), ImpossibleEvidence) << i;
                continue;
            }
            EXPECT_NEAR(expected_utility(d, agent, to_policy(rules), to_evidence(evidence)), reference, 1e-12) << i;
            EXPECT_NEAR(expected_utility(d, agent, to_policy(rules), to_evidence(evidence), Engine::enumeration), reference, 1e-12) << i;
            ++compared;
        }
    }
    EXPECT_GT(compared, 150);
}

TEST(Properties, MarginalsSumToOneAndMatchBruteForce)
{
    std::mt19937_64 rng(77);
    for (int i = 0; i < 100; ++i)
    {
        const DiagramSpec spec = random_diagram(rng);
        const Diagram d = build_diagram(spec);
        const auto rules = random_rules(spec, rng);
        const auto evidence = random_evidence(spec, rng, 0.2);
        for (const auto& n : spec.nodes)
        {
            if (n.kind == NodeKind::value || n.kind == NodeKind::utility)
                continue;
            std::vector<double> reference;
            try
            {
                reference = oracle::marginal(spec, rules, evidence, n.id);
            }
            catch (const oracle::ImpossibleEvidence&)
            {
                EXPECT_THROW(marginal_distribution(d, to_policy(rules), to_evidence(evidence), n.id), ImpossibleEvidence);
                continue;
            }
            const auto m = marginal_distribution(d, to_policy(rules), to_evidence(evidence), n.id);
            double total = 0.0;
            for (std::size_t k = 0; k < m.size(); ++k)
            {
                EXPECT_NEAR(m[k], reference[k], 1e-12) << i << " " << n.id;
                total += m[k];
            }
            EXPECT_NEAR(total, 1.0, 1e-12);
        }
    }
}

TEST(Properties, LawOfTotalExpectation)
{
    std::mt19937_64 rng(99);
    for (int i = 0; i < 100; ++i)
    {
        const DiagramSpec spec = random_diagram(rng);
        const Diagram d = build_diagram(spec);
        const Policy policy = to_policy(random_rules(spec, rng));
        const std::string agent = strategic_agents(spec).front();
        for (const auto& n : spec.nodes)
        {
            if (n.kind != NodeKind::chance && n.kind != NodeKind::deterministic)
                continue;
            const auto p = marginal_distribution(d, policy, {}, n.id);
            double mixed = 0.0;
            for (std::size_t k = 0; k < p.size(); ++k)
                if (p[k] > 0.0)
                    mixed += p[k] * expected_utility(d, agent, policy, {{n.id, n.domain.labels[k]}});
            EXPECT_NEAR(expected_utility(d, agent, policy), mixed, 1e-12) << i << " " << n.id;
        }
    }
}

TEST(Properties, AffineValueTransformKeepsArgmax)
{
    std::mt19937_64 rng(4242);
    int tables = 0;
    for (int i = 0; i < 100; ++i)
    {
        const DiagramSpec spec = random_diagram(rng);
        const std::string agent = strategic_agents(spec).front();
        std::vector<std::string> axes;
        for (const auto& n : spec.nodes)
            if (n.kind == NodeKind::decision && n.owner == agent)
                axes.push_back(n.id);
        if (axes.empty())
            continue;
        const EuTable before = decision_table(build_diagram(spec), agent, axes);
        const EuTable after = decision_table(build_diagram(affine_values(spec, 2.5, -0.7)), agent, axes);
        EXPECT_EQ(before.is_max, after.is_max) << i;
        ++tables;
    }
    EXPECT_GT(tables, 30);

    const DiagramSpec drilling = drilling_model_spec();
    const std::vector<std::string> axes{"DP", "DF", "DT", "DR", "UC", "UA"};
    EXPECT_EQ(decision_table(build_diagram(drilling), "defender", axes).is_max,
              decision_table(build_diagram(affine_values(drilling, 3.0, 1.0)), "defender", axes).is_max);
}

TEST(Properties, RenamingNodesLeavesResultsUnchanged)
{
    std::mt19937_64 rng(5150);
    for (int i = 0; i < 60; ++i)
    {
        const DiagramSpec spec = random_diagram(rng);
        const auto rules = random_rules(spec, rng);
        oracle::Rules renamed_rules;
        for (const auto& [k, v] : rules)
            renamed_rules[renamed(k)] = v;
        const Diagram a = build_diagram(spec);
        const Diagram b = build_diagram(rename_nodes(spec));
        for (const auto& agent : strategic_agents(spec))
            EXPECT_NEAR(expected_utility(a, agent, to_policy(rules)), expected_utility(b, agent, to_policy(renamed_rules)), 1e-12);
    }
}

TEST(Properties, RoundTripOnRandomDiagrams)
{
    std::mt19937_64 rng(31337);
    for (int i = 0; i < 100; ++i)
    {
        const Diagram d = build_diagram(random_diagram(rng));
        const std::string text = serialize_model(d);
        const auto r = parse_model(text);
        ASSERT_TRUE(r.ok()) << i << "\n" << text;
        EXPECT_EQ(serialize_model(*r.diagram), text) << i;
        for (const auto& n : d.nodes())
        {
            const auto& m = r.diagram->node(r.diagram->index_of(n.id));
            EXPECT_EQ(n.cpt, m.cpt);
            EXPECT_EQ(n.det, m.det);
            EXPECT_EQ(n.scores, m.scores);
            EXPECT_EQ(n.domain, m.domain);
            EXPECT_EQ(n.weights.size(), m.weights.size());
        }
        EXPECT_EQ(validate_diagram(*r.diagram), validate_diagram(d));
    }
}

TEST(Properties, ParserSurvivesRandomBytes)
{
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<int> length(0, 400);
    const Diagram drilling = build_drilling_model();
    for (int i = 0; i < 10000; ++i)
    {
        std::string text(static_cast<std::size_t>(length(rng)), '\0');
        for (auto& c : text)
            c = static_cast<char>(byte(rng));
        ParseResult r;
        ASSERT_NO_THROW(r = parse_model(text)) << i;
        EXPECT_TRUE(r.ok() || !r.diagnostics.empty());
        ASSERT_NO_THROW(parse_beliefs(text, drilling)) << i;
    }
}

TEST(Properties, ParserSurvivesMutatedModels)
{
    const std::string base = testsupport::read_file(testsupport::models_dir() + "/drilling.maid");
    const std::string alphabet = "|:=,->#\" \n\tabcXYZ0123456789.e+";
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<std::size_t> pos(0, base.size() - 1);
    std::uniform_int_distribution<std::size_t> ch(0, alphabet.size() - 1);
    for (int i = 0; i < 300; ++i)
    {
        std::string text = base;
        for (int k = 0; k < 1 + i % 5; ++k)
            text[pos(rng)] = alphabet[ch(rng)];
        ParseResult a;
        ASSERT_NO_THROW(a = parse_model(text)) << i;
        EXPECT_EQ(a.diagnostics, parse_model(text).diagnostics);
    }
}
