#include "aramaid/drilling.hpp"
#include "aramaid/inference.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace aramaid;

namespace
{

Policy defender_policy(std::string dp, std::string df, std::string dt, std::string dr)
{
    Policy p;
    p.fix("DP", std::move(dp)).fix("DF", std::move(df)).fix("DT", std::move(dt)).fix("DR", std::move(dr));
    return p;
}

const Diagram& drilling()
{
    static const Diagram d = build_drilling_model();
    return d;
}

const char* kTwoNode = R"(agent nature kind=nature
agent me kind=defender
node UC kind=chance domain=a,b
node K kind=deterministic domain=hi,lo
node D kind=decision agent=me domain=x,y
node V kind=value agent=me
node U kind=utility agent=me
arc UC -> K
arc K -> V
arc UC -> D
arc D -> V
arc V -> U
cpt UC | : a=0.3,b=0.7
det K | UC=a : hi
det K | UC=b : lo
value V form=table | K=hi,D=x : 1
value V form=table | K=hi,D=y : 0.25
value V form=table | K=lo,D=x : 0
value V form=table | K=lo,D=y : 0.5
utility U weights V=1
order me D
)";

}  // namespace

TEST(Inference, JointProbabilityOfRootNode)
{
    const Diagram d = testsupport::parse_or_throw("node UC kind=chance domain=a,b\ncpt UC | : a=0.3,b=0.7\n");
    EXPECT_DOUBLE_EQ(joint_probability(d, {}, {{"UC", "a"}}), 0.3);
}

TEST(Inference, JointProbabilityZeroOnDeterministicMismatch)
{
    const Diagram d = testsupport::parse_or_throw(kTwoNode);
    Policy p;
    p.fix("D", "x");
    EXPECT_DOUBLE_EQ(joint_probability(d, p, {{"UC", "a"}, {"K", "hi"}, {"D", "x"}}), 0.3);
    EXPECT_EQ(joint_probability(d, p, {{"UC", "a"}, {"K", "lo"}, {"D", "x"}}), 0.0);
    EXPECT_EQ(joint_probability(d, p, {{"UC", "a"}, {"K", "hi"}, {"D", "y"}}), 0.0);
}

TEST(Inference, AttackFactorUnderPerpetrateWithoutProtection)
{
    Policy p = defender_policy("none", "forensic", "accept", "continue");
    p.fix("AP", "perpetrate");
    const auto ua = marginal_distribution(drilling(), p, {}, "UA");
    EXPECT_NEAR(ua[0], 0.40, 1e-15);
    EXPECT_NEAR(ua[1], 0.60, 1e-15);

    // Chain rule on one full assignment, every other factor read off the model.
    Assignment a{{"DP", "none"}, {"DF", "forensic"}, {"DT", "accept"}, {"DR", "continue"}, {"AP", "perpetrate"},
                 {"AC", "cost"}, {"UC", "normal"}, {"UA", "attack"}, {"UCA", "identification"},
                 {"UH", "no_casualties"}, {"UM", "loss_0"}, {"URH", "no_casualties"}, {"DC", "usd_10000"}};
    const Evidence given{{"UA", "attack"}, {"UC", "normal"}};
    const double uh = marginal_distribution(drilling(), p, given, "UH")[0];
    const double um = marginal_distribution(drilling(), p, given, "UM")[0];
    const double urh = marginal_distribution(drilling(), p, {{"UH", "no_casualties"}}, "URH")[0];
    const double uca = marginal_distribution(drilling(), p, given, "UCA")[1];
    EXPECT_NEAR(uca, 0.70, 1e-15);
    EXPECT_NEAR(joint_probability(drilling(), p, a), 0.7 * 0.40 * uca * uh * um * urh, 1e-15);
}

TEST(Inference, CasualtiesGivenAttackRiskierContinue)
{
    Policy p = defender_policy("none", "no_forensic", "accept", "continue");
    p.fix("AP", "perpetrate");
    const auto uh = marginal_distribution(drilling(), p, {{"UA", "attack"}, {"UC", "riskier"}}, "UH");
    ASSERT_EQ(uh.size(), 2u);
    EXPECT_NEAR(uh[0], 0.96, 1e-12);
    EXPECT_NEAR(uh[1], 0.04, 1e-12);
}

TEST(Inference, EvidenceOnTargetIsPointMass)
{
    Policy p = defender_policy("none", "no_forensic", "accept", "continue");
    p.fix("AP", "perpetrate");
    EXPECT_EQ(marginal_distribution(drilling(), p, {{"UM", "loss_0_1M"}}, "UM"), (std::vector<double>{0.0, 1.0, 0.0}));
}

TEST(Inference, ResidualHarmUnderAvoidMatchesOracle)
{
    Policy p = defender_policy("none", "no_forensic", "avoid", "continue");
    p.fix("AP", "no_perpetrate");
    const auto engine = marginal_distribution(drilling(), p, {}, "URH");
    oracle::Rules r{{"DP", {"none"}}, {"DF", {"no_forensic"}}, {"DT", {"avoid"}}, {"DR", {"continue"}}, {"AP", {"no_perpetrate"}}};
    const auto reference = oracle::marginal(drilling().spec(), r, {}, "URH");
    ASSERT_EQ(engine.size(), reference.size());
    for (std::size_t i = 0; i < engine.size(); ++i)
        EXPECT_NEAR(engine[i], reference[i], 1e-15);
}

TEST(Inference, PublishedDefenderCells)
{
    Policy p = defender_policy("none", "no_forensic", "accept", "continue");
    p.fix("AP", "no_perpetrate");
    EXPECT_NEAR(expected_utility(drilling(), "defender", p, {{"UC", "normal"}, {"UA", "no_attack"}}), 0.99895, 1e-5);

    p = defender_policy("additional", "forensic", "accept", "stop");
    p.fix("AP", "perpetrate");
    EXPECT_NEAR(expected_utility(drilling(), "defender", p, {{"UC", "riskier"}, {"UA", "attack"}}), 0.98675, 1e-5);
}

TEST(Inference, ImpossibleEvidenceIsAnError)
{
    Policy p = defender_policy("none", "no_forensic", "accept", "continue");
    p.fix("AP", "no_perpetrate");
    EXPECT_THROW(expected_utility(drilling(), "defender", p, {{"UA", "attack"}}), ImpossibleEvidence);
    EXPECT_THROW(expected_utility(drilling(), "defender", p, {{"UA", "attack"}}, Engine::enumeration), ImpossibleEvidence);
    EXPECT_THROW(marginal_distribution(drilling(), p, {{"UA", "attack"}}, "UH"), ImpossibleEvidence);
}

TEST(Inference, ConstantUtilityIsOne)
{
    const Diagram d = testsupport::parse_or_throw(R"(agent me kind=defender
node D kind=decision agent=me domain=x,y
node V kind=value agent=me
node W kind=value agent=me
node U kind=utility agent=me
arc D -> V
arc V -> U
arc W -> U
value V form=table | D=x : 1
value V form=table | D=y : 1
value W form=table | : 1
utility U weights V=0.4 W=0.6
order me D
)");
    Policy p;
    p.fix("D", "y");
    EXPECT_DOUBLE_EQ(expected_utility(d, "me", p), 1.0);

    const EuTable t = decision_table(d, "me", {"D"});
    ASSERT_EQ(t.cells.size(), 2u);
    EXPECT_EQ(t.cells[0], t.cells[1]);
    EXPECT_TRUE(t.is_max[0]);
    EXPECT_TRUE(t.is_max[1]);
}

TEST(Inference, PolicyErrors)
{
    const Diagram d = testsupport::parse_or_throw(kTwoNode);
    EXPECT_THROW(expected_utility(d, "me", {}), InferenceError);
    Policy p;
    p.set_rule("D", {"x", "y", "x"});
    EXPECT_THROW(expected_utility(d, "me", p), InferenceError);
    p.fix("D", "z");
    EXPECT_THROW(expected_utility(d, "me", p), InferenceError);
    p.fix("D", "x");
    EXPECT_THROW(expected_utility(d, "me", p, {{"D", "x"}}), InferenceError);
    EXPECT_THROW(expected_utility(d, "me", p, {{"Q", "x"}}), InferenceError);
    EXPECT_THROW(expected_utility(d, "nobody", p), Error);
}

TEST(Inference, ObservationDependentRule)
{
    const Diagram d = testsupport::parse_or_throw(kTwoNode);
    Policy p;
    p.set_rule("D", {"x", "y"});
    // a: K=hi, D=x -> 1; b: K=lo, D=y -> 0.5
    EXPECT_DOUBLE_EQ(expected_utility(d, "me", p), 0.3 * 1.0 + 0.7 * 0.5);
    EXPECT_DOUBLE_EQ(expected_utility(d, "me", p, {}, Engine::enumeration), 0.3 * 1.0 + 0.7 * 0.5);
    EXPECT_DOUBLE_EQ(expected_utility(d, "me", p, {{"K", "lo"}}), 0.5);
}

TEST(Inference, DecisionTableLayoutAndGroups)
{
    const Diagram d = testsupport::parse_or_throw(kTwoNode);
    const EuTable t = decision_table(d, "me", {"UC", "D"});
    ASSERT_EQ(t.cells.size(), 4u);
    EXPECT_EQ(t.labels_of(1), (std::vector<std::string>{"a", "y"}));
    EXPECT_EQ(t.cell_index({"b", "x"}), 2u);
    EXPECT_DOUBLE_EQ(t.cells[0], 1.0);
    EXPECT_DOUBLE_EQ(t.cells[1], 0.25);
    EXPECT_DOUBLE_EQ(t.cells[2], 0.0);
    EXPECT_DOUBLE_EQ(t.cells[3], 0.5);
    EXPECT_EQ(t.is_max, (std::vector<bool>{true, false, false, true}));
}

TEST(Inference, DecisionTableNeedsEveryOwnDecision)
{
    EXPECT_THROW(decision_table(drilling(), "defender", {"DP", "DF", "DT"}), InferenceError);
    EXPECT_THROW(decision_table(drilling(), "defender", {"DCV"}), InferenceError);
    EXPECT_THROW(decision_table(drilling(), "defender", {"DP", "DP"}), InferenceError);
}

TEST(Inference, EnginesAgreeOnDefenderTable)
{
    const std::vector<std::string> axes{"DP", "DF", "DT", "DR", "UC", "UA"};
    const EuTable ve = decision_table(drilling(), "defender", axes);
    const EuTable en = decision_table(drilling(), "defender", axes, {}, Engine::enumeration);
    ASSERT_EQ(ve.cells.size(), 96u);
    for (std::size_t i = 0; i < ve.cells.size(); ++i)
        EXPECT_NEAR(ve.cells[i], en.cells[i], 1e-12);
    EXPECT_EQ(ve.is_max, en.is_max);
}

TEST(Inference, DefenderTableMatchesOracle)
{
    // Opponent decision left free is uniform, as the engine does.
    const std::vector<std::string> axes{"DP", "DF", "DT", "DR", "UC", "UA"};
    const EuTable t = decision_table(drilling(), "defender", axes);
    for (std::size_t c = 0; c < t.cells.size(); c += 7)
    {
        const auto l = t.labels_of(c);
        oracle::Rules r{{"DP", {l[0]}}, {"DF", {l[1]}}, {"DT", {l[2]}}, {"DR", {l[3]}}};
        const double ref = oracle::expected_utility(drilling().spec(), "defender", r, {{"UC", l[4]}, {"UA", l[5]}});
        EXPECT_NEAR(t.cells[c], ref, 1e-12) << c;
    }
}
