#include "aramaid/drilling.hpp"
#include "aramaid/inference.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace aramaid;
using testsupport::Csv;
using testsupport::parse_csv;
using testsupport::read_file;

namespace
{

const Diagram& drilling()
{
    static const Diagram d = build_drilling_model();
    return d;
}

Csv table(const std::string& name)
{
    return parse_csv(read_file(testsupport::models_dir() + "/tables/" + name));
}

const CptRow& cpt_row(const NodeSpec& n, const std::vector<std::string>& key)
{
    for (const auto& r : std::get<Cpt>(n.payload).rows)
        if (r.parent_labels == key)
            return r;
    throw std::runtime_error("no row");
}

/// Cost from the component list: the avoid entry replaces everything,
/// otherwise every matching component is added.
double cost_from_components(const std::map<std::string, std::string>& at)
{
    const Csv c = table("T7_DC_components.csv");
    double total = 0.0;
    for (const auto& row : c.rows)
    {
        bool match = true;
        for (const auto& cond : testsupport::split(row[1], ';'))
        {
            const auto eq = cond.find('=');
            match = match && at.at(cond.substr(0, eq)) == cond.substr(eq + 1);
        }
        if (!match)
            continue;
        if (row[0] == "avoid")
            return std::stod(row[2]);
        total += std::stod(row[2]);
    }
    return total;
}

Policy defender(const std::string& dp, const std::string& df, const std::string& dt, const std::string& dr)
{
    Policy p;
    p.fix("DP", dp).fix("DF", df).fix("DT", dt).fix("DR", dr);
    return p;
}

}  // namespace

TEST(Drilling, RosterAndValidity)
{
    EXPECT_EQ(drilling_roster().size(), 19u);
    EXPECT_EQ(drilling().size(), 19u);
    EXPECT_TRUE(validate_diagram(drilling()).empty());
    EXPECT_TRUE(is_drilling_model(drilling()));
    for (auto id : drilling_roster())
        EXPECT_TRUE(drilling().find(id).has_value()) << id;
}

TEST(Drilling, PublishedCells)
{
    const auto& s = drilling().spec();
    EXPECT_EQ(cpt_row(*s.find_node("UA"), {"perpetrate", "additional"}).probabilities[0], 0.05);
    EXPECT_EQ(cpt_row(*s.find_node("UCA"), {"attack", "forensic"}).probabilities[1], 0.70);
}

TEST(Drilling, ProbabilityTablesMatchFixtures)
{
    const auto& s = drilling().spec();
    for (const auto& [file, node] : std::vector<std::pair<std::string, std::string>>{
             {"T1_UC.csv", "UC"}, {"T2_UA.csv", "UA"}, {"T3_UM.csv", "UM"},
             {"T4_UH.csv", "UH"}, {"T5_URH.csv", "URH"}, {"T6_UCA.csv", "UCA"}})
    {
        const Csv c = table(file);
        const NodeSpec& n = *s.find_node(node);
        const std::size_t parents = n.parents.size();
        if (parents == 0)
        {
            // One line per outcome.
            const auto& r = cpt_row(n, {});
            for (const auto& row : c.rows)
                EXPECT_EQ(r.probabilities[*n.domain.index_of(row[0])], std::stod(row[1])) << file;
            continue;
        }
        ASSERT_EQ(c.rows.size(), std::get<Cpt>(n.payload).rows.size()) << file;
        for (std::size_t k = 0; k < parents; ++k)
            ASSERT_EQ(c.header[k], n.parents[k]) << file;
        for (const auto& row : c.rows)
        {
            const std::vector<std::string> key(row.begin(), row.begin() + static_cast<long>(parents));
            const auto& r = cpt_row(n, key);
            for (std::size_t o = parents; o < row.size(); ++o)
                EXPECT_EQ(r.probabilities[*n.domain.index_of(c.header[o])], std::stod(row[o])) << file << " " << c.header[o];
        }
    }
}

TEST(Drilling, ValueAndWeightTablesMatchFixtures)
{
    const auto& s = drilling().spec();
    const auto& acv = std::get<ValueSpec>(s.find_node("ACV")->payload);
    for (const auto& row : table("T9_ACV.csv").rows)
    {
        bool found = false;
        for (const auto& r : acv.rows)
            if (r.parent_labels == std::vector<std::string>{row[0], row[1]})
            {
                EXPECT_EQ(r.score, std::stod(row[2]));
                found = true;
            }
        EXPECT_TRUE(found) << row[0] << "," << row[1];
    }
    for (const auto& [file, node] : std::vector<std::pair<std::string, std::string>>{{"T8_DU_weights.csv", "DU"},
                                                                                     {"T10_AU_weights.csv", "AU"}})
    {
        const auto& w = std::get<UtilitySpec>(s.find_node(node)->payload).weights;
        for (const auto& row : table(file).rows)
        {
            auto it = std::find_if(w.begin(), w.end(), [&](const auto& x) { return x.first == row[0]; });
            ASSERT_NE(it, w.end()) << row[0];
            EXPECT_EQ(it->second, std::stod(row[1]));
        }
    }
}

TEST(Drilling, CostTableIsTotalAndMatchesComponents)
{
    const NodeSpec& dc = *drilling().spec().find_node("DC");
    const auto& rows = std::get<DetTable>(dc.payload).rows;
    EXPECT_EQ(rows.size(), 72u);
    const DrillingModelConfig cfg;
    for (const auto& r : rows)
    {
        std::map<std::string, std::string> at;
        for (std::size_t k = 0; k < dc.parents.size(); ++k)
            at[dc.parents[k]] = r.parent_labels[k];
        const double expected = cost_from_components(at);
        const double tagged = dc.domain.numeric_tags[*dc.domain.index_of(r.label)];
        EXPECT_EQ(tagged, expected) << r.label;
        EXPECT_EQ(defender_cost(cfg, at["DP"], at["DF"], at["DT"], at["DR"], at["UM"]), expected);
    }
}

TEST(Drilling, CostExamples)
{
    const DrillingModelConfig cfg;
    const double c = defender_cost(cfg, "additional", "forensic", "accept", "stop", "loss_1M_5M");
    EXPECT_EQ(c, 2'830'000.0);
    EXPECT_NEAR(defender_cost_value(c), 0.717, 1e-15);
    for (const char* dp : {"additional", "none"})
        for (const char* dr : {"continue", "stop"})
            EXPECT_EQ(defender_cost(cfg, dp, "forensic", "avoid", dr, "loss_0_1M"), 10'000'000.0);
    EXPECT_EQ(defender_cost(cfg, "none", "no_forensic", "accept", "continue", "loss_0"), 0.0);
}

TEST(Drilling, ValueFunctions)
{
    EXPECT_EQ(attacker_monetary_value(10'000'000.0), 1.0);
    EXPECT_EQ(attacker_monetary_value(0.0), 0.0);
    EXPECT_NEAR(attacker_monetary_value(1'250'000.0), 0.5, 1e-15);
    EXPECT_THROW(attacker_monetary_value(-1.0), Error);
    EXPECT_THROW(attacker_monetary_value(1e7 + 1.0), Error);
    EXPECT_EQ(defender_cost_value(10'000'000.0), 0.0);
    EXPECT_EQ(defender_cost_value(0.0), 1.0);
    EXPECT_NEAR(defender_cost_value(830'000.0), 0.917, 1e-15);
}

TEST(Drilling, ObservationFlags)
{
    auto parents_of_ap = [](const DrillingModelConfig& c) { return drilling_model_spec(c).find_node("AP")->parents; };
    DrillingModelConfig c;
    EXPECT_EQ(parents_of_ap(c).size(), 3u);
    c.include_uc_to_ap_arc = false;
    EXPECT_EQ(parents_of_ap(c), (std::vector<std::string>{"DP", "DF"}));
    c.attacker_observes_context = false;
    EXPECT_TRUE(parents_of_ap(c).empty());
    EXPECT_TRUE(validate_diagram(drilling_model_spec(c)).empty());
}

TEST(Drilling, DefenderTableReproducesPublishedValues)
{
    const auto expected = testsupport::t12_expected();
    const EuTable t = decision_table(drilling(), "defender", {"DP", "DF", "DT", "DR", "UC", "UA"});
    ASSERT_EQ(t.cells.size(), 96u);
    ASSERT_EQ(expected.size(), 96u);
    for (std::size_t c = 0; c < t.cells.size(); ++c)
    {
        std::string key;
        for (const auto& l : t.labels_of(c))
            key += (key.empty() ? "" : ",") + l;
        EXPECT_NEAR(t.cells[c], expected.at(key), 1e-4) << key;
    }
}

TEST(Drilling, AvoidCellsIgnoreProtectionAndForensics)
{
    const EuTable t = decision_table(drilling(), "defender", {"DP", "DF", "DT", "DR", "UC", "UA"});
    for (const char* dr : {"continue", "stop"})
        for (const char* uc : {"riskier", "normal"})
            for (const char* ua : {"attack", "no_attack"})
            {
                const double ref = t.cells[t.cell_index({"none", "no_forensic", "avoid", dr, uc, ua})];
                for (const char* dp : {"additional", "none"})
                    for (const char* df : {"forensic", "no_forensic"})
                        EXPECT_EQ(t.cells[t.cell_index({dp, df, "avoid", dr, uc, ua})], ref);
            }
}

TEST(Drilling, AttackerAvoidRowsHaveFullMonetaryValue)
{
    DiagramSpec s = drilling_model_spec();
    std::get<UtilitySpec>(s.find_node("AU")->payload).weights = {{"ACV", 0.0}, {"AMV", 1.0}};
    const Diagram amv_only = build_diagram(s);
    const EuTable t = decision_table(amv_only, "attacker", {"DP", "DF", "DT", "UC", "DR", "AP"});
    for (std::size_t c = 0; c < t.cells.size(); ++c)
    {
        if (t.labels_of(c)[2] == "avoid")
        {
            EXPECT_EQ(t.cells[c], 1.0) << c;
        }
    }
}

TEST(Drilling, AttackerShareRowsIgnoreContext)
{
    const EuTable t = decision_table(drilling(), "attacker", {"DP", "DF", "DT", "UC", "DR", "AP"});
    for (std::size_t c = 0; c < t.cells.size(); ++c)
    {
        auto l = t.labels_of(c);
        if (l[2] != "share" || l[3] != "riskier")
            continue;
        l[3] = "normal";
        EXPECT_NEAR(t.cells[c], t.cells[t.cell_index(l)], 1e-12);
    }
}

TEST(Drilling, ShareGapIsTheCostValueGap)
{
    const EuTable t = decision_table(drilling(), "attacker", {"DP", "DF", "DT", "UC", "DR", "AP"});
    // With all weight on ACV the oracle's expected utility is E[ACV].
    DiagramSpec acv_only = drilling_model_spec();
    std::get<UtilitySpec>(acv_only.find_node("AU")->payload).weights = {{"ACV", 1.0}, {"AMV", 0.0}};
    for (const char* dp : {"additional", "none"})
        for (const char* df : {"forensic", "no_forensic"})
            for (const char* uc : {"riskier", "normal"})
                for (const char* dr : {"continue", "stop"})
                {
                    const double perp = t.cells[t.cell_index({dp, df, "share", uc, dr, "perpetrate"})];
                    const double none = t.cells[t.cell_index({dp, df, "share", uc, dr, "no_perpetrate"})];
                    auto acv = [&](const char* ap) {
                        oracle::Rules r{{"DP", {dp}}, {"DF", {df}}, {"DT", {"share"}}, {"DR", {dr}}, {"AP", {ap}}};
                        return oracle::expected_utility(acv_only, "attacker", r, {{"UC", uc}});
                    };
                    EXPECT_NEAR(none - perp, 0.03 * (acv("no_perpetrate") - acv("perpetrate")), 1e-12) << dp << df << uc << dr;
                }
}

TEST(Drilling, ReferenceAttackerTableMatchesEngine)
{
    const Csv ref = parse_csv(read_file(testsupport::models_dir() + "/golden/T11_reference.csv"));
    const EuTable t = decision_table(drilling(), "attacker", {"DP", "DF", "DT", "UC", "DR", "AP"});
    ASSERT_EQ(ref.rows.size(), t.cells.size());
    const std::size_t eu = ref.column("eu");
    const std::size_t published = ref.column("reference");
    const std::size_t delta = ref.column("delta");
    for (std::size_t c = 0; c < t.cells.size(); ++c)
    {
        const auto& row = ref.rows[c];
        EXPECT_EQ(std::vector<std::string>(row.begin(), row.begin() + 6), t.labels_of(c));
        EXPECT_EQ(std::stod(row[eu]), t.cells[c]);
        EXPECT_NEAR(std::stod(row[delta]), t.cells[c] - std::stod(row[published]), 1e-15);
    }
}

TEST(Drilling, OrderingUnderPointBeliefs)
{
    for (const char* dp : {"additional", "none"})
        for (const char* df : {"forensic", "no_forensic"})
        {
            auto gap = [&](const char* dt, const char* dr) {
                Policy p = defender(dp, df, dt, dr);
                p.fix("AP", "perpetrate");
                const double perp = expected_utility(drilling(), "attacker", p);
                p.fix("AP", "no_perpetrate");
                return perp - expected_utility(drilling(), "attacker", p);
            };
            EXPECT_GT(gap("accept", "continue"), 0.0) << dp << df;
            // Stopping the facility removes most of the attack's payoff: under a
            // believed accept/stop the attacker perpetrates only against an
            // unprotected, unmonitored facility.
            const bool exposed = std::string(dp) == "none" && std::string(df) == "no_forensic";
            EXPECT_EQ(gap("accept", "stop") > 0.0, exposed) << dp << df;
            EXPECT_GT(gap("accept", "continue"), gap("accept", "stop")) << dp << df;
            for (const char* dt : {"share", "avoid"})
                for (const char* dr : {"continue", "stop"})
                    EXPECT_LT(gap(dt, dr), 0.0) << dp << df << dt << dr;
        }
}

TEST(Drilling, DefaultBeliefs)
{
    const auto b = default_drilling_beliefs();
    EXPECT_EQ(b.observed, (std::vector<std::string>{"DP", "DF"}));
    EXPECT_EQ(b.beliefs.distributions.size(), 2u);
    EXPECT_EQ(b.uncertainty.quantities.size(), 3u);
    EXPECT_FALSE(b.uncertainty.all_point());
}

TEST(Drilling, OtherDiagramsAreNotTheExample)
{
    DiagramSpec s = drilling_model_spec();
    EXPECT_TRUE(is_drilling_model(build_diagram(s)));
    const Diagram small = testsupport::parse_or_throw("node UC kind=chance domain=a\ncpt UC | : a=1\n");
    EXPECT_FALSE(is_drilling_model(small));
}
