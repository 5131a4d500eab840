#include "aramaid/drilling.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace aramaid
{

namespace
{

NodeSpec decision(std::string id, std::string owner, std::vector<std::string> labels, std::vector<std::string> parents = {})
{
    NodeSpec n;
    n.id = std::move(id);
    n.kind = NodeKind::decision;
    n.owner = std::move(owner);
    n.domain.labels = std::move(labels);
    n.parents = std::move(parents);
    return n;
}

NodeSpec chance(std::string id, std::vector<std::string> labels, std::vector<std::string> parents, std::vector<CptRow> rows)
{
    NodeSpec n;
    n.id = std::move(id);
    n.kind = NodeKind::chance;
    n.domain.labels = std::move(labels);
    n.parents = std::move(parents);
    n.payload = Cpt{std::move(rows)};
    return n;
}

NodeSpec value(std::string id, std::string owner, std::vector<std::string> parents, ValueSpec spec)
{
    NodeSpec n;
    n.id = std::move(id);
    n.kind = NodeKind::value;
    n.owner = std::move(owner);
    n.parents = std::move(parents);
    n.payload = std::move(spec);
    return n;
}

std::string dollars_label(double usd)
{
    return "usd_" + std::to_string(std::llround(usd));
}

const std::vector<std::string> kDP{"additional", "none"};
const std::vector<std::string> kDF{"forensic", "no_forensic"};
const std::vector<std::string> kDT{"avoid", "share", "accept"};
const std::vector<std::string> kDR{"continue", "stop"};
const std::vector<std::string> kUM{"loss_0", "loss_0_1M", "loss_1M_5M"};

}  // namespace

const std::array<std::string_view, 19>& drilling_roster()
{
    static const std::array<std::string_view, 19> roster{
        "DP", "DF", "DT", "DR", "DC", "DCV", "DHV", "DU", "AP", "AC",
        "AMV", "ACV", "AU", "UC", "UA", "UM", "UH", "URH", "UCA"};
    return roster;
}

double defender_cost(const DrillingModelConfig& c,
                     std::string_view dp,
                     std::string_view df,
                     std::string_view dt,
                     std::string_view dr,
                     std::string_view um)
{
    if (dt == "avoid")
        return c.avoid_cost;
    double cost = 0.0;
    if (dt == "share")
    {
        cost = c.share_cost;
    }
    else
    {
        auto it = std::find(kUM.begin(), kUM.end(), um);
        if (it == kUM.end())
            throw Error("unknown monetary outcome '" + std::string(um) + "'");
        cost = c.accept_mapping[static_cast<std::size_t>(it - kUM.begin())];
    }
    if (dp == "additional")
        cost += c.protection_cost;
    if (df == "forensic")
        cost += c.forensic_cost;
    if (dr == "stop")
        cost += c.stop_cost;
    return cost;
}

double attacker_monetary_value(double dc)
{
    if (!(dc >= 0.0 && dc <= 1e7))
        throw Error("defender cost outside [0, 1e7]");
    return std::cbrt(dc / 1e7);
}

double defender_cost_value(double dc)
{
    return 1.0 - dc / 1e7;
}

DiagramSpec drilling_model_spec(const DrillingModelConfig& c)
{
    const auto costs = {c.avoid_cost, c.share_cost, c.protection_cost, c.forensic_cost, c.stop_cost};
    if (std::any_of(costs.begin(), costs.end(), [](double x) { return !(x >= 0.0); }) ||
        std::any_of(c.accept_mapping.begin(), c.accept_mapping.end(), [](double x) { return !(x >= 0.0); }))
        throw Error("drilling costs must be non-negative");

    DiagramSpec s;
    s.agents = {{"defender", "Drilling operator", AgentKind::defender},
                {"attacker", "APT group", AgentKind::attacker},
                {"nature", "", AgentKind::nature}};

    s.nodes.push_back(decision("DP", "defender", kDP));
    s.nodes.push_back(decision("DF", "defender", kDF));
    s.nodes.push_back(decision("DT", "defender", kDT));
    s.nodes.push_back(decision("DR", "defender", kDR, {"UA"}));

    std::vector<std::string> ap_parents;
    if (c.attacker_observes_context)
        ap_parents = {"DP", "DF"};
    if (c.include_uc_to_ap_arc)
        ap_parents.push_back("UC");
    s.nodes.push_back(decision("AP", "attacker", {"perpetrate", "no_perpetrate"}, ap_parents));

    s.nodes.push_back(chance("UC", {"riskier", "normal"}, {}, {{{}, {0.3, 0.7}}}));
    s.nodes.push_back(chance("UA", {"attack", "no_attack"}, {"AP", "DP"},
                             {{{"perpetrate", "additional"}, {0.05, 0.95}},
                              {{"perpetrate", "none"}, {0.40, 0.60}},
                              {{"no_perpetrate", "additional"}, {0.0, 1.0}},
                              {{"no_perpetrate", "none"}, {0.0, 1.0}}}));
    s.nodes.push_back(chance("UM", kUM, {"UA", "UC", "DR"},
                             {{{"attack", "riskier", "continue"}, {0.03, 0.12, 0.85}},
                              {{"attack", "riskier", "stop"}, {0.0, 0.85, 0.15}},
                              {{"attack", "normal", "continue"}, {0.10, 0.20, 0.70}},
                              {{"attack", "normal", "stop"}, {0.0, 0.90, 0.10}},
                              {{"no_attack", "riskier", "continue"}, {0.92, 0.07, 0.01}},
                              {{"no_attack", "riskier", "stop"}, {0.0, 0.97, 0.03}},
                              {{"no_attack", "normal", "continue"}, {0.96, 0.04, 0.0}},
                              {{"no_attack", "normal", "stop"}, {0.0, 0.99, 0.01}}}));
    s.nodes.back().domain.numeric_tags = {0.0, 500'000.0, 2'500'000.0};

    const std::vector<std::string> kHarm{"no_casualties", "casualties"};
    // Complement rounded so the tables print as they read.
    auto safe = [](double p) { return std::vector<double>{p, std::round((1.0 - p) * 1e12) / 1e12}; };
    s.nodes.push_back(chance("UH", kHarm, {"UA", "UC", "DR"},
                             {{{"attack", "riskier", "continue"}, safe(0.96)},
                              {{"attack", "riskier", "stop"}, safe(0.992)},
                              {{"attack", "normal", "continue"}, safe(0.994)},
                              {{"attack", "normal", "stop"}, safe(0.9996)},
                              {{"no_attack", "riskier", "continue"}, safe(0.996)},
                              {{"no_attack", "riskier", "stop"}, safe(0.9996)},
                              {{"no_attack", "normal", "continue"}, safe(0.999)},
                              {{"no_attack", "normal", "stop"}, safe(0.9999)}}));
    s.nodes.push_back(chance("URH", kHarm, {"UH", "DT"},
                             {{{"no_casualties", "avoid"}, safe(0.9995)},
                              {{"no_casualties", "share"}, safe(1.0)},
                              {{"no_casualties", "accept"}, safe(1.0)},
                              {{"casualties", "avoid"}, safe(0.0)},
                              {{"casualties", "share"}, safe(0.0)},
                              {{"casualties", "accept"}, safe(0.0)}}));
    s.nodes.push_back(chance("UCA", {"no_identification", "identification"}, {"UA", "DF"},
                             {{{"attack", "forensic"}, safe(0.3)},
                              {{"attack", "no_forensic"}, safe(0.9)},
                              {{"no_attack", "forensic"}, safe(1.0)},
                              {{"no_attack", "no_forensic"}, safe(1.0)}}));

    // Defender cost: one label per distinct dollar amount, ascending.
    std::set<double> amounts;
    std::vector<DetRow> dc_rows;
    for (const auto& dp : kDP)
        for (const auto& df : kDF)
            for (const auto& dt : kDT)
                for (const auto& dr : kDR)
                    for (const auto& um : kUM)
                    {
                        const double usd = defender_cost(c, dp, df, dt, dr, um);
                        amounts.insert(usd);
                        dc_rows.push_back({{dp, df, dt, dr, um}, dollars_label(usd)});
                    }
    NodeSpec dc;
    dc.id = "DC";
    dc.kind = NodeKind::deterministic;
    dc.owner = "defender";
    dc.parents = {"DP", "DF", "DT", "DR", "UM"};
    for (double usd : amounts)
    {
        dc.domain.labels.push_back(dollars_label(usd));
        dc.domain.numeric_tags.push_back(usd);
    }
    dc.payload = DetTable{std::move(dc_rows)};
    s.nodes.push_back(std::move(dc));

    NodeSpec ac;
    ac.id = "AC";
    ac.kind = NodeKind::deterministic;
    ac.owner = "attacker";
    ac.domain.labels = {"cost", "no_cost"};
    ac.parents = {"AP"};
    ac.payload = DetTable{{{{"perpetrate"}, "cost"}, {{"no_perpetrate"}, "no_cost"}}};
    s.nodes.push_back(std::move(ac));

    ValueSpec dcv;
    dcv.form = ValueForm::linear;
    dcv.scale = 1e7;
    dcv.offset = 1.0;
    s.nodes.push_back(value("DCV", "defender", {"DC"}, dcv));

    ValueSpec dhv;
    dhv.form = ValueForm::indicator;
    dhv.zero_labels = {"casualties"};
    dhv.one_labels = {"no_casualties"};
    s.nodes.push_back(value("DHV", "defender", {"URH"}, dhv));

    ValueSpec amv;
    amv.form = ValueForm::power_root;
    amv.scale = 1e7;
    amv.root = 3.0;
    s.nodes.push_back(value("AMV", "attacker", {"DC"}, amv));

    ValueSpec acv;
    acv.form = ValueForm::table;
    acv.rows = {{{"cost", "no_identification"}, 0.75},
                {{"cost", "identification"}, 0.0},
                {{"no_cost", "no_identification"}, 1.0},
                {{"no_cost", "identification"}, 0.25}};
    s.nodes.push_back(value("ACV", "attacker", {"AC", "UCA"}, acv));

    NodeSpec du;
    du.id = "DU";
    du.kind = NodeKind::utility;
    du.owner = "defender";
    du.parents = {"DCV", "DHV"};
    du.payload = UtilitySpec{{{"DCV", 0.05}, {"DHV", 0.95}}};
    s.nodes.push_back(std::move(du));

    NodeSpec au;
    au.id = "AU";
    au.kind = NodeKind::utility;
    au.owner = "attacker";
    au.parents = {"ACV", "AMV"};
    au.payload = UtilitySpec{{{"ACV", 0.03}, {"AMV", 0.97}}};
    s.nodes.push_back(std::move(au));

    s.orders = {{"defender", {"DP", "DF", "DT", "DR"}}, {"attacker", {"AP"}}};
    return s;
}

Diagram build_drilling_model(const DrillingModelConfig& config)
{
    return build_diagram(drilling_model_spec(config));
}

bool is_drilling_model(const Diagram& d)
{
    if (d.size() != drilling_roster().size())
        return false;
    return std::all_of(drilling_roster().begin(), drilling_roster().end(), [&](std::string_view id) { return d.find(id).has_value(); });
}

BeliefsDocument default_drilling_beliefs()
{
    BeliefsDocument doc;
    doc.observed = {"DP", "DF"};
    doc.beliefs.distributions["DT"] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    doc.beliefs.distributions["DR"] = {0.5, 0.5};
    doc.uncertainty.quantities = {
        {QuantityKind::belief, "DT", {}, DirichletRule{{1.0, 1.0, 1.0}}},
        {QuantityKind::belief, "DR", {}, DirichletRule{{1.0, 1.0}}},
        {QuantityKind::utility_weights, "AU", {}, UniformRule{-0.02, 0.02}},
    };
    return doc;
}

}  // namespace aramaid
