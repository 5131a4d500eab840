#pragma once

// Offshore drilling cybersecurity example: an APT attacker against a drilling
// operator, with the operator choosing protection, forensics, risk treatment
// and whether to keep drilling after an incident.

#include "aramaid/ara.hpp"
#include "aramaid/diagram.hpp"
#include "aramaid/model_format.hpp"

#include <array>
#include <string_view>

namespace aramaid
{

struct DrillingModelConfig
{
    bool attacker_observes_context = true;  // DP -> AP and DF -> AP
    bool include_uc_to_ap_arc = true;       // UC -> AP

    double avoid_cost = 10'000'000.0;
    double share_cost = 500'000.0;
    std::array<double, 3> accept_mapping{0.0, 500'000.0, 2'500'000.0};  // per UM outcome
    double protection_cost = 20'000.0;
    double forensic_cost = 10'000.0;
    double stop_cost = 300'000.0;
};

/// The 19 node ids of the example.
const std::array<std::string_view, 19>& drilling_roster();

DiagramSpec drilling_model_spec(const DrillingModelConfig& config = {});
Diagram build_drilling_model(const DrillingModelConfig& config = {});

/// Dollars the defender loses. Avoiding the risk costs a flat amount that
/// replaces every other component.
double defender_cost(const DrillingModelConfig& config,
                     std::string_view dp,
                     std::string_view df,
                     std::string_view dt,
                     std::string_view dr,
                     std::string_view um);

/// Cube root of the defender's loss over ten million; throws Error outside [0, 1e7].
double attacker_monetary_value(double dc);

/// 1 - dc / 1e7.
double defender_cost_value(double dc);

/// True when the diagram carries exactly the example's node roster.
bool is_drilling_model(const Diagram& d);

/// Built-in attacker beliefs for the example: the attacker sees DP and DF,
/// holds uniform beliefs about DT and DR; the defender is uncertain about
/// those beliefs (flat Dirichlet) and about the attacker's weights.
BeliefsDocument default_drilling_beliefs();

}  // namespace aramaid
