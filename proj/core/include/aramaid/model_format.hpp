#pragma once

#include "aramaid/ara.hpp"
#include "aramaid/diagram.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aramaid
{

enum class Severity
{
    error,
    warning,
};

std::string_view to_string(Severity severity);

struct ParseDiagnostic
{
    std::size_t line = 1;    // 1-based
    std::size_t column = 1;  // 1-based, bytes
    Severity severity = Severity::error;
    std::string message;
    std::string text;        // offending slice

    bool operator==(const ParseDiagnostic&) const = default;
};

/// `file:line:col: severity: message`
std::string format_diagnostic(std::string_view file, const ParseDiagnostic& d);

struct ParseResult
{
    std::optional<Diagram> diagram;
    std::vector<ParseDiagnostic> diagnostics;

    bool ok() const { return diagram.has_value(); }
};

/// Parses a `.maid` document. All diagnostics are collected; a diagram is
/// returned only when there are no errors.
ParseResult parse_model(std::string_view text);

/// Canonical text: agents, nodes in topological order, arcs, tables, values,
/// utilities, orders. Numbers use the shortest round-trip representation.
std::string serialize_model(const Diagram& d);

/// Attacker beliefs plus the defender's sampling rules for the attacker's
/// parameters.
struct BeliefsDocument
{
    AttackerBeliefs beliefs;
    ParameterUncertainty uncertainty;
    std::vector<std::string> observed;  // empty: every defender decision without a belief
};

struct BeliefsParseResult
{
    std::optional<BeliefsDocument> document;
    std::vector<ParseDiagnostic> diagnostics;

    bool ok() const { return document.has_value(); }
};

/// Parses a beliefs file against the diagram it applies to.
BeliefsParseResult parse_beliefs(std::string_view text, const Diagram& d);

std::string serialize_beliefs(const BeliefsDocument& doc, const Diagram& d);

}  // namespace aramaid
