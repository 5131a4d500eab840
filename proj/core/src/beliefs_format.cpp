#include "aramaid/model_format.hpp"

#include "aramaid/number.hpp"
#include "lexer.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace aramaid
{

namespace
{

using detail::Cursor;
using detail::Diagnostics;
using detail::Tok;
using detail::Token;

struct Located
{
    UncertainQuantity quantity;
    std::size_t line = 0;
    std::size_t column = 0;
};

std::optional<std::vector<double>> number_list(Cursor& cur, Diagnostics& diags)
{
    std::vector<double> out;
    while (true)
    {
        const Token* t = cur.word("number");
        if (!t)
            return std::nullopt;
        auto v = parse_number(t->text);
        if (!v)
        {
            diags.error(cur.line(), t->column, "malformed number '" + t->text + "'", t->text);
            return std::nullopt;
        }
        out.push_back(*v);
        const Token* sep = cur.peek();
        if (!sep || sep->kind != Tok::comma)
            return out;
        cur.next();
    }
}

std::optional<SamplingRule> rule(Cursor& cur, Diagnostics& diags)
{
    const Token* name = cur.identifier("sampling rule");
    if (!name)
        return std::nullopt;
    if (name->text == "point")
        return PointRule{};
    if (name->text == "dirichlet")
    {
        auto a = number_list(cur, diags);
        if (!a)
            return std::nullopt;
        return DirichletRule{*a};
    }
    if (name->text == "uniform")
    {
        auto a = number_list(cur, diags);
        if (!a)
            return std::nullopt;
        if (a->size() != 2)
        {
            diags.error(cur.line(), name->column, "uniform needs low,high", name->text);
            return std::nullopt;
        }
        return UniformRule{(*a)[0], (*a)[1]};
    }
    diags.error(cur.line(), name->column, "unknown sampling rule '" + name->text + "'", name->text);
    return std::nullopt;
}

std::optional<QuantityKind> quantity_kind(std::string_view s)
{
    if (s == "belief")
        return QuantityKind::belief;
    if (s == "cpt")
        return QuantityKind::cpt_row;
    if (s == "weights")
        return QuantityKind::utility_weights;
    if (s == "scale")
        return QuantityKind::value_scale;
    if (s == "root")
        return QuantityKind::value_root;
    if (s == "offset")
        return QuantityKind::value_offset;
    return std::nullopt;
}

std::string rule_text(const SamplingRule& r)
{
    if (std::holds_alternative<PointRule>(r))
        return "point";
    std::ostringstream os;
    if (const auto* dir = std::get_if<DirichletRule>(&r))
    {
        os << "dirichlet ";
        for (std::size_t i = 0; i < dir->concentration.size(); ++i)
            os << (i ? "," : "") << format_number(dir->concentration[i]);
    }
    else
    {
        const auto& u = std::get<UniformRule>(r);
        os << "uniform " << format_number(u.low) << "," << format_number(u.high);
    }
    return os.str();
}

}  // namespace

BeliefsParseResult parse_beliefs(std::string_view text, const Diagram& d)
{
    BeliefsParseResult result;
    Diagnostics diags;
    BeliefsDocument doc;
    std::vector<Located> located;
    std::map<std::string, std::size_t> belief_lines;
    bool has_observe = false;

    auto lookup = [&](const Token& t, std::size_t line) -> const CompiledNode* {
        auto i = d.find(t.text);
        if (!i)
        {
            diags.error(line, t.column, "undeclared node reference '" + t.text + "'", t.text);
            return nullptr;
        }
        return &d.node(*i);
    };

    detail::for_each_line(text, diags, [&](const std::vector<Token>& toks, std::size_t line) {
        Cursor cur(toks, line, diags);
        const Token* kw = cur.identifier("keyword");
        if (!kw)
            return;
        if (kw->text == "belief")
        {
            const Token* id = cur.identifier("node id");
            if (!id)
                return;
            if (const Token* bar = cur.peek(); bar && bar->kind == Tok::bar)
                cur.next();
            if (!cur.expect(Tok::colon, "':'"))
                return;
            auto items = cur.items();
            if (!cur.finish())
                return;
            const CompiledNode* n = lookup(*id, line);
            if (!n)
                return;
            if (belief_lines.count(n->id))
            {
                diags.error(line, id->column, "duplicate belief for " + n->id, n->id);
                return;
            }
            std::vector<double> probs(n->domain.size(), 0.0);
            std::vector<bool> given(n->domain.size(), false);
            double sum = 0.0;
            for (const auto& it : items)
            {
                auto idx = n->domain.index_of(it.key);
                auto p = parse_number(it.value);
                if (!idx)
                {
                    diags.error(line, it.column, "undeclared label '" + it.key + "' for " + n->id, it.key);
                    return;
                }
                if (!p || *p < 0.0)
                {
                    diags.error(line, it.value_column, "malformed probability '" + it.value + "'", it.value);
                    return;
                }
                if (given[*idx])
                {
                    diags.error(line, it.column, "outcome '" + it.key + "' repeated", it.key);
                    return;
                }
                given[*idx] = true;
                probs[*idx] = *p;
                sum += *p;
            }
            for (std::size_t i = 0; i < given.size(); ++i)
                if (!given[i])
                {
                    diags.error(line, id->column, "belief on " + n->id + " misses outcome '" + n->domain.labels[i] + "'", n->id);
                    return;
                }
            if (std::abs(sum - 1.0) > 1e-9)
            {
                diags.error(line, id->column, "belief on " + n->id + " sums to " + format_number(sum), n->id);
                return;
            }
            belief_lines[n->id] = line;
            doc.beliefs.distributions[n->id] = probs;
        }
        else if (kw->text == "observe")
        {
            has_observe = true;
            while (!cur.at_end())
            {
                const Token* id = cur.identifier("decision id");
                if (!id)
                    return;
                if (lookup(*id, line))
                    doc.observed.push_back(id->text);
            }
        }
        else if (kw->text == "sample")
        {
            const Token* what = cur.identifier("quantity");
            if (!what)
                return;
            auto kind = quantity_kind(what->text);
            if (!kind)
            {
                diags.error(line, what->column, "unknown quantity '" + what->text + "'", what->text);
                return;
            }
            const Token* id = cur.identifier("node id");
            if (!id)
                return;
            Located q;
            q.quantity.kind = *kind;
            q.quantity.node = id->text;
            q.line = line;
            q.column = id->column;
            const CompiledNode* n = lookup(*id, line);
            if (*kind == QuantityKind::cpt_row)
            {
                if (!cur.expect(Tok::bar, "'|'"))
                    return;
                auto tuple = cur.items();
                if (!cur.expect(Tok::colon, "':'"))
                    return;
                if (n)
                {
                    std::vector<std::string> row(n->parents.size());
                    std::vector<bool> filled(row.size(), false);
                    for (const auto& it : tuple)
                    {
                        std::size_t k = 0;
                        while (k < n->parents.size() && d.node(n->parents[k]).id != it.key)
                            ++k;
                        if (k == n->parents.size() || filled[k])
                        {
                            diags.error(line, it.column, it.key + " is not a parent of " + n->id, it.key);
                            return;
                        }
                        row[k] = it.value;
                        filled[k] = true;
                    }
                    for (std::size_t k = 0; k < filled.size(); ++k)
                        if (!filled[k])
                        {
                            diags.error(line, id->column, "row misses parent " + d.node(n->parents[k]).id, n->id);
                            return;
                        }
                    q.quantity.row = std::move(row);
                }
            }
            auto r = rule(cur, diags);
            if (!r || !cur.finish() || !n)
                return;
            q.quantity.rule = *r;
            located.push_back(std::move(q));
        }
        else
        {
            diags.error(line, kw->column, "unknown keyword '" + kw->text + "'", kw->text);
        }
    });

    if (!diags.has_errors())
    {
        const Agent* defender = d.agent_of_kind(AgentKind::defender);
        if (!has_observe && defender)
            for (auto i : d.decisions_of(defender->id))
                if (!doc.beliefs.distributions.count(d.node(i).id))
                    doc.observed.push_back(d.node(i).id);
        try
        {
            const Diagram view = attacker_view(d, doc.beliefs, doc.observed);
            for (const auto& q : located)
            {
                try
                {
                    check_uncertainty(view.spec(), ParameterUncertainty{{q.quantity}});
                    doc.uncertainty.quantities.push_back(q.quantity);
                }
                catch (const SamplingError& e)
                {
                    diags.error(q.line, q.column, e.what(), q.quantity.node);
                }
            }
        }
        catch (const Error& e)
        {
            diags.error(1, 1, e.what());
        }
    }

    result.diagnostics = diags.sorted();
    if (!diags.has_errors())
        result.document = std::move(doc);
    return result;
}

std::string serialize_beliefs(const BeliefsDocument& doc, const Diagram& d)
{
    std::ostringstream os;
    if (!doc.observed.empty())
    {
        os << "observe";
        for (const auto& o : doc.observed)
            os << " " << o;
        os << "\n";
    }
    for (const auto& [id, probs] : doc.beliefs.distributions)
    {
        const auto& n = d.node(d.index_of(id));
        os << "belief " << id << " :";
        for (std::size_t i = 0; i < probs.size(); ++i)
            os << (i ? "," : " ") << n.domain.labels[i] << "=" << format_number(probs[i]);
        os << "\n";
    }
    for (const auto& q : doc.uncertainty.quantities)
    {
        os << "sample " << (q.kind == QuantityKind::cpt_row ? "cpt" : to_string(q.kind)) << " " << q.node;
        if (q.kind == QuantityKind::cpt_row)
        {
            const auto& n = d.node(d.index_of(q.node));
            os << " | ";
            for (std::size_t k = 0; k < q.row.size(); ++k)
                os << (k ? "," : "") << d.node(n.parents[k]).id << "=" << q.row[k];
            os << " :";
        }
        os << " " << rule_text(q.rule) << "\n";
    }
    return os.str();
}

}  // namespace aramaid
