#include "aramaid/model_format.hpp"

#include "aramaid/number.hpp"
#include "lexer.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace aramaid
{

std::string_view to_string(Severity severity)
{
    return severity == Severity::error ? "error" : "warning";
}

std::string format_diagnostic(std::string_view file, const ParseDiagnostic& d)
{
    std::ostringstream os;
    os << file << ":" << d.line << ":" << d.column << ": " << to_string(d.severity) << ": " << d.message;
    return os.str();
}

namespace
{

using detail::Cursor;
using detail::Diagnostics;
using detail::Item;
using detail::Tok;
using detail::Token;

struct Ref
{
    std::string id;
    std::size_t line = 0;
    std::size_t column = 0;
};

struct RawAgent
{
    Ref id;
    AgentKind kind = AgentKind::defender;
    std::string name;
};

struct RawNode
{
    Ref id;
    NodeKind kind = NodeKind::chance;
    std::optional<Ref> agent;
    std::vector<std::string> domain;
    std::vector<double> money;
    bool has_money = false;
};

struct RawArc
{
    Ref src;
    Ref dst;
};

enum class RowKind
{
    cpt,
    det,
    value,
};

struct RawRow
{
    RowKind kind = RowKind::cpt;
    Ref node;
    std::vector<Item> tuple;
    std::vector<Item> outcomes;  // cpt: label=prob
    Ref label;                   // det
    double score = 0.0;          // value
};

struct RawValue
{
    Ref node;
    ValueForm form = ValueForm::table;
    std::optional<double> scale;
    std::optional<double> offset;
    std::optional<double> root;
    std::vector<Ref> zero;
    std::vector<Ref> one;
};

struct RawUtility
{
    Ref node;
    std::vector<Item> weights;
};

struct RawOrder
{
    Ref agent;
    std::vector<Ref> decisions;
};

Ref ref_of(const Token& t, std::size_t line)
{
    return {t.text, line, t.column};
}

/// Statement-level parse into raw records; references are resolved later.
class ModelReader
{
public:
    explicit ModelReader(Diagnostics& diags) : diags_(diags) {}

    void line(const std::vector<Token>& toks, std::size_t lineno)
    {
        Cursor cur(toks, lineno, diags_);
        const Token& kw = toks.front();
        if (kw.kind != Tok::word)
        {
            diags_.error(lineno, kw.column, "expected a keyword", kw.text);
            return;
        }
        cur.next();
        if (kw.text == "agent")
            agent(cur);
        else if (kw.text == "node")
            node(cur);
        else if (kw.text == "arc")
            arc(cur);
        else if (kw.text == "cpt")
            row(cur, RowKind::cpt);
        else if (kw.text == "det")
            row(cur, RowKind::det);
        else if (kw.text == "value")
            value(cur);
        else if (kw.text == "utility")
            utility(cur);
        else if (kw.text == "order")
            order(cur);
        else
            diags_.error(lineno, kw.column, "unknown keyword '" + kw.text + "'", kw.text);
    }

    std::vector<RawAgent> agents;
    std::vector<RawNode> nodes;
    std::vector<RawArc> arcs;
    std::vector<RawRow> rows;
    std::vector<RawValue> values;
    std::vector<RawUtility> utilities;
    std::vector<RawOrder> orders;
    std::set<std::string> declared;  // node ids declared so far
    std::set<std::string> broken_rows;

private:
    void agent(Cursor& cur)
    {
        const Token* id = cur.identifier("agent id");
        if (!id)
            return;
        RawAgent a;
        a.id = ref_of(*id, cur.line());
        bool has_kind = false;
        for (const auto& item : cur.items())
        {
            if (item.key == "kind")
            {
                auto k = parse_agent_kind(item.value);
                if (!k)
                {
                    diags_.error(cur.line(), item.column, "unknown agent kind '" + item.value + "'", item.value);
                    return;
                }
                a.kind = *k;
                has_kind = true;
            }
            else if (item.key == "name")
            {
                a.name = item.value;
            }
            else
            {
                diags_.error(cur.line(), item.column, "unknown agent attribute '" + item.key + "'", item.key);
                return;
            }
        }
        if (!cur.finish())
            return;
        if (!has_kind)
        {
            diags_.error(cur.line(), id->column, "agent " + id->text + " needs kind=", id->text);
            return;
        }
        agents.push_back(std::move(a));
    }

    void node(Cursor& cur)
    {
        const Token* id = cur.identifier("node id");
        if (!id)
            return;
        RawNode n;
        n.id = ref_of(*id, cur.line());
        bool has_kind = false;
        bool ok = true;
        for (const auto& item : cur.items(true))
        {
            if (item.key == "kind")
            {
                auto k = parse_node_kind(item.value);
                if (!k)
                {
                    diags_.error(cur.line(), item.column, "unknown node kind '" + item.value + "'", item.value);
                    ok = false;
                    continue;
                }
                n.kind = *k;
                has_kind = true;
            }
            else if (item.key == "agent")
            {
                n.agent = Ref{item.value, cur.line(), item.column};
            }
            else if (item.key == "domain")
            {
                n.domain = item.list;
                for (std::size_t i = 0; i < item.list.size(); ++i)
                    if (!detail::is_identifier(item.list[i]))
                    {
                        diags_.error(cur.line(), item.list_columns[i], "invalid label '" + item.list[i] + "'", item.list[i]);
                        ok = false;
                    }
            }
            else if (item.key == "money")
            {
                n.has_money = true;
                for (std::size_t i = 0; i < item.list.size(); ++i)
                {
                    auto v = parse_number(item.list[i]);
                    if (!v)
                    {
                        diags_.error(cur.line(), item.list_columns[i], "malformed number '" + item.list[i] + "'", item.list[i]);
                        ok = false;
                        continue;
                    }
                    n.money.push_back(*v);
                }
            }
            else
            {
                diags_.error(cur.line(), item.column, "unknown node attribute '" + item.key + "'", item.key);
                ok = false;
            }
        }
        if (!cur.finish() || !ok)
            return;
        if (!has_kind)
        {
            diags_.error(cur.line(), id->column, "node " + id->text + " needs kind=", id->text);
            return;
        }
        if (n.has_money && n.money.size() != n.domain.size())
        {
            diags_.error(cur.line(), id->column, "money= must tag every domain label of " + id->text, id->text);
            return;
        }
        declared.insert(n.id.id);
        nodes.push_back(std::move(n));
    }

    void arc(Cursor& cur)
    {
        const Token* src = cur.identifier("arc source");
        if (!src || !cur.expect(Tok::arrow, "'->'"))
            return;
        const Token* dst = cur.identifier("arc target");
        if (!dst || !cur.finish())
            return;
        arcs.push_back({ref_of(*src, cur.line()), ref_of(*dst, cur.line())});
    }

    void row(Cursor& cur, RowKind kind)
    {
        const Token* id = cur.identifier("node id");
        if (id && !row_body(cur, kind, *id))
            broken_rows.insert(id->text);
    }

    bool row_body(Cursor& cur, RowKind kind, const Token& tok)
    {
        const Token* id = &tok;
        RawRow r;
        r.kind = kind;
        r.node = ref_of(*id, cur.line());
        if (!tuple_and_colon(cur, r))
            return false;
        if (kind == RowKind::cpt)
        {
            r.outcomes = cur.items();
            if (r.outcomes.empty())
            {
                diags_.error(cur.line(), id->column, "cpt row of " + id->text + " lists no probabilities", id->text);
                return false;
            }
        }
        else
        {
            const Token* label = cur.identifier("output label");
            if (!label)
                return false;
            r.label = ref_of(*label, cur.line());
        }
        if (!cur.finish())
            return false;
        if (kind == RowKind::cpt)
            for (const auto& o : r.outcomes)
                if (!parse_number(o.value))
                {
                    diags_.error(cur.line(), o.value_column, "malformed number '" + o.value + "'", o.value);
                    return false;
                }
        check_declared(r.node);
        rows.push_back(std::move(r));
        return true;
    }

    bool tuple_and_colon(Cursor& cur, RawRow& r)
    {
        if (!cur.expect(Tok::bar, "'|'"))
            return false;
        r.tuple = cur.items();
        return cur.expect(Tok::colon, "':'");
    }

    void value(Cursor& cur)
    {
        const Token* id = cur.identifier("node id");
        if (!id)
            return;
        RawValue v;
        v.node = ref_of(*id, cur.line());
        bool has_form = false;
        bool ok = true;
        auto number = [&](const Item& item) -> std::optional<double> {
            auto x = parse_number(item.value);
            if (!x)
            {
                diags_.error(cur.line(), item.value_column, "malformed number '" + item.value + "'", item.value);
                ok = false;
            }
            return x;
        };
        for (const auto& item : cur.items(true))
        {
            if (item.key == "form")
            {
                auto f = parse_value_form(item.value);
                if (!f)
                {
                    diags_.error(cur.line(), item.value_column, "unknown value form '" + item.value + "'", item.value);
                    ok = false;
                    continue;
                }
                v.form = *f;
                has_form = true;
            }
            else if (item.key == "scale")
                v.scale = number(item);
            else if (item.key == "offset")
                v.offset = number(item);
            else if (item.key == "root")
                v.root = number(item);
            else if (item.key == "zero" || item.key == "one")
            {
                auto& set = item.key == "zero" ? v.zero : v.one;
                for (std::size_t i = 0; i < item.list.size(); ++i)
                    set.push_back({item.list[i], cur.line(), item.list_columns[i]});
            }
            else
            {
                diags_.error(cur.line(), item.column, "unknown value attribute '" + item.key + "'", item.key);
                ok = false;
            }
        }
        if (!ok)
            return;
        if (!has_form)
        {
            diags_.error(cur.line(), id->column, "value " + id->text + " needs form=", id->text);
            return;
        }
        check_declared(v.node);
        if (v.form == ValueForm::table)
        {
            RawRow r;
            r.kind = RowKind::value;
            r.node = v.node;
            if (!tuple_and_colon(cur, r))
                return;
            const Token* score = cur.word("score");
            if (!score || !cur.finish())
                return;
            auto x = parse_number(score->text);
            if (!x)
            {
                diags_.error(cur.line(), score->column, "malformed number '" + score->text + "'", score->text);
                return;
            }
            r.score = *x;
            rows.push_back(std::move(r));
        }
        else if (!cur.finish())
        {
            return;
        }
        values.push_back(std::move(v));
    }

    void utility(Cursor& cur)
    {
        const Token* id = cur.identifier("node id");
        if (!id)
            return;
        const Token* kw = cur.word("'weights'");
        if (!kw)
            return;
        if (kw->text != "weights")
        {
            diags_.error(cur.line(), kw->column, "expected 'weights'", kw->text);
            return;
        }
        RawUtility u;
        u.node = ref_of(*id, cur.line());
        u.weights = cur.items();
        if (!cur.finish())
            return;
        for (const auto& w : u.weights)
            if (!parse_number(w.value))
            {
                diags_.error(cur.line(), w.value_column, "malformed number '" + w.value + "'", w.value);
                return;
            }
        check_declared(u.node);
        utilities.push_back(std::move(u));
    }

    void order(Cursor& cur)
    {
        const Token* agent = cur.identifier("agent id");
        if (!agent)
            return;
        RawOrder o;
        o.agent = ref_of(*agent, cur.line());
        while (!cur.at_end())
        {
            const Token* d = cur.identifier("decision id");
            if (!d)
                return;
            o.decisions.push_back(ref_of(*d, cur.line()));
        }
        orders.push_back(std::move(o));
    }

    void check_declared(const Ref& node)
    {
        if (!declared.count(node.id))
            pending_.push_back(node);
    }

public:
    /// Rows and values whose node was not declared on an earlier line.
    const std::vector<Ref>& pending() const { return pending_; }

private:
    Diagnostics& diags_;
    std::vector<Ref> pending_;
};

std::string row_key(const std::string& node, const std::vector<std::string>& labels)
{
    std::string key = node + "|";
    for (const auto& l : labels)
        key += l + ",";
    return key;
}

}  // namespace

ParseResult parse_model(std::string_view text)
{
    ParseResult result;
    Diagnostics diags;
    ModelReader reader(diags);

    detail::for_each_line(text, diags, [&](const std::vector<Token>& toks, std::size_t lineno) { reader.line(toks, lineno); });

    // Nodes whose rows or declaration failed; their table violations would be noise.
    std::set<std::string> tainted;

    std::set<std::string> all_declared = reader.declared;
    for (const auto& ref : reader.pending())
    {
        if (all_declared.count(ref.id))
            diags.error(ref.line, ref.column, "row for " + ref.id + " precedes its node declaration", ref.id);
        else
            diags.error(ref.line, ref.column, "undeclared node reference '" + ref.id + "'", ref.id);
        tainted.insert(ref.id);
    }
    tainted.insert(reader.broken_rows.begin(), reader.broken_rows.end());

    DiagramSpec spec;
    std::map<std::string, std::size_t> agent_lines;
    for (const auto& a : reader.agents)
    {
        if (agent_lines.count(a.id.id))
        {
            diags.error(a.id.line, a.id.column, "duplicate agent '" + a.id.id + "'", a.id.id);
            continue;
        }
        agent_lines[a.id.id] = a.id.line;
        spec.agents.push_back({a.id.id, a.name, a.kind});
    }

    std::map<std::string, std::size_t> node_lines;
    std::map<std::string, std::size_t> node_index;
    for (const auto& n : reader.nodes)
    {
        if (node_lines.count(n.id.id))
        {
            diags.error(n.id.line, n.id.column, "duplicate node '" + n.id.id + "'", n.id.id);
            continue;
        }
        node_lines[n.id.id] = n.id.line;
        NodeSpec ns;
        ns.id = n.id.id;
        ns.kind = n.kind;
        if (n.agent)
        {
            if (!agent_lines.count(n.agent->id))
            {
                diags.error(n.agent->line, n.agent->column, "undeclared agent reference '" + n.agent->id + "'", n.agent->id);
                tainted.insert(ns.id);
            }
            else
            {
                ns.owner = n.agent->id;
            }
        }
        ns.domain.labels = n.domain;
        ns.domain.numeric_tags = n.money;
        switch (n.kind)
        {
        case NodeKind::chance:
            ns.payload = Cpt{};
            break;
        case NodeKind::deterministic:
            ns.payload = DetTable{};
            break;
        default:
            break;
        }
        node_index[ns.id] = spec.nodes.size();
        spec.nodes.push_back(std::move(ns));
    }
    auto find = [&](const std::string& id) -> NodeSpec* {
        auto it = node_index.find(id);
        return it == node_index.end() ? nullptr : &spec.nodes[it->second];
    };

    for (const auto& a : reader.arcs)
    {
        NodeSpec* src = find(a.src.id);
        NodeSpec* dst = find(a.dst.id);
        if (!src)
            diags.error(a.src.line, a.src.column, "undeclared node reference '" + a.src.id + "'", a.src.id);
        if (!dst)
            diags.error(a.dst.line, a.dst.column, "undeclared node reference '" + a.dst.id + "'", a.dst.id);
        if (!src || !dst)
        {
            if (dst)
                tainted.insert(dst->id);
            continue;
        }
        if (std::count(dst->parents.begin(), dst->parents.end(), src->id))
        {
            diags.error(a.src.line, a.src.column, "duplicate arc " + a.src.id + " -> " + a.dst.id, a.src.id);
            continue;
        }
        dst->parents.push_back(src->id);
    }

    // Table rows.
    std::map<std::string, std::size_t> row_lines;
    for (const auto& r : reader.rows)
    {
        NodeSpec* n = find(r.node.id);
        if (!n)
            continue;  // reported as pending
        const NodeKind want = r.kind == RowKind::cpt ? NodeKind::chance
                            : r.kind == RowKind::det ? NodeKind::deterministic
                                                     : NodeKind::value;
        if (n->kind != want)
        {
            diags.error(r.node.line, r.node.column,
                        "node " + n->id + " is a " + std::string(to_string(n->kind)) + " node", r.node.id);
            tainted.insert(n->id);
            continue;
        }

        // Order the tuple by the node's parents.
        std::vector<std::string> labels(n->parents.size());
        std::vector<bool> filled(n->parents.size(), false);
        bool ok = true;
        for (const auto& item : r.tuple)
        {
            auto it = std::find(n->parents.begin(), n->parents.end(), item.key);
            if (it == n->parents.end())
            {
                diags.error(r.node.line, item.column,
                            (find(item.key) ? item.key + " is not a parent of " + n->id
                                            : "undeclared node reference '" + item.key + "'"),
                            item.key);
                ok = false;
                continue;
            }
            auto k = static_cast<std::size_t>(it - n->parents.begin());
            if (filled[k])
            {
                diags.error(r.node.line, item.column, "parent " + item.key + " repeated in row", item.key);
                ok = false;
                continue;
            }
            const NodeSpec* p = find(item.key);
            if (!p->domain.index_of(item.value))
            {
                diags.error(r.node.line, item.value_column,
                            "undeclared label '" + item.value + "' for " + item.key, item.value);
                ok = false;
                continue;
            }
            labels[k] = item.value;
            filled[k] = true;
        }
        if (ok)
            for (std::size_t k = 0; k < filled.size(); ++k)
                if (!filled[k])
                {
                    diags.error(r.node.line, r.node.column, "row of " + n->id + " misses parent " + n->parents[k], r.node.id);
                    ok = false;
                }
        if (!ok)
        {
            tainted.insert(n->id);
            continue;
        }
        const std::string key = row_key(n->id, labels);
        if (row_lines.count(key))
        {
            diags.error(r.node.line, r.node.column, "duplicate row for " + n->id, r.node.id);
            continue;
        }
        row_lines[key] = r.node.line;

        if (r.kind == RowKind::cpt)
        {
            std::vector<double> probs(n->domain.size(), 0.0);
            std::vector<bool> given(n->domain.size(), false);
            for (const auto& o : r.outcomes)
            {
                auto idx = n->domain.index_of(o.key);
                if (!idx)
                {
                    diags.error(r.node.line, o.column, "undeclared label '" + o.key + "' for " + n->id, o.key);
                    ok = false;
                    continue;
                }
                if (given[*idx])
                {
                    diags.error(r.node.line, o.column, "outcome '" + o.key + "' repeated", o.key);
                    ok = false;
                    continue;
                }
                given[*idx] = true;
                probs[*idx] = *parse_number(o.value);
            }
            for (std::size_t i = 0; ok && i < given.size(); ++i)
                if (!given[i])
                {
                    diags.error(r.node.line, r.node.column,
                                "row of " + n->id + " misses outcome '" + n->domain.labels[i] + "'", r.node.id);
                    ok = false;
                }
            if (!ok)
            {
                tainted.insert(n->id);
                continue;
            }
            std::get<Cpt>(n->payload).rows.push_back({labels, probs});
        }
        else if (r.kind == RowKind::det)
        {
            if (!n->domain.index_of(r.label.id))
            {
                diags.error(r.label.line, r.label.column, "undeclared label '" + r.label.id + "' for " + n->id, r.label.id);
                tainted.insert(n->id);
                continue;
            }
            std::get<DetTable>(n->payload).rows.push_back({labels, r.label.id});
        }
        else
        {
            if (!std::holds_alternative<ValueSpec>(n->payload))
                n->payload = ValueSpec{};
            std::get<ValueSpec>(n->payload).rows.push_back({labels, r.score});
        }
    }

    // Value forms.
    std::map<std::string, std::size_t> value_lines;
    for (const auto& v : reader.values)
    {
        NodeSpec* n = find(v.node.id);
        if (!n)
            continue;
        if (n->kind != NodeKind::value)
        {
            diags.error(v.node.line, v.node.column, "node " + n->id + " is not a value node", v.node.id);
            continue;
        }
        auto [it, fresh] = value_lines.emplace(n->id, v.node.line);
        if (!fresh)
        {
            auto& existing = std::get<ValueSpec>(n->payload);
            if (existing.form != ValueForm::table || v.form != ValueForm::table)
            {
                diags.error(v.node.line, v.node.column, "value node " + n->id + " declared twice", v.node.id);
                tainted.insert(n->id);
            }
            continue;
        }
        if (!std::holds_alternative<ValueSpec>(n->payload))
            n->payload = ValueSpec{};
        auto& spec_value = std::get<ValueSpec>(n->payload);
        spec_value.form = v.form;
        if (v.form == ValueForm::linear || v.form == ValueForm::power_root)
        {
            if (!v.scale)
            {
                diags.error(v.node.line, v.node.column, "value " + n->id + " needs scale=", v.node.id);
                tainted.insert(n->id);
            }
            spec_value.scale = v.scale.value_or(1.0);
        }
        if (v.form == ValueForm::linear)
            spec_value.offset = v.offset.value_or(1.0);
        if (v.form == ValueForm::power_root)
        {
            if (!v.root)
            {
                diags.error(v.node.line, v.node.column, "value " + n->id + " needs root=", v.node.id);
                tainted.insert(n->id);
            }
            spec_value.root = v.root.value_or(1.0);
        }
        if (v.form == ValueForm::indicator)
        {
            for (const auto& z : v.zero)
                spec_value.zero_labels.push_back(z.id);
            for (const auto& o : v.one)
                spec_value.one_labels.push_back(o.id);
        }
    }

    std::map<std::string, std::size_t> utility_lines;
    for (const auto& u : reader.utilities)
    {
        NodeSpec* n = find(u.node.id);
        if (!n)
            continue;
        if (n->kind != NodeKind::utility)
        {
            diags.error(u.node.line, u.node.column, "node " + n->id + " is not a utility node", u.node.id);
            continue;
        }
        if (!utility_lines.emplace(n->id, u.node.line).second)
        {
            diags.error(u.node.line, u.node.column, "utility " + n->id + " declared twice", u.node.id);
            continue;
        }
        UtilitySpec us;
        for (const auto& w : u.weights)
        {
            if (!find(w.key))
            {
                diags.error(u.node.line, w.column, "undeclared node reference '" + w.key + "'", w.key);
                tainted.insert(n->id);
                continue;
            }
            us.weights.emplace_back(w.key, *parse_number(w.value));
        }
        n->payload = std::move(us);
    }

    std::map<std::string, std::size_t> order_lines;
    for (const auto& o : reader.orders)
    {
        if (!agent_lines.count(o.agent.id))
        {
            diags.error(o.agent.line, o.agent.column, "undeclared agent reference '" + o.agent.id + "'", o.agent.id);
            continue;
        }
        DecisionOrder order{o.agent.id, {}};
        for (const auto& d : o.decisions)
        {
            if (!find(d.id))
            {
                diags.error(d.line, d.column, "undeclared node reference '" + d.id + "'", d.id);
                continue;
            }
            order.decisions.push_back(d.id);
        }
        order_lines.emplace(o.agent.id, o.agent.line);
        spec.orders.push_back(std::move(order));
    }

    for (const auto& [id, line] : agent_lines)
    {
        if (spec.find_node(id) == nullptr && std::any_of(spec.agents.begin(), spec.agents.end(), [&](const Agent& a) {
                return a.id == id && a.kind == AgentKind::nature;
            }))
            continue;
        bool owns = std::any_of(spec.nodes.begin(), spec.nodes.end(), [&](const NodeSpec& n) { return n.owner == id; });
        if (!owns)
            diags.warning(line, 1, "agent " + id + " owns no nodes", id);
    }

    // Structural validation, surfaced at the most specific line available.
    for (const auto& v : validate_diagram(spec))
    {
        if (!v.node.empty() && tainted.count(v.node))
            continue;
        if (v.code == ViolationCode::no_nodes && !reader.nodes.empty())
            continue;
        std::size_t line = 1;
        if (!v.row.empty() || v.code == ViolationCode::non_stochastic_row)
        {
            auto it = row_lines.find(row_key(v.node, v.row));
            if (it != row_lines.end())
                line = it->second;
            else if (node_lines.count(v.node))
                line = node_lines[v.node];
        }
        else if (v.code == ViolationCode::temporal_order)
        {
            const NodeSpec* n = spec.find_node(v.node);
            if (n && n->owner && order_lines.count(*n->owner))
                line = order_lines[*n->owner];
            else if (node_lines.count(v.node))
                line = node_lines[v.node];
        }
        else if (v.code == ViolationCode::bad_utility && utility_lines.count(v.node))
            line = utility_lines[v.node];
        else if (v.code == ViolationCode::bad_value_spec && value_lines.count(v.node))
            line = value_lines[v.node];
        else if (node_lines.count(v.node))
            line = node_lines[v.node];
        diags.error(line, 1, v.message, v.node);
    }

    result.diagnostics = diags.sorted();
    if (diags.has_errors())
        return result;
    try
    {
        result.diagram = build_diagram(std::move(spec));
    }
    catch (const InvalidDiagram& e)
    {
        for (const auto& v : e.violations())
            result.diagnostics.push_back({1, 1, Severity::error, v.message, v.node});
    }
    return result;
}

namespace
{

std::string join_labels(const std::vector<std::string>& labels)
{
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i)
        out += (i ? "," : "") + labels[i];
    return out;
}

// " | a=x,b=y : " with the single space kept for parentless rows.
std::string tuple_text(const NodeSpec& n, const std::vector<std::string>& labels)
{
    std::string out = " | ";
    for (std::size_t i = 0; i < labels.size(); ++i)
        out += (i ? "," : "") + n.parents[i] + "=" + labels[i];
    return out + (labels.empty() ? ": " : " : ");
}

std::string quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s)
        if (c != '"')
            out += c;
    return out + "\"";
}

}  // namespace

std::string serialize_model(const Diagram& d)
{
    const DiagramSpec& spec = d.spec();
    std::ostringstream os;
    for (const auto& a : spec.agents)
    {
        os << "agent " << a.id << " kind=" << to_string(a.kind);
        if (!a.display_name.empty())
            os << " name=" << quote(a.display_name);
        os << "\n";
    }

    std::vector<const NodeSpec*> order;
    for (auto i : d.topological_order())
        order.push_back(spec.find_node(d.node(i).id));

    for (const NodeSpec* n : order)
    {
        os << "node " << n->id << " kind=" << to_string(n->kind);
        if (n->owner)
            os << " agent=" << *n->owner;
        if (!n->domain.labels.empty())
            os << " domain=" << join_labels(n->domain.labels);
        if (n->domain.has_tags())
        {
            os << " money=";
            for (std::size_t i = 0; i < n->domain.numeric_tags.size(); ++i)
                os << (i ? "," : "") << format_number(n->domain.numeric_tags[i]);
        }
        os << "\n";
    }
    for (const NodeSpec* n : order)
        for (const auto& p : n->parents)
            os << "arc " << p << " -> " << n->id << "\n";
    for (const NodeSpec* n : order)
    {
        if (const auto* cpt = std::get_if<Cpt>(&n->payload))
            for (const auto& r : cpt->rows)
            {
                os << "cpt " << n->id << tuple_text(*n, r.parent_labels);
                for (std::size_t i = 0; i < r.probabilities.size(); ++i)
                    os << (i ? "," : "") << n->domain.labels[i] << "=" << format_number(r.probabilities[i]);
                os << "\n";
            }
        else if (const auto* det = std::get_if<DetTable>(&n->payload))
            for (const auto& r : det->rows)
                os << "det " << n->id << tuple_text(*n, r.parent_labels) << r.label << "\n";
    }
    for (const NodeSpec* n : order)
    {
        const auto* v = std::get_if<ValueSpec>(&n->payload);
        if (!v)
            continue;
        switch (v->form)
        {
        case ValueForm::table:
            for (const auto& r : v->rows)
                os << "value " << n->id << " form=table" << tuple_text(*n, r.parent_labels)
                   << format_number(r.score) << "\n";
            break;
        case ValueForm::linear:
            os << "value " << n->id << " form=linear scale=" << format_number(v->scale)
               << " offset=" << format_number(v->offset) << "\n";
            break;
        case ValueForm::power_root:
            os << "value " << n->id << " form=power_root scale=" << format_number(v->scale)
               << " root=" << format_number(v->root) << "\n";
            break;
        case ValueForm::indicator:
            os << "value " << n->id << " form=indicator";
            if (!v->zero_labels.empty())
                os << " zero=" << join_labels(v->zero_labels);
            if (!v->one_labels.empty())
                os << " one=" << join_labels(v->one_labels);
            os << "\n";
            break;
        }
    }
    for (const NodeSpec* n : order)
    {
        const auto* u = std::get_if<UtilitySpec>(&n->payload);
        if (!u)
            continue;
        os << "utility " << n->id << " weights";
        for (const auto& [node, w] : u->weights)
            os << " " << node << "=" << format_number(w);
        os << "\n";
    }
    for (const auto& o : spec.orders)
    {
        os << "order " << o.agent;
        for (const auto& dec : o.decisions)
            os << " " << dec;
        os << "\n";
    }
    return os.str();
}

}  // namespace aramaid
