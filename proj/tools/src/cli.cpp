#include "cli.hpp"

#include "aramaid/ara.hpp"
#include "aramaid/drilling.hpp"
#include "aramaid/inference.hpp"
#include "aramaid/model_format.hpp"
#include "aramaid/number.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

namespace aramaid::cli
{

namespace
{

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct IoFailure : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Model or domain failure already reported to the error stream.
struct Reported
{
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoFailure("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw IoFailure("cannot read " + path);
    return ss.str();
}

std::string sha256_hex(std::string_view bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i)
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return "sha256:" + os.str();
}

Diagram load_model(const std::string& path, const std::string& text, std::ostream& err)
{
    auto parsed = parse_model(text);
    for (const auto& d : parsed.diagnostics)
        err << format_diagnostic(path, d) << "\n";
    if (!parsed.ok())
        throw Reported{};
    return std::move(*parsed.diagram);
}

/// Splits `k=v` tokens; each token may itself hold a comma-separated list.
std::vector<std::pair<std::string, std::string>> key_values(const std::vector<std::string>& tokens)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& token : tokens)
    {
        std::stringstream ss(token);
        std::string part;
        while (std::getline(ss, part, ','))
        {
            if (part.empty())
                continue;
            auto eq = part.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 == part.size())
                throw Error("expected key=value, got '" + part + "'");
            out.emplace_back(part.substr(0, eq), part.substr(eq + 1));
        }
    }
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
    {
        if (!cell.empty() && cell.back() == '\r')
            cell.pop_back();
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

/// Reference values keyed by axis labels; the file needs the axis columns and `eu`.
std::map<std::vector<std::string>, double> read_reference(const std::string& path, const std::vector<EuAxis>& axes)
{
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line))
        throw Error(path + ": empty reference file");
    const auto header = split_csv_line(line);
    std::vector<std::size_t> cols;
    for (const auto& a : axes)
    {
        auto it = std::find(header.begin(), header.end(), a.node);
        if (it == header.end())
            throw Error(path + ": reference lacks column " + a.node);
        cols.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    auto eu_it = std::find(header.begin(), header.end(), "eu");
    if (eu_it == header.end())
        throw Error(path + ": reference lacks column eu");
    const auto eu_col = static_cast<std::size_t>(eu_it - header.begin());

    std::map<std::vector<std::string>, double> out;
    std::size_t lineno = 1;
    while (std::getline(in, line))
    {
        ++lineno;
        if (line.empty() || line == "\r")
            continue;
        auto cells = split_csv_line(line);
        std::vector<std::string> key;
        for (auto c : cols)
            key.push_back(c < cells.size() ? cells[c] : "");
        auto v = eu_col < cells.size() ? parse_number(cells[eu_col]) : std::nullopt;
        if (!v)
            throw Error(path + ":" + std::to_string(lineno) + ": malformed eu value");
        out[key] = *v;
    }
    return out;
}

json envelope(const std::string& command, const std::string& digest)
{
    return json{{"schema_version", 1}, {"command", command}, {"input_digest", digest}};
}

void emit_report(json report, Clock::time_point start, const std::string& report_path, std::ostream& err)
{
    const auto elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    report["duration_seconds"] = elapsed;
    if (report_path.empty())
        return;
    if (report_path == "-")
    {
        err << report.dump() << "\n";
        return;
    }
    std::ofstream f(report_path);
    if (!f)
        throw IoFailure("cannot write " + report_path);
    f << report.dump(2) << "\n";
}

// ---------------------------------------------------------------- validate

int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err)
{
    std::string text;
    try
    {
        text = read_file(path);
    }
    catch (const IoFailure& e)
    {
        err << e.what() << "\n";
        return kIoError;
    }
    auto parsed = parse_model(text);
    for (const auto& d : parsed.diagnostics)
        out << format_diagnostic(path, d) << "\n";
    if (!parsed.ok())
        return kModelError;
    out << "OK\n";
    return kOk;
}

// ------------------------------------------------------------------ tables

struct TablesArgs
{
    std::string file;
    std::string agent;
    std::vector<std::string> axes;
    std::string out = "csv";
    std::vector<std::string> fix;
    std::string compare;
    std::string engine = "elimination";
    std::string report = "-";
};

Engine parse_engine(const std::string& name)
{
    return name == "enumeration" ? Engine::enumeration : Engine::elimination;
}

int cmd_tables(const TablesArgs& a, std::ostream& out, std::ostream& err)
{
    const auto start = Clock::now();
    const std::string text = read_file(a.file);
    const Diagram d = load_model(a.file, text, err);

    Policy fixed;
    for (const auto& [k, v] : key_values(a.fix))
        fixed.fix(k, v);
    for (const auto& id : a.axes)
        if (!d.find(id))
            throw Error("unknown node id '" + id + "'");
    const EuTable t = decision_table(d, a.agent, a.axes, fixed, parse_engine(a.engine));

    std::map<std::vector<std::string>, double> ref;
    if (!a.compare.empty())
        ref = read_reference(a.compare, t.axes);

    json rows = json::array();
    std::ostringstream csv;
    for (const auto& ax : t.axes)
        csv << ax.node << ",";
    csv << "eu,is_max_in_group";
    if (!a.compare.empty())
        csv << ",reference,delta";
    csv << "\n";
    for (std::size_t c = 0; c < t.cells.size(); ++c)
    {
        const auto labels = t.labels_of(c);
        json row;
        for (std::size_t k = 0; k < labels.size(); ++k)
        {
            csv << labels[k] << ",";
            row[t.axes[k].node] = labels[k];
        }
        csv << format_number(t.cells[c]) << "," << (t.is_max[c] ? "true" : "false");
        row["eu"] = t.cells[c];
        row["is_max_in_group"] = static_cast<bool>(t.is_max[c]);
        if (!a.compare.empty())
        {
            auto it = ref.find(labels);
            if (it == ref.end())
            {
                csv << ",,";
                row["reference"] = nullptr;
                row["delta"] = nullptr;
            }
            else
            {
                csv << "," << format_number(it->second) << "," << format_number(t.cells[c] - it->second);
                row["reference"] = it->second;
                row["delta"] = t.cells[c] - it->second;
            }
        }
        csv << "\n";
        rows.push_back(std::move(row));
    }

    json report = envelope("tables", sha256_hex(text));
    report["agent"] = a.agent;
    report["axes"] = a.axes;
    report["result"] = rows;
    if (a.out == "json")
        out << report.dump(2) << "\n";
    else
        out << csv.str();
    emit_report(std::move(report), start, a.report, err);
    return kOk;
}

// ------------------------------------------------------------------- solve

struct SolveArgs
{
    std::string file;
    std::uint64_t draws = 10000;
    std::uint64_t seed = 1;
    std::string beliefs;
    std::string out = "csv";
    std::string engine = "elimination";
    std::string report = "-";
};

std::string context_text(const std::vector<std::string>& nodes, const std::vector<std::string>& labels)
{
    std::string s;
    for (std::size_t k = 0; k < nodes.size(); ++k)
        s += (k ? ";" : "") + nodes[k] + "=" + labels[k];
    return s;
}

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err)
{
    const auto start = Clock::now();
    const std::string text = read_file(a.file);
    const Diagram d = load_model(a.file, text, err);

    BeliefsDocument doc;
    std::string beliefs_digest;
    if (!a.beliefs.empty())
    {
        const std::string btext = read_file(a.beliefs);
        beliefs_digest = sha256_hex(btext);
        auto parsed = parse_beliefs(btext, d);
        for (const auto& diag : parsed.diagnostics)
            err << format_diagnostic(a.beliefs, diag) << "\n";
        if (!parsed.ok())
            throw Reported{};
        doc = std::move(*parsed.document);
    }
    else if (is_drilling_model(d))
    {
        doc = default_drilling_beliefs();
    }
    else
    {
        throw Error("no beliefs file given and this model has no built-in beliefs");
    }
    if (a.draws == 0)
        throw Error("--draws must be positive");

    ForecastOptions options;
    options.threads = thread_hint();
    options.engine = parse_engine(a.engine);
    const AttackForecast fc = forecast_attack(d, doc.beliefs, doc.uncertainty, a.draws, a.seed, options);
    const DefenderSolution sol = solve_defender(d, fc, options.engine);

    // Policy rows: decision, context of its parents, chosen alternative.
    struct RuleRow
    {
        std::string decision;
        std::string context;
        std::string choice;
    };
    std::vector<RuleRow> rule_rows;
    const Agent* defender = d.agent_of_kind(AgentKind::defender);
    for (auto i : d.decisions_of(defender->id))
    {
        const auto& n = d.node(i);
        const auto* rule = sol.policy.rule(n.id);
        std::vector<std::string> parents;
        std::vector<const Domain*> doms;
        for (auto p : n.parents)
        {
            parents.push_back(d.node(p).id);
            doms.push_back(&d.node(p).domain);
        }
        const auto tuples = label_tuples(doms);
        for (std::size_t c = 0; c < tuples.size(); ++c)
            rule_rows.push_back({n.id, context_text(parents, tuples[c]), rule->size() == 1 ? rule->front() : (*rule)[c]});
    }

    json report = envelope("solve", sha256_hex(text));
    if (!beliefs_digest.empty())
        report["beliefs_digest"] = beliefs_digest;
    report["seed"] = a.seed;
    report["draws"] = a.draws;
    json forecast = {{"decision", fc.decision}, {"context_nodes", fc.context_nodes}, {"alternatives", fc.alternatives}};
    json ctx_rows = json::array();
    for (std::size_t c = 0; c < fc.contexts.size(); ++c)
        ctx_rows.push_back({{"context", fc.contexts[c]}, {"probabilities", fc.probabilities[c]}});
    forecast["rows"] = ctx_rows;
    json policy = json::array();
    for (const auto& r : rule_rows)
        policy.push_back({{"decision", r.decision}, {"context", r.context}, {"choice", r.choice}});
    report["result"] = {{"forecast", forecast}, {"policy", policy}, {"expected_utility", sol.expected_utility}};

    if (a.out == "json")
    {
        out << report.dump(2) << "\n";
    }
    else
    {
        out << "# forecast\n";
        for (const auto& n : fc.context_nodes)
            out << n << ",";
        for (std::size_t k = 0; k < fc.alternatives.size(); ++k)
            out << "P(" << fc.alternatives[k] << ")" << (k + 1 < fc.alternatives.size() ? "," : "\n");
        for (std::size_t c = 0; c < fc.contexts.size(); ++c)
        {
            for (const auto& l : fc.contexts[c])
                out << l << ",";
            for (std::size_t k = 0; k < fc.alternatives.size(); ++k)
                out << format_number(fc.probabilities[c][k]) << (k + 1 < fc.alternatives.size() ? "," : "\n");
        }
        out << "# policy\ndecision,context,choice\n";
        for (const auto& r : rule_rows)
            out << r.decision << "," << r.context << "," << r.choice << "\n";
        out << "# expected_utility\neu\n" << format_number(sol.expected_utility) << "\n";
    }
    emit_report(std::move(report), start, a.report, err);
    return kOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs
{
    std::string file;
    std::string agent;
    std::vector<std::string> policy;
    std::vector<std::string> evidence;
    std::string engine = "elimination";
    std::string report = "-";
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err)
{
    const auto start = Clock::now();
    const std::string text = read_file(a.file);
    const Diagram d = load_model(a.file, text, err);
    Policy policy;
    for (const auto& [k, v] : key_values(a.policy))
        policy.fix(k, v);
    Evidence evidence;
    for (const auto& [k, v] : key_values(a.evidence))
        evidence[k] = v;
    const double eu = expected_utility(d, a.agent, policy, evidence, parse_engine(a.engine));
    out << format_fixed(eu, 6) << "\n";

    json report = envelope("evaluate", sha256_hex(text));
    report["agent"] = a.agent;
    report["result"] = {{"expected_utility", eu}};
    emit_report(std::move(report), start, a.report, err);
    return kOk;
}

}  // namespace

unsigned thread_hint()
{
    if (const char* env = std::getenv("ARA_MAID_THREADS"))
    {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n >= 1)
            return static_cast<unsigned>(std::min(n, 256L));
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Multi-agent influence diagrams with adversarial risk analysis", "ara-maid"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "ara-maid 1.0.0");

    const std::vector<std::string> engines{"elimination", "enumeration"};
    const std::vector<std::string> formats{"csv", "json"};

    std::string validate_file;
    auto* validate = app.add_subcommand("validate", "Check a .maid model and list diagnostics");
    validate->add_option("file", validate_file, "Model file")->required();

    TablesArgs ta;
    auto* tables = app.add_subcommand("tables", "Expected-utility table over the given axes");
    tables->add_option("file", ta.file, "Model file")->required();
    tables->add_option("--agent", ta.agent, "Agent whose utility is tabulated")->required();
    tables->add_option("--axes", ta.axes, "Comma-separated node ids")->required()->delimiter(',');
    tables->add_option("--out", ta.out, "Output format")->check(CLI::IsMember(formats));
    tables->add_option("--fix", ta.fix, "Decision fixed to an alternative, k=v");
    tables->add_option("--compare", ta.compare, "Reference CSV with the axis columns and eu");
    tables->add_option("--engine", ta.engine, "Inference engine")->check(CLI::IsMember(engines));
    tables->add_option("--report", ta.report, "Run report destination ('-' for stderr, '' to drop)");

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "Forecast the attack and optimize the defender");
    solve->add_option("file", sa.file, "Model file")->required();
    solve->add_option("--draws", sa.draws, "Monte Carlo draws")->check(CLI::PositiveNumber);
    solve->add_option("--seed", sa.seed, "Random seed");
    solve->add_option("--beliefs", sa.beliefs, "Beliefs file");
    solve->add_option("--out", sa.out, "Output format")->check(CLI::IsMember(formats));
    solve->add_option("--engine", sa.engine, "Inference engine")->check(CLI::IsMember(engines));
    solve->add_option("--report", sa.report, "Run report destination ('-' for stderr, '' to drop)");

    EvaluateArgs ea;
    auto* evaluate = app.add_subcommand("evaluate", "Expected utility of a full policy");
    evaluate->add_option("file", ea.file, "Model file")->required();
    evaluate->add_option("--agent", ea.agent, "Agent whose utility is evaluated")->required();
    evaluate->add_option("--policy", ea.policy, "Decision alternatives, k=v");
    evaluate->add_option("--evidence", ea.evidence, "Observed labels, k=v");
    evaluate->add_option("--engine", ea.engine, "Inference engine")->check(CLI::IsMember(engines));
    evaluate->add_option("--report", ea.report, "Run report destination ('-' for stderr, '' to drop)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try
    {
        app.parse(reversed);
    }
    catch (const CLI::CallForHelp&)
    {
        out << app.help();
        return kOk;
    }
    catch (const CLI::CallForAllHelp&)
    {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    }
    catch (const CLI::CallForVersion&)
    {
        out << "ara-maid 1.0.0\n";
        return kOk;
    }
    catch (const CLI::ParseError& e)
    {
        err << "ara-maid: " << e.what() << "\n";
        return kModelError;
    }

    try
    {
        if (*validate)
            return cmd_validate(validate_file, out, err);
        if (*tables)
            return cmd_tables(ta, out, err);
        if (*solve)
            return cmd_solve(sa, out, err);
        if (*evaluate)
            return cmd_evaluate(ea, out, err);
    }
    catch (const IoFailure& e)
    {
        err << "ara-maid: " << e.what() << "\n";
        return kIoError;
    }
    catch (const Reported&)
    {
        return kModelError;
    }
    catch (const std::exception& e)
    {
        err << "ara-maid: " << e.what() << "\n";
        return kModelError;
    }
    return kModelError;
}

}  // namespace aramaid::cli
