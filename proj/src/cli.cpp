#include "kglab/cli.hpp"

#include "kglab/analysis.hpp"
#include "kglab/lattice.hpp"
#include "kglab/limsup.hpp"
#include "kglab/psi.hpp"
#include "kglab/sampling.hpp"
#include "kglab/slab.hpp"
#include "kglab/structure.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace kglab::cli {

namespace {

using json = nlohmann::ordered_json;

struct RunConfig {
    std::string subcommand;
    int n = 0;
    std::string psi;
    std::string window;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
    std::string format = "csv";
    std::string out;
    int threads = 0;
    bool timing = false;
    std::string json_config;

    // classify
    double c = 0.0;
    std::int64_t kmax = 10000;
    // shells
    std::int64_t k = 0;
    bool list = false;
    // slab
    std::string q;
    double delta = 0.0;
    // count
    std::string x;
    std::int64_t Q = 0;
    std::string Q_list;
    std::uint64_t points = 0;
    // lift
    std::uint64_t instances = 10;
    std::string x_hat;
    std::string q_hat;
    double C = 0.0;
    // theorem
    std::string windows;
    std::string N_list;
    std::int64_t N = 0;
    double threshold = std::numeric_limits<double>::quiet_NaN();
    // dim
    int m = 0;
    double tau = 0.0;
};

json params_json(const RunConfig& c)
{
    auto opt_str = [](const std::string& s) { return s.empty() ? json(nullptr) : json(s); };
    return json{{"subcommand", c.subcommand},
                {"n", c.n > 0 ? json(c.n) : json(nullptr)},
                {"psi", opt_str(c.psi)},
                {"window", opt_str(c.window)},
                {"samples", c.samples},
                {"seed", c.seed},
                {"format", c.format},
                {"out", opt_str(c.out)},
                {"threads", c.threads},
                {"timing", c.timing},
                {"c", c.c > 0.0 ? json(c.c) : json(nullptr)},
                {"kmax", c.kmax},
                {"k", c.k > 0 ? json(c.k) : json(nullptr)},
                {"list", c.list},
                {"q", opt_str(c.q)},
                {"delta", c.delta > 0.0 ? json(c.delta) : json(nullptr)},
                {"x", opt_str(c.x)},
                {"Q", c.Q > 0 ? json(c.Q) : json(nullptr)},
                {"Q_list", opt_str(c.Q_list)},
                {"points", c.points},
                {"instances", c.instances},
                {"x_hat", opt_str(c.x_hat)},
                {"q_hat", opt_str(c.q_hat)},
                {"C", c.C > 0.0 ? json(c.C) : json(nullptr)},
                {"windows", opt_str(c.windows)},
                {"N_list", opt_str(c.N_list)},
                {"N", c.N > 0 ? json(c.N) : json(nullptr)},
                {"threshold", std::isnan(c.threshold) ? json(nullptr) : json(c.threshold)},
                {"m", c.m > 0 ? json(c.m) : json(nullptr)},
                {"tau", c.tau > 0.0 ? json(c.tau) : json(nullptr)}};
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
};

struct Output {
    Table table;
    json results;  // null: derived from the table rows
    std::vector<std::string> warnings;
};

// ---------------------------------------------------------------------------
// argument helpers

template <class T>
T parse_number(std::string_view s, std::string_view what)
{
    T v{};
    const auto* b = s.data();
    const auto* e = s.data() + s.size();
    while (b < e && *b == ' ')
        ++b;
    while (e > b && e[-1] == ' ')
        --e;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || b == e)
        throw std::invalid_argument(std::string(what) + ": cannot parse '" + std::string(s) + "'");
    return v;
}

template <class T>
std::vector<T> parse_list(std::string_view s, std::string_view what, char sep = ',')
{
    std::vector<T> out;
    while (true) {
        const auto pos = s.find(sep);
        out.push_back(parse_number<T>(s.substr(0, pos), what));
        if (pos == std::string_view::npos)
            break;
        s.remove_prefix(pos + 1);
    }
    return out;
}

TruncationWindow parse_window(const std::string& s, std::string_view what = "--window")
{
    const auto v = parse_list<std::int64_t>(s, what);
    if (v.size() != 2)
        throw std::invalid_argument(std::string(what) + " expects N,Q");
    return TruncationWindow(v[0], v[1]);
}

void require(bool ok, const std::string& msg)
{
    if (!ok)
        throw std::invalid_argument(msg);
}

std::string join(std::span<const double> v)
{
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            s += ',';
        s += json(v[i]).dump();
    }
    return s + ")";
}

json wide_json(WideCount v)
{
    if (v <= std::numeric_limits<std::uint64_t>::max())
        return json(static_cast<std::uint64_t>(v));
    return json(to_string(v));
}

// ---------------------------------------------------------------------------
// subcommands

Output run_classify(const RunConfig& c)
{
    require(c.n >= 2, "classify needs --n >= 2");
    require(!c.psi.empty(), "classify needs --psi");
    const auto spec = parse_psi(c.psi);
    const auto cls = classify_critical_sum(c.n, spec);
    const auto cert = c.c > 0.0 ? slow_decrease_scan(spec, c.c, c.kmax)
                                : slow_decrease_scan_reciprocal(spec, c.n, c.kmax);
    const auto branch = predict_branch(c.n, spec);
    Output o;
    o.table.columns = {"n", "psi", "critical_sum", "slow_c", "empirical_K", "analytic_K",
                       "slow_verdict", "k_scanned", "branch"};
    o.table.rows.push_back({c.n, to_string(spec), std::string(to_string(cls)), cert.c,
                            cert.empirical_K,
                            cert.analytic_K ? json(*cert.analytic_K) : json(nullptr),
                            std::string(to_string(cert.verdict)), cert.k_scanned,
                            std::string(to_string(branch))});
    return o;
}

Output run_shells(const RunConfig& c)
{
    require(c.n >= 1, "shells needs --n >= 1");
    require(c.k > 0 || c.kmax > 0, "shells needs --k or --kmax");
    Output o;
    if (c.list) {
        require(c.k > 0, "shells --list needs --k");
        o.table.columns = {"n", "k", "index", "q"};
        std::int64_t i = 0;
        for (auto&& q : shell_iter(c.n, c.k))
            o.table.rows.push_back({c.n, c.k, i++, to_string(q)});
        return o;
    }
    o.table.columns = {"n", "k", "shell_count", "canonical_count"};
    const std::int64_t first = c.k > 0 ? c.k : 1;
    const std::int64_t last = c.k > 0 ? c.k : c.kmax;
    for (std::int64_t k = first; k <= last; ++k) {
        const auto sc = shell_count(c.n, k);
        o.table.rows.push_back({c.n, k, wide_json(sc), wide_json(sc / 2)});
    }
    return o;
}

Output run_slab(const RunConfig& c)
{
    require(!c.q.empty(), "slab needs --q");
    require(c.delta > 0.0, "slab needs --delta > 0");
    const Slab slab(LatticeVector(parse_list<std::int64_t>(c.q, "--q")), c.delta);
    double value = 0.0;
    double std_error = 0.0;
    std::string method = "exact";
    Output o;
    try {
        value = slab_volume_exact(slab);
    } catch (const std::range_error& e) {
        const auto est = slab_volume_monte_carlo(slab, c.samples, c.seed);
        value = est.value;
        std_error = est.std_error;
        method = "monte-carlo";
        o.warnings.push_back(std::string(e.what()) + "; using Monte-Carlo");
    }
    const double bound = slab_volume_bound(slab);
    o.table.columns = {"n", "q", "delta", "exact", "bound", "difference", "height_multiplicity",
                       "method", "std_error"};
    o.table.rows.push_back({slab.dim(), to_string(slab.normal()), c.delta, value, bound,
                            bound - value, height_multiplicity(slab.normal()), method, std_error});
    return o;
}

Output run_count(const RunConfig& c)
{
    require(!c.psi.empty(), "count needs --psi");
    const auto spec = parse_psi(c.psi);
    Output o;
    if (!c.x.empty()) {
        const auto x = parse_list<double>(c.x, "--x");
        require(c.Q >= 1, "count needs --Q >= 1");
        require(c.n == 0 || c.n == static_cast<int>(x.size()), "--n disagrees with the dimension of --x");
        const int n = static_cast<int>(x.size());
        require(n >= 2, "count needs a point of dimension >= 2");
        const auto count = count_solutions(x, c.Q, spec);
        const double crit = critical_partial_sum(n, spec, c.Q);
        o.table.columns = {"n", "psi", "x", "Q", "count", "critical_sum", "ratio"};
        o.table.rows.push_back({n, to_string(spec), join(x), c.Q, count, crit,
                                static_cast<double>(count) / crit});
        return o;
    }
    require(c.points > 0, "count needs --x or --points");
    require(c.n >= 2, "count --points needs --n >= 2");
    require(!c.Q_list.empty() || c.Q > 0, "count --points needs --Q-list or --Q");
    const auto qs = c.Q_list.empty() ? std::vector<std::int64_t>{c.Q}
                                     : parse_list<std::int64_t>(c.Q_list, "--Q-list");
    const auto t = counting_ratio_stats(qs, spec, c.n, c.points, c.seed, c.threads);
    if (t.warning)
        o.warnings.push_back(*t.warning);
    o.table.columns = {"n", "psi", "Q", "points", "points_used", "points_excluded", "min_ratio",
                       "median_ratio", "seed"};
    for (const auto& r : t.rows)
        o.table.rows.push_back({c.n, to_string(spec), r.Q, c.points, r.points_used,
                                t.points_excluded, r.min_ratio, r.median_ratio, c.seed});
    return o;
}

Output run_measure(const RunConfig& c)
{
    require(c.n >= 2, "measure needs --n >= 2");
    require(!c.psi.empty(), "measure needs --psi");
    require(!c.window.empty(), "measure needs --window N,Q");
    require(c.samples >= 1, "measure needs --samples >= 1");
    const auto spec = parse_psi(c.psi);
    const auto w = parse_window(c.window);
    const auto e = estimate_measure(w, spec, c.n, c.samples, c.seed, c.threads);
    Output o;
    o.table.columns = {"n", "psi", "N", "Q", "samples", "seed", "value", "std_error", "elapsed_s"};
    o.table.rows.push_back({c.n, to_string(spec), w.lo(), w.hi(), e.samples, e.seed, e.value,
                            e.std_error, c.timing ? e.elapsed : 0.0});
    return o;
}

void push_lift_row(Output& o, const LiftInput& in, const LiftResult& r)
{
    o.table.rows.push_back({join(in.x_hat), to_string(in.q_hat), in.C, to_string(r.q), r.residual,
                            r.psi_at_height, std::string(to_string(r.kind)),
                            r.index_j ? json(*r.index_j) : json(nullptr)});
}

Output run_lift(const RunConfig& c)
{
    require(c.n >= 2, "lift needs --n >= 2");
    require(!c.psi.empty(), "lift needs --psi");
    const auto spec = parse_psi(c.psi);
    const auto w = c.window.empty() ? TruncationWindow(1, 50) : parse_window(c.window);
    const double C = c.C > 0.0 ? c.C : lift_constant(spec, c.n, c.n * w.hi() + 1);
    Output o;
    o.table.columns = {"x_hat", "q_hat", "C", "q", "abs_qx", "psi_q", "case", "index_j"};

    if (!c.x_hat.empty() || !c.q_hat.empty()) {
        require(!c.x_hat.empty() && !c.q_hat.empty(), "lift needs both --x-hat and --q-hat");
        LiftInput in{parse_list<double>(c.x_hat, "--x-hat"),
                     LatticeVector(parse_list<std::int64_t>(c.q_hat, "--q-hat")), C};
        push_lift_row(o, in, lift_witness(in, spec, c.n));
        return o;
    }

    const std::uint64_t max_draws = 100 * c.instances + 100;
    std::uint64_t produced = 0;
    std::uint64_t draws = 0;
    std::vector<double> x(static_cast<std::size_t>(c.n - 1));
    for (std::uint64_t b = 0; produced < c.instances && draws < max_draws; ++b) {
        BlockSampler sampler(c.seed, b, c.n - 1);
        for (std::uint64_t i = 0; i < kSampleBlock && produced < c.instances && draws < max_draws; ++i) {
            sampler.draw(x);
            ++draws;
            auto q_hat = classical_membership(x, w, spec, C);
            if (!q_hat)
                continue;
            LiftInput in{x, std::move(*q_hat), C};
            push_lift_row(o, in, lift_witness(in, spec, c.n));
            ++produced;
        }
    }
    if (produced < c.instances)
        o.warnings.push_back("found " + std::to_string(produced) + " liftable face points in " +
                             std::to_string(draws) + " draws");
    return o;
}

std::vector<TruncationWindow> parse_schedule(const RunConfig& c)
{
    std::vector<TruncationWindow> s;
    if (!c.windows.empty()) {
        std::string_view rest = c.windows;
        while (true) {
            const auto pos = rest.find(';');
            s.push_back(parse_window(std::string(rest.substr(0, pos)), "--windows"));
            if (pos == std::string_view::npos)
                break;
            rest.remove_prefix(pos + 1);
        }
    } else if (!c.N_list.empty()) {
        require(c.Q > 0, "theorem --N-list needs --Q");
        for (const auto N : parse_list<std::int64_t>(c.N_list, "--N-list"))
            s.emplace_back(N, c.Q);
    } else if (!c.Q_list.empty()) {
        require(c.N > 0, "theorem --Q-list needs --N");
        for (const auto Q : parse_list<std::int64_t>(c.Q_list, "--Q-list"))
            s.emplace_back(c.N, Q);
    } else {
        throw std::invalid_argument("theorem needs --windows, --N-list with --Q, or --Q-list with --N");
    }
    return s;
}

Output run_theorem(const RunConfig& c)
{
    require(c.n >= 2, "theorem needs --n >= 2");
    require(!c.psi.empty(), "theorem needs --psi");
    TheoremExperiment exp{.n = c.n,
                          .spec = parse_psi(c.psi),
                          .schedule = parse_schedule(c),
                          .samples = c.samples,
                          .seed = c.seed,
                          .threads = c.threads,
                          .full_measure_threshold = std::isnan(c.threshold)
                                                        ? std::nullopt
                                                        : std::optional<double>(c.threshold)};
    const auto r = run_theorem_experiment(exp);
    Output o;
    o.results = to_json(r, c.timing);
    o.table.columns = {"n", "psi", "N", "Q", "samples", "seed", "value", "std_error",
                       "union_bound", "predicted_branch", "verdict", "elapsed_s"};
    for (std::size_t i = 0; i < r.observed.size(); ++i)
        o.table.rows.push_back({r.n, r.psi, r.schedule[i].lo(), r.schedule[i].hi(), r.samples,
                                r.seed, r.observed[i].value, r.observed[i].std_error,
                                r.union_bounds[i], std::string(to_string(r.predicted)),
                                std::string(to_string(r.verdict)),
                                c.timing ? r.observed[i].elapsed : 0.0});
    if (r.verdict != Verdict::Consistent)
        o.warnings.push_back(std::string(to_string(r.verdict)) + ": " + r.rationale);
    return o;
}

Output run_dim(const RunConfig& c)
{
    const DickinsonParams p{c.m, c.n, c.tau};
    const double d = dickinson_dimension(p);
    Output o;
    o.table.columns = {"m", "n", "tau", "dimension", "branch"};
    const bool first = c.tau > static_cast<double>(c.m) / c.n - 1.0;
    o.table.rows.push_back({c.m, c.n, c.tau, d, first ? "(m-1)n+m/(tau+1)" : "mn"});
    return o;
}

// ---------------------------------------------------------------------------
// output

std::string csv_cell(const json& v)
{
    if (v.is_null())
        return "";
    if (v.is_string()) {
        const auto& s = v.get_ref<const std::string&>();
        if (s.find_first_of(",\"\n") == std::string::npos)
            return s;
        std::string q = "\"";
        for (const char ch : s) {
            if (ch == '"')
                q += '"';
            q += ch;
        }
        return q + "\"";
    }
    return v.dump();
}

void write_output(std::ostream& os, const RunConfig& c, const Output& o, double elapsed)
{
    if (c.format == "json") {
        json results = o.results;
        if (results.is_null()) {
            results = json::array();
            for (const auto& row : o.table.rows) {
                json obj = json::object();
                for (std::size_t i = 0; i < row.size(); ++i)
                    obj[o.table.columns[i]] = row[i];
                results.push_back(std::move(obj));
            }
        }
        json doc{{"command", c.subcommand},
                 {"params", params_json(c)},
                 {"results", std::move(results)},
                 {"seed", c.seed},
                 {"elapsed_s", c.timing ? elapsed : 0.0},
                 {"version", kVersion}};
        if (!o.warnings.empty())
            doc["warnings"] = o.warnings;
        os << doc.dump(2) << '\n';
        return;
    }
    os << "# kg-lab v" << kVersion << '\n';
    for (std::size_t i = 0; i < o.table.columns.size(); ++i)
        os << (i ? "," : "") << o.table.columns[i];
    os << '\n';
    for (const auto& row : o.table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << csv_cell(row[i]);
        os << '\n';
    }
}

// ---------------------------------------------------------------------------
// --json-config: the file holds an object whose keys are long flag names.
// Its entries are inserted ahead of the command-line flags, so explicit
// flags win.

std::vector<std::string> expand_json_config(std::vector<std::string> args)
{
    std::string path;
    for (std::size_t i = 1; i + 1 < args.size(); ++i)
        if (args[i] == "--json-config")
            path = args[i + 1];
    for (const auto& a : args)
        if (a.rfind("--json-config=", 0) == 0)
            path = a.substr(std::string("--json-config=").size());
    if (path.empty() || args.size() < 2)
        return args;

    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open --json-config file '" + path + "'");
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("--json-config: " + std::string(e.what()));
    }
    if (!cfg.is_object())
        throw std::invalid_argument("--json-config must hold a JSON object");

    std::vector<std::string> tokens;
    for (const auto& [key, value] : cfg.items()) {
        if (key == "subcommand" || key == "json_config" || key == "json-config")
            continue;
        std::string flag = "--" + key;
        for (auto& ch : flag)
            if (ch == '_')
                ch = '-';
        if (value.is_null())
            continue;
        if (value.is_boolean()) {
            if (value.get<bool>())
                tokens.push_back(flag);
            continue;
        }
        std::string text;
        if (value.is_array()) {
            for (std::size_t i = 0; i < value.size(); ++i)
                text += (i ? "," : "") + (value[i].is_string() ? value[i].get<std::string>() : value[i].dump());
        } else {
            text = value.is_string() ? value.get<std::string>() : value.dump();
        }
        tokens.push_back(flag);
        tokens.push_back(text);
    }
    args.insert(args.begin() + 2, tokens.begin(), tokens.end());
    return args;
}

void add_common(CLI::App* sub, RunConfig& c)
{
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", c.out, "Write results to this file instead of stdout");
    sub->add_option("--json-config", c.json_config, "JSON object with the same fields as the flags");
    sub->add_option("--threads", c.threads, "Maximum worker threads (0 = default)")
        ->check(CLI::NonNegativeNumber);
    sub->add_flag("--timing", c.timing, "Report wall-clock time instead of 0");
}

}  // namespace

int parse_and_dispatch(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err)
{
    RunConfig cfg;
    CLI::App app{"kg-lab: numerical experiments on absolute-value Diophantine approximation"};
    app.set_version_flag("--version", std::string("kg-lab ") + kVersion);
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    auto* classify = app.add_subcommand("classify", "Critical-sum class, slow decrease and predicted branch");
    classify->add_option("--n", cfg.n, "Dimension n >= 2")->required();
    classify->add_option("--psi", cfg.psi, "Error function")->required();
    classify->add_option("--c", cfg.c, "Contraction c in (0,1) for the slow-decrease scan (default 1/n)");
    classify->add_option("--kmax", cfg.kmax, "Heights scanned for slow decrease");

    auto* shells = app.add_subcommand("shells", "Sup-norm shell sizes and canonical vectors");
    shells->add_option("--n", cfg.n, "Dimension")->required();
    shells->add_option("--k", cfg.k, "Single shell");
    shells->add_option("--kmax", cfg.kmax, "Shells 1..kmax");
    shells->add_flag("--list", cfg.list, "List the canonical vectors of shell --k");

    auto* slab = app.add_subcommand("slab", "Exact slab volume versus the 2 delta/|q| bound");
    slab->add_option("--q", cfg.q, "Integer normal, comma separated")->required();
    slab->add_option("--delta", cfg.delta, "Half-width delta > 0")->required();
    slab->add_option("--samples", cfg.samples, "Monte-Carlo samples outside the exact envelope");
    slab->add_option("--seed", cfg.seed, "Seed for the Monte-Carlo fallback");

    auto* count = app.add_subcommand("count", "Solution counts N(x,Q) and counting ratios");
    count->add_option("--psi", cfg.psi, "Error function")->required();
    count->add_option("--x", cfg.x, "Point in [0,1]^n, comma separated");
    count->add_option("--Q", cfg.Q, "Height bound");
    count->add_option("--n", cfg.n, "Dimension (with --points)");
    count->add_option("--points", cfg.points, "Number of seeded random points");
    count->add_option("--Q-list", cfg.Q_list, "Increasing height bounds, comma separated");
    count->add_option("--seed", cfg.seed, "Seed for random points");

    auto* measure = app.add_subcommand("measure", "Monte-Carlo measure of a truncated union");
    measure->add_option("--n", cfg.n, "Dimension n >= 2")->required();
    measure->add_option("--psi", cfg.psi, "Error function")->required();
    measure->add_option("--window", cfg.window, "Height window N,Q")->required();
    measure->add_option("--samples", cfg.samples, "Sample count");
    measure->add_option("--seed", cfg.seed, "Seed");

    auto* lift = app.add_subcommand("lift", "Lift face witnesses into the cube");
    lift->add_option("--n", cfg.n, "Dimension n >= 2")->required();
    lift->add_option("--psi", cfg.psi, "Error function")->required();
    lift->add_option("--window", cfg.window, "Height window for q_hat (default 1,50)");
    lift->add_option("--instances", cfg.instances, "Number of random instances");
    lift->add_option("--seed", cfg.seed, "Seed for face points");
    lift->add_option("--x-hat", cfg.x_hat, "Explicit face point in [0,1]^(n-1)");
    lift->add_option("--q-hat", cfg.q_hat, "Explicit witness for --x-hat");
    lift->add_option("--C", cfg.C, "Slow-decrease constant (default: scanned at c = 1/n)");

    auto* theorem = app.add_subcommand("theorem", "Predicted measure branch versus Monte-Carlo trend");
    theorem->add_option("--n", cfg.n, "Dimension n >= 2")->required();
    theorem->add_option("--psi", cfg.psi, "Error function")->required();
    theorem->add_option("--windows", cfg.windows, "Windows N,Q separated by ';'");
    theorem->add_option("--N-list", cfg.N_list, "Values of N at fixed --Q");
    theorem->add_option("--Q-list", cfg.Q_list, "Values of Q at fixed --N");
    theorem->add_option("--N", cfg.N, "Fixed N");
    theorem->add_option("--Q", cfg.Q, "Fixed Q");
    theorem->add_option("--samples", cfg.samples, "Samples per window");
    theorem->add_option("--seed", cfg.seed, "Seed");
    theorem->add_option("--threshold", cfg.threshold, "Full-measure threshold for the last window");

    auto* dim = app.add_subcommand("dim", "Hausdorff dimension for m forms with psi(k) = k^-tau");
    dim->add_option("--m", cfg.m, "Number of linear forms")->required();
    dim->add_option("--n", cfg.n, "Number of variables")->required();
    dim->add_option("--tau", cfg.tau, "Exponent tau > 0")->required();

    for (auto* sub : {classify, shells, slab, count, measure, lift, theorem, dim})
        add_common(sub, cfg);

    std::vector<std::string> args;
    try {
        args = expand_json_config(raw);
    } catch (const std::exception& e) {
        err << "kg-lab: " << e.what() << '\n';
        return kUsageError;
    }
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args)
        argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << "kg-lab " << kVersion << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "kg-lab: " << e.what() << '\n';
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kUsageError;
    }

    const auto* chosen = app.get_subcommands().front();
    cfg.subcommand = chosen->get_name();

    try {
        const auto start = std::chrono::steady_clock::now();
        Output o;
        if (cfg.subcommand == "classify")
            o = run_classify(cfg);
        else if (cfg.subcommand == "shells")
            o = run_shells(cfg);
        else if (cfg.subcommand == "slab")
            o = run_slab(cfg);
        else if (cfg.subcommand == "count")
            o = run_count(cfg);
        else if (cfg.subcommand == "measure")
            o = run_measure(cfg);
        else if (cfg.subcommand == "lift")
            o = run_lift(cfg);
        else if (cfg.subcommand == "theorem")
            o = run_theorem(cfg);
        else
            o = run_dim(cfg);
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;

        for (const auto& w : o.warnings)
            err << "kg-lab: warning: " << w << '\n';
        if (!cfg.out.empty()) {
            std::ofstream file(cfg.out);
            if (!file)
                throw std::invalid_argument("cannot write --out file '" + cfg.out + "'");
            write_output(file, cfg, o, dt.count());
        } else {
            write_output(out, cfg, o, dt.count());
        }
        return kOk;
    } catch (const ContractViolation& e) {
        err << "kg-lab: internal contract violation: " << e.what() << '\n';
        return kInternalError;
    } catch (const std::invalid_argument& e) {
        err << "kg-lab: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::domain_error& e) {
        err << "kg-lab: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::out_of_range& e) {
        err << "kg-lab: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::range_error& e) {
        err << "kg-lab: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "kg-lab: internal error: " << e.what() << '\n';
        return kInternalError;
    }
}

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    std::vector<std::string> args(argv, argv + argc);
    return parse_and_dispatch(args, out, err);
}

}  // namespace kglab::cli
