// SPDX-License-Identifier: Apache-2.0
#include "rsma_sgf/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "rsma_sgf/oracle.hpp"

namespace rsma_sgf {

namespace {

struct Entry
{
    std::string value;
    std::string where;  // "file:line" or "override"
};

const std::set<std::string, std::less<>> kKnownKeys = {
    "name",      "schemes",      "k_list",  "snr_db",  "power_rule", "ratio",     "p_b_fixed_db",
    "rate_b",    "rate_f",       "methods", "trials",  "seed",       "out",       "format",
    "precision", "z",            "wilson",  "auto_escalate", "trial_cap", "threads", "chunk_size",
    "abs_tol",   "rel_tol",      "max_subdivisions",
};

const std::pair<RunMethod, std::string_view> kMethodNames[] = {
    {RunMethod::Mc, "mc"},
    {RunMethod::McGb, "mc_gb"},
    {RunMethod::ErgodicGf, "ergodic_gf"},
    {RunMethod::ErgodicSum, "ergodic_sum"},
    {RunMethod::Theorem1, "theorem1"},
    {RunMethod::Corollary1, "corollary1"},
    {RunMethod::Theorem2, "theorem2"},
    {RunMethod::Corollary2, "corollary2"},
    {RunMethod::Corollary3, "corollary3"},
    {RunMethod::Quadrature, "quadrature"},
};

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string_view s)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        const auto item = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
        out.emplace_back(item);
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

// Error helper bound to one key.
struct Field
{
    std::string_view key;
    const Entry& entry;

    [[noreturn]] void fail(std::string_view msg) const
    {
        throw SpecError(fmt::format("{}: key '{}': {}", entry.where, key, msg));
    }

    double to_double(std::string_view s) const
    {
        double v = 0.0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
            fail(fmt::format("expected a number, got '{}'", s));
        return v;
    }

    long long to_int(std::string_view s) const
    {
        long long v = 0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size())
            fail(fmt::format("expected an integer, got '{}'", s));
        return v;
    }

    double number() const { return to_double(entry.value); }
    long long integer() const { return to_int(entry.value); }

    std::uint64_t count() const
    {
        const auto v = integer();
        if (v < 0)
            fail("must be nonnegative");
        return static_cast<std::uint64_t>(v);
    }

    bool boolean() const
    {
        if (entry.value == "true" || entry.value == "1")
            return true;
        if (entry.value == "false" || entry.value == "0")
            return false;
        fail(fmt::format("expected true or false, got '{}'", entry.value));
    }

    // Comma list; an item "a:step:b" expands to a, a+step, ..., b.
    std::vector<double> numbers() const
    {
        std::vector<double> out;
        for (const auto& item : split_list(entry.value)) {
            if (item.empty())
                fail("empty list item");
            const auto c1 = item.find(':');
            if (c1 == std::string::npos) {
                out.push_back(to_double(item));
                continue;
            }
            const auto c2 = item.find(':', c1 + 1);
            if (c2 == std::string::npos)
                fail(fmt::format("range '{}' must be start:step:stop", item));
            const double a = to_double(trim(std::string_view(item).substr(0, c1)));
            const double step = to_double(trim(std::string_view(item).substr(c1 + 1, c2 - c1 - 1)));
            const double b = to_double(trim(std::string_view(item).substr(c2 + 1)));
            if (!(step > 0.0) || b < a)
                fail(fmt::format("range '{}' needs step > 0 and stop >= start", item));
            const auto n = static_cast<long long>(std::floor((b - a) / step + 1e-9));
            for (long long i = 0; i <= n; ++i)
                out.push_back(a + static_cast<double>(i) * step);
        }
        return out;
    }

    std::vector<int> integers() const
    {
        std::vector<int> out;
        for (double v : numbers()) {
            if (v != std::floor(v))
                fail(fmt::format("expected integers, got {}", v));
            out.push_back(static_cast<int>(v));
        }
        return out;
    }
};

std::optional<std::pair<std::string, std::string>> first_issue(const ExperimentSpec& s)
{
    using Issue = std::pair<std::string, std::string>;
    if (s.schemes.empty())
        return Issue{"schemes", "must not be empty"};
    if (s.k_list.empty())
        return Issue{"k_list", "must not be empty"};
    for (int k : s.k_list)
        if (k < 1)
            return Issue{"k_list", fmt::format("K must be at least 1, got {}", k)};
    if (s.snr_db.empty())
        return Issue{"snr_db", "must not be empty"};
    if (s.power_rule == PowerRule::FixedRatio && !(s.ratio > 0.0))
        return Issue{"ratio", fmt::format("must be positive, got {}", s.ratio)};
    if (s.rate_b && !(*s.rate_b > 0.0))
        return Issue{"rate_b", "must be positive"};
    if (s.rate_f.empty())
        return Issue{"rate_f", "must not be empty"};
    for (double r : s.rate_f)
        if (!(r > 0.0))
            return Issue{"rate_f", fmt::format("rates must be positive, got {}", r)};
    if (s.methods.empty())
        return Issue{"methods", "must not be empty"};
    const bool simulated = std::any_of(s.methods.begin(), s.methods.end(), [](RunMethod m) {
        return m == RunMethod::Mc || m == RunMethod::McGb || m == RunMethod::ErgodicGf ||
               m == RunMethod::ErgodicSum;
    });
    if (simulated && s.trials < 1)
        return Issue{"trials", "must be at least 1 when a Monte Carlo method is requested"};
    if (s.format != "csv" && s.format != "json")
        return Issue{"format", fmt::format("expected csv or json, got '{}'", s.format)};
    if (!(s.simulation.z > 0.0))
        return Issue{"z", "must be positive"};
    if (s.simulation.chunk_size < 1)
        return Issue{"chunk_size", "must be positive"};
    if (!(s.quadrature.abs_tol > 0.0))
        return Issue{"abs_tol", "must be positive"};
    if (!(s.quadrature.rel_tol > 0.0))
        return Issue{"rel_tol", "must be positive"};
    if (s.quadrature.max_subdivisions < 1)
        return Issue{"max_subdivisions", "must be positive"};
    return std::nullopt;
}

std::string fmt_double(double v)
{
    return fmt::format("{:.17g}", v);
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

double linear_to_db(double p)
{
    return 10.0 * std::log10(p);
}

} // namespace

std::string_view to_string(RunMethod method)
{
    for (const auto& [m, name] : kMethodNames)
        if (m == method)
            return name;
    return "unknown";
}

std::string_view to_string(PowerRule rule)
{
    switch (rule) {
    case PowerRule::Equal:
        return "equal";
    case PowerRule::FixedRatio:
        return "fixed_ratio";
    case PowerRule::FixedPB:
        return "fixed_pb";
    }
    return "unknown";
}

void ExperimentSpec::validate() const
{
    if (const auto issue = first_issue(*this))
        throw SpecError(fmt::format("key '{}': {}", issue->first, issue->second));
}

ExperimentSpec parse_spec_text(std::string_view text, std::string_view origin,
                               const std::vector<std::string>& overrides)
{
    std::map<std::string, Entry, std::less<>> entries;
    auto add = [&](std::string_view line, const std::string& where, bool replace) {
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw SpecError(fmt::format("{}: expected 'key = value', got '{}'", where, line));
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty())
            throw SpecError(fmt::format("{}: missing key before '='", where));
        if (!kKnownKeys.contains(key))
            throw SpecError(fmt::format("{}: unknown key '{}'", where, key));
        if (!replace && entries.contains(key))
            throw SpecError(fmt::format("{}: key '{}' repeats {}", where, key, entries[key].where));
        entries[key] = Entry{value, where};
    };

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        std::string_view line = text.substr(start, nl == std::string_view::npos ? text.npos : nl - start);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (!line.empty())
            add(line, fmt::format("{}:{}", origin, line_no), false);
        if (nl == std::string_view::npos)
            break;
        start = nl + 1;
    }
    for (const auto& o : overrides)
        add(trim(o), fmt::format("override '{}'", o), true);

    for (const char* required : {"k_list", "snr_db", "rate_b", "rate_f", "methods"})
        if (!entries.contains(required))
            throw SpecError(fmt::format("{}: missing required key '{}'", origin, required));

    ExperimentSpec spec;
    auto field = [&](std::string_view key) { return Field{key, entries.find(key)->second}; };
    auto has = [&](std::string_view key) { return entries.contains(key); };

    if (has("name"))
        spec.name = entries.find("name")->second.value;
    if (has("schemes")) {
        spec.schemes.clear();
        const auto f = field("schemes");
        for (const auto& item : split_list(f.entry.value)) {
            try {
                spec.schemes.push_back(parse_scheme(item));
            } catch (const std::invalid_argument& e) {
                f.fail(e.what());
            }
        }
    }
    spec.k_list = field("k_list").integers();
    spec.snr_db = field("snr_db").numbers();
    if (has("power_rule")) {
        const auto f = field("power_rule");
        if (f.entry.value == "equal")
            spec.power_rule = PowerRule::Equal;
        else if (f.entry.value == "fixed_ratio")
            spec.power_rule = PowerRule::FixedRatio;
        else if (f.entry.value == "fixed_pb")
            spec.power_rule = PowerRule::FixedPB;
        else
            f.fail(fmt::format("expected equal, fixed_ratio or fixed_pb, got '{}'", f.entry.value));
    }
    if (has("ratio"))
        spec.ratio = field("ratio").number();
    if (spec.power_rule == PowerRule::FixedRatio && !has("ratio"))
        throw SpecError(fmt::format("{}: missing required key 'ratio' for power_rule = fixed_ratio",
                                    origin));
    if (has("p_b_fixed_db"))
        spec.p_b_fixed_db = field("p_b_fixed_db").number();
    if (spec.power_rule == PowerRule::FixedPB && !has("p_b_fixed_db"))
        throw SpecError(fmt::format(
            "{}: missing required key 'p_b_fixed_db' for power_rule = fixed_pb", origin));
    {
        const auto f = field("rate_b");
        if (f.entry.value == "same")
            spec.rate_b.reset();
        else
            spec.rate_b = f.number();
    }
    spec.rate_f = field("rate_f").numbers();
    {
        const auto f = field("methods");
        for (const auto& item : split_list(f.entry.value)) {
            const auto it = std::find_if(std::begin(kMethodNames), std::end(kMethodNames),
                                         [&](const auto& p) { return p.second == item; });
            if (it == std::end(kMethodNames))
                f.fail(fmt::format("unknown method '{}'", item));
            spec.methods.push_back(it->first);
        }
    }
    if (has("trials"))
        spec.trials = field("trials").count();
    if (has("seed"))
        spec.seed = field("seed").count();
    if (has("out"))
        spec.out = entries.find("out")->second.value;
    if (has("format"))
        spec.format = entries.find("format")->second.value;
    if (has("precision")) {
        const auto f = field("precision");
        if (f.entry.value == "double")
            spec.precision = Precision::Double;
        else if (f.entry.value == "extended")
            spec.precision = Precision::Extended;
        else if (f.entry.value == "auto")
            spec.precision = Precision::Auto;
        else
            f.fail(fmt::format("expected double, extended or auto, got '{}'", f.entry.value));
    }
    if (has("z"))
        spec.simulation.z = field("z").number();
    if (has("wilson"))
        spec.simulation.wilson = field("wilson").boolean();
    if (has("auto_escalate"))
        spec.simulation.auto_escalate = field("auto_escalate").boolean();
    if (has("trial_cap"))
        spec.simulation.trial_cap = field("trial_cap").count();
    if (has("threads"))
        spec.simulation.threads = static_cast<unsigned>(field("threads").count());
    if (has("chunk_size"))
        spec.simulation.chunk_size = field("chunk_size").count();
    if (has("abs_tol"))
        spec.quadrature.abs_tol = field("abs_tol").number();
    if (has("rel_tol"))
        spec.quadrature.rel_tol = field("rel_tol").number();
    if (has("max_subdivisions"))
        spec.quadrature.max_subdivisions = static_cast<int>(field("max_subdivisions").integer());

    if (const auto issue = first_issue(spec)) {
        const auto it = entries.find(issue->first);
        const std::string where = it != entries.end() ? it->second.where : std::string(origin);
        throw SpecError(fmt::format("{}: key '{}': {}", where, issue->first, issue->second));
    }
    return spec;
}

ExperimentSpec parse_spec(const std::string& path, const std::vector<std::string>& overrides)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw SpecError(fmt::format("{}: cannot open spec file", path));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_spec_text(buffer.str(), path, overrides);
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec)
{
    spec.validate();
    std::vector<ResultRow> rows;
    using Clock = std::chrono::steady_clock;

    for (int k : spec.k_list) {
        for (double snr : spec.snr_db) {
            double p_b_db = snr;
            double p_f_db = snr;
            double p_b = db_to_linear(snr);
            double p_f = p_b;
            if (spec.power_rule == PowerRule::FixedRatio) {
                p_f = spec.ratio * p_b;
                p_f_db = snr + linear_to_db(spec.ratio);
            } else if (spec.power_rule == PowerRule::FixedPB) {
                p_b_db = spec.p_b_fixed_db;
                p_b = db_to_linear(p_b_db);
            }
            for (double rate_f : spec.rate_f) {
                const double rate_b = spec.rate_b.value_or(rate_f);
                const SystemConfig config(k, p_b, p_f, rate_b, rate_f);

                for (SchemeKind scheme : spec.schemes) {
                    std::optional<BlockTally> tally;
                    auto blocks = [&]() -> const BlockTally& {
                        if (!tally)
                            tally = simulate_blocks(config, scheme, spec.trials, spec.seed,
                                                    spec.simulation);
                        return *tally;
                    };

                    for (RunMethod method : spec.methods) {
                        ResultRow row;
                        row.k = k;
                        row.p_b_db = p_b_db;
                        row.p_f_db = p_f_db;
                        row.rate_b = rate_b;
                        row.rate_f = rate_f;
                        row.scheme = scheme;
                        row.method = std::string(to_string(method));
                        const auto t0 = Clock::now();
                        try {
                            const bool oma = scheme == SchemeKind::OmaGbOnly;
                            auto analytic = [&](const AnalyticResult& r) {
                                row.method = std::string(to_string(r.method));
                                row.value = r.value;
                                if (r.method == Method::Quadrature)
                                    row.ci = r.est_error;
                                else
                                    row.condition_flag = r.condition_flag;
                            };
                            auto not_applicable = [&] {
                                row.error = fmt::format("not applicable: {} has no GF transmission",
                                                        to_string(scheme));
                            };
                            switch (method) {
                            case RunMethod::Mc:
                                if (oma) {
                                    not_applicable();
                                } else {
                                    const auto e = spec.simulation.auto_escalate
                                                       ? estimate_outage(config, scheme, spec.trials,
                                                                         spec.seed, spec.simulation)
                                                       : make_outage_estimate(blocks().gf_outages,
                                                                              blocks().trials, scheme,
                                                                              spec.simulation);
                                    row.value = e.p_hat;
                                    row.ci = e.ci_halfwidth;
                                }
                                break;
                            case RunMethod::McGb: {
                                const auto e = spec.simulation.auto_escalate
                                                   ? estimate_gb_outage(config, scheme, spec.trials,
                                                                        spec.seed, spec.simulation)
                                                   : make_outage_estimate(blocks().gb_outages,
                                                                          blocks().trials, scheme,
                                                                          spec.simulation);
                                row.value = e.p_hat;
                                row.ci = e.ci_halfwidth;
                                break;
                            }
                            case RunMethod::ErgodicGf:
                            case RunMethod::ErgodicSum: {
                                if (oma && method == RunMethod::ErgodicGf) {
                                    not_applicable();
                                    break;
                                }
                                const BlockTally& t = blocks();
                                const double n = static_cast<double>(t.trials);
                                const bool gf = method == RunMethod::ErgodicGf;
                                const double sum = gf ? t.sum_gf : t.sum_total;
                                const double sum_sq = gf ? t.sum_sq_gf : t.sum_sq_total;
                                const double mean = sum / n;
                                const double var =
                                    n > 1.0 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
                                row.value = mean;
                                row.ci = spec.simulation.z * std::sqrt(var / n);
                                break;
                            }
                            default:
                                if (scheme != SchemeKind::RsmaSgf) {
                                    row.error = fmt::format(
                                        "analytic methods describe rsma_sgf only, not {}",
                                        to_string(scheme));
                                    break;
                                }
                                switch (method) {
                                case RunMethod::Theorem1:
                                case RunMethod::Corollary1:
                                    // The exact form is routed by K.
                                    analytic(k == 1 ? corollary1_pout(config, spec.precision)
                                                    : theorem1_pout(config, spec.precision));
                                    break;
                                case RunMethod::Theorem2:
                                    analytic(theorem2_approx(config));
                                    break;
                                case RunMethod::Corollary2:
                                    analytic(corollary2_approx(config));
                                    break;
                                case RunMethod::Corollary3:
                                    analytic(corollary3_approx(config));
                                    break;
                                case RunMethod::Quadrature:
                                    analytic(assemble_pout(config, spec.quadrature));
                                    break;
                                default:
                                    break;
                                }
                            }
                        } catch (const std::exception& e) {
                            row.value.reset();
                            row.ci.reset();
                            row.condition_flag.reset();
                            row.error = e.what();
                        }
                        row.wall_time_ms =
                            std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
                        rows.push_back(std::move(row));
                    }
                }
            }
        }
    }
    return rows;
}

std::string format_csv(const std::vector<ResultRow>& rows)
{
    std::string out = kCsvHeader;
    out += '\n';
    auto opt = [](const std::optional<double>& v) { return v ? fmt_double(*v) : std::string(); };
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", r.k, fmt_double(r.p_b_db),
                           fmt_double(r.p_f_db), fmt_double(r.rate_b), fmt_double(r.rate_f),
                           to_string(r.scheme), r.method, opt(r.value), opt(r.ci),
                           opt(r.condition_flag), csv_field(r.error));
    }
    return out;
}

std::string format_json(const std::vector<ResultRow>& rows)
{
    nlohmann::json arr = nlohmann::json::array();
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
    for (const auto& r : rows) {
        arr.push_back({
            {"k", r.k},
            {"p_b_db", r.p_b_db},
            {"p_f_db", r.p_f_db},
            {"rate_b", r.rate_b},
            {"rate_f", r.rate_f},
            {"scheme", std::string(to_string(r.scheme))},
            {"method", r.method},
            {"value", opt(r.value)},
            {"ci", opt(r.ci)},
            {"condition_flag", opt(r.condition_flag)},
            {"error", r.error},
            {"wall_time_ms", r.wall_time_ms},
        });
    }
    return arr.dump(2) + "\n";
}

std::vector<ResultRow> parse_json_rows(std::string_view text)
{
    const auto arr = nlohmann::json::parse(text);
    if (!arr.is_array())
        throw std::invalid_argument("expected a JSON array of rows");
    auto opt = [](const nlohmann::json& v) -> std::optional<double> {
        if (v.is_null())
            return std::nullopt;
        return v.get<double>();
    };
    std::vector<ResultRow> rows;
    for (const auto& o : arr) {
        ResultRow r;
        r.k = o.at("k").get<int>();
        r.p_b_db = o.at("p_b_db").get<double>();
        r.p_f_db = o.at("p_f_db").get<double>();
        r.rate_b = o.at("rate_b").get<double>();
        r.rate_f = o.at("rate_f").get<double>();
        r.scheme = parse_scheme(o.at("scheme").get<std::string>());
        r.method = o.at("method").get<std::string>();
        r.value = opt(o.at("value"));
        r.ci = opt(o.at("ci"));
        r.condition_flag = opt(o.at("condition_flag"));
        r.error = o.at("error").get<std::string>();
        r.wall_time_ms = o.at("wall_time_ms").get<double>();
        rows.push_back(std::move(r));
    }
    return rows;
}

void emit(const std::vector<ResultRow>& rows, std::string_view format, const std::string& path)
{
    std::string text;
    if (format == "csv")
        text = format_csv(rows);
    else if (format == "json")
        text = format_json(rows);
    else
        throw OutputError(fmt::format("unknown output format '{}'", format));

    if (path.empty() || path == "-") {
        std::cout << text << std::flush;
        if (!std::cout)
            throw OutputError("failed writing to stdout");
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw OutputError(fmt::format("{}: cannot open for writing", path));
    out << text;
    out.flush();
    if (!out)
        throw OutputError(fmt::format("{}: write failed", path));
}

} // namespace rsma_sgf
