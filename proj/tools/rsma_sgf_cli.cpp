// SPDX-License-Identifier: Apache-2.0
// rsma-sgf: runs experiment specs through the analytic, oracle and Monte Carlo
// pipelines and writes CSV or JSON rows.

#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rsma_sgf/experiment.hpp"

using namespace rsma_sgf;

namespace {

enum Exit { kOk = 0, kAllRowsFailed = 1, kSpecError = 2, kIoError = 3 };

struct CommonArgs
{
    std::string out;
    std::string format;
    unsigned threads = 0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonArgs& args)
{
    cmd->add_option("-o,--out", args.out, "Output path ('-' for stdout)");
    cmd->add_option("-f,--format", args.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("-j,--threads", args.threads, "Worker threads (default: RSMA_SGF_THREADS or all cores)");
    cmd->add_option("-n,--trials", args.trials, "Monte Carlo trials per point");
    cmd->add_option("-s,--seed", args.seed, "Master seed");
    cmd->add_option("--set", args.sets, "Override a spec key: key=value (repeatable)");
}

std::vector<std::string> overrides_of(const CommonArgs& args, CLI::App* cmd)
{
    std::vector<std::string> o = args.sets;
    if (cmd->count("--trials"))
        o.push_back(fmt::format("trials={}", args.trials));
    if (cmd->count("--seed"))
        o.push_back(fmt::format("seed={}", args.seed));
    if (cmd->count("--threads"))
        o.push_back(fmt::format("threads={}", args.threads));
    if (!args.format.empty())
        o.push_back("format=" + args.format);
    if (!args.out.empty())
        o.push_back("out=" + args.out);
    return o;
}

bool is_simulated(RunMethod m)
{
    return m == RunMethod::Mc || m == RunMethod::McGb || m == RunMethod::ErgodicGf ||
           m == RunMethod::ErgodicSum;
}

// Restricts the methods for the analytic / simulate / oracle subcommands.
template <typename Pred>
void keep_methods(ExperimentSpec& spec, Pred&& keep, RunMethod fallback)
{
    std::erase_if(spec.methods, [&](RunMethod m) { return !keep(m); });
    if (spec.methods.empty())
        spec.methods.push_back(fallback);
}

int finish(const std::vector<ResultRow>& rows, const ExperimentSpec& spec)
{
    try {
        emit(rows, spec.format, spec.out);
    } catch (const std::exception& e) {
        std::cerr << "rsma-sgf: " << e.what() << '\n';
        return kIoError;
    }
    const auto failed = std::count_if(rows.begin(), rows.end(),
                                      [](const ResultRow& r) { return !r.error.empty(); });
    if (failed > 0)
        std::cerr << fmt::format("rsma-sgf: {} of {} rows carry errors\n", failed, rows.size());
    return !rows.empty() && failed == static_cast<long>(rows.size()) ? kAllRowsFailed : kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Uplink RSMA semi-grant-free outage: closed forms, quadrature oracle, Monte Carlo"};
    app.require_subcommand(1);

    std::string spec_path;
    CommonArgs args;
    std::vector<std::pair<std::string, CLI::App*>> spec_cmds;
    for (const char* name : {"analytic", "simulate", "oracle", "sweep"}) {
        const char* help = std::string_view(name) == "analytic"   ? "Closed-form methods of a spec"
                           : std::string_view(name) == "simulate" ? "Monte Carlo methods of a spec"
                           : std::string_view(name) == "oracle"   ? "Quadrature oracle over a spec grid"
                                                                  : "Every method listed in a spec";
        auto* cmd = app.add_subcommand(name, help);
        cmd->add_option("spec", spec_path, "Spec file (key = value lines)")->required();
        add_common(cmd, args);
        spec_cmds.emplace_back(name, cmd);
    }

    std::string figure_id;
    bool print_spec = false;
    auto* fig = app.add_subcommand("figure", "Run the bundled spec of a figure family");
    fig->add_option("id", figure_id, "Figure id")->required()->check(CLI::IsMember(figure_ids()));
    fig->add_flag("--print-spec", print_spec, "Print the bundled spec text and exit");
    add_common(fig, args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (fig->parsed()) {
            const auto texts = figure_spec_texts(figure_id);
            if (print_spec) {
                for (std::size_t i = 0; i < texts.size(); ++i)
                    std::cout << (i ? "\n# ---\n" : "") << texts[i];
                return kOk;
            }
            const auto overrides = overrides_of(args, fig);
            std::vector<ExperimentSpec> specs;
            for (std::size_t i = 0; i < texts.size(); ++i)
                specs.push_back(
                    parse_spec_text(texts[i], fmt::format("figure {} part {}", figure_id, i + 1), overrides));
            std::vector<ResultRow> rows;
            for (const auto& spec : specs) {
                auto part = run_experiment(spec);
                rows.insert(rows.end(), part.begin(), part.end());
            }
            return finish(rows, specs.front());
        }

        for (const auto& [name, cmd] : spec_cmds) {
            if (!cmd->parsed())
                continue;
            ExperimentSpec spec = parse_spec(spec_path, overrides_of(args, cmd));
            if (name == "analytic")
                keep_methods(
                    spec, [](RunMethod m) { return !is_simulated(m) && m != RunMethod::Quadrature; },
                    RunMethod::Theorem1);
            else if (name == "simulate")
                keep_methods(spec, is_simulated, RunMethod::Mc);
            else if (name == "oracle")
                keep_methods(spec, [](RunMethod m) { return m == RunMethod::Quadrature; },
                             RunMethod::Quadrature);
            return finish(run_experiment(spec), spec);
        }
    } catch (const SpecError& e) {
        std::cerr << "rsma-sgf: " << e.what() << '\n';
        return kSpecError;
    } catch (const std::exception& e) {
        std::cerr << "rsma-sgf: " << e.what() << '\n';
        return kSpecError;
    }
    return kOk;
}
