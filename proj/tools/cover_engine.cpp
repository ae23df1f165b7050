// cover-engine: compute, verify and consume covers of query results.

#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "covers/engine.hpp"

int main(int argc, char** argv) {
    CLI::App app{"cover-engine: succinct covers of join and aggregate query results"};

    std::string command, spec_path, cover_csv, plan;
    std::optional<uint64_t> seed;
    bool emit_drep = false, strict = false;

    app.add_option("command", command,
                   "cover | check | enumerate | count | faq | stats | plans | oracle")
        ->required();
    app.add_option("cover_csv", cover_csv, "cover CSV to verify (check command)");
    app.add_option("--spec", spec_path, "job spec file")->required();
    app.add_option("--plan", plan, "cover-join plan, e.g. ((R1*R2)*R3)");
    app.add_option("--seed", seed, "alternative cover-join pairings");
    app.add_flag("--emit-drep", emit_drep, "print the multimap d-representation");
    app.add_flag("--strict", strict, "verify computed covers before use");

    CLI11_PARSE(app, argc, argv);

    covers::engine::Flags flags;
    if (!plan.empty()) flags.plan = plan;
    flags.seed = seed;
    flags.emit_drep = emit_drep;
    flags.strict = strict;
    if (!cover_csv.empty()) flags.cover_csv = cover_csv;

    covers::engine::RunResult res = covers::engine::run(command, spec_path, flags);
    std::fputs(res.output.c_str(), stdout);
    if (!res.diagnostic.empty()) std::fprintf(stderr, "%s\n", res.diagnostic.c_str());
    return res.exit_code;
}
