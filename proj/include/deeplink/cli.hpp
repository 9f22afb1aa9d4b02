#pragma once

// The `deeplink` command line. Artifacts go to stdout (or -o), errors go to
// stderr as an {code, message, detail} object with a nonzero exit code.

#include "deeplink/pipeline.hpp"
#include "deeplink/service.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <ostream>
#include <string>

namespace deeplink {

namespace detail {

inline void write_artifact(const std::string& text, const std::string& outPath, std::ostream& out)
{
    if (outPath.empty()) {
        out << text;
        return;
    }
    std::ofstream f(outPath, std::ios::binary);
    if (!f) throw Error(ErrorCode::ValidationError, "cannot write " + outPath, outPath);
    f << text;
}

inline nlohmann::json read_json_file(const std::string& path)
{
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ParseError, path + ": " + e.what(), path);
    }
}

} // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Deep link analysis, release and replay for app models", "deeplink"};
    app.require_subcommand(1);

    std::string modelPath, outPath;

    auto* analyze = app.add_subcommand("analyze", "Navigation graph and shortcuts of every activity");
    analyze->add_option("model", modelPath, "App model JSON")->required();
    analyze->add_option("-o,--output", outPath, "Write the report here instead of stdout");
    std::size_t maxLen = 0;
    analyze->add_option("--max-len", maxLen, "Longest path considered (default: number of activities)");
    std::string graphFormat = "json";
    analyze->add_option("--format", graphFormat, "json report, or dot for the navigation graph")
        ->check(CLI::IsMember({"json", "dot"}));

    auto* crawl = app.add_subcommand("crawl", "Fragment transition graph of one activity");
    crawl->add_option("model", modelPath, "App model JSON")->required();
    std::string activity, entryPath, hintsPath, crawlFormat = "json";
    crawl->add_option("--activity", activity, "Activity to crawl")->required();
    crawl->add_option("--entry", entryPath, "Entry script JSON (default: first unique shortcut)");
    crawl->add_option("--hints", hintsPath, "Fragment names, {hash: name}");
    crawl->add_option("-o,--output", outPath, "Write the graph here instead of stdout");
    crawl->add_option("--format", crawlFormat, "json or dot")->check(CLI::IsMember({"json", "dot"}));
    CrawlOptions crawlOpts;
    crawl->add_flag("--cross-edges", crawlOpts.crossEdges, "Also record edges into known fragments");
    crawl->add_flag("--position-ids", crawlOpts.positionFallback, "Identify views without ids by tree position");
    crawl->add_option("--budget", crawlOpts.stepBudget, "Click budget");

    auto* link = app.add_subcommand("link", "Release manifest for a selection of targets");
    link->add_option("model", modelPath, "App model JSON")->required();
    std::string selectPath;
    link->add_option("--select", selectPath, "Selection JSON (default: every reachable activity)");
    link->add_option("-o,--output", outPath, "Write the manifest here instead of stdout");

    auto* replay = app.add_subcommand("replay", "Replay one deep link; exit 0 iff it reaches its target");
    std::string manifestPath, uri, traceFormat = "jsonl";
    replay->add_option("model", modelPath, "App model JSON")->required();
    replay->add_option("manifest", manifestPath, "Release manifest JSON")->required();
    replay->add_option("uri", uri, "Deep link")->required();
    replay->add_option("--format", traceFormat, "jsonl or json")->check(CLI::IsMember({"jsonl", "json"}));
    replay->add_option("-o,--output", outPath, "Write the trace here instead of stdout");

    auto* count = app.add_subcommand("count-manifest", "Number of deep links declared by manifest filters");
    count->add_option("model", modelPath, "App model JSON")->required();

    auto* serve = app.add_subcommand("serve", "HTTP service");
    int port = 8080;
    std::string host = "127.0.0.1", corpusDir;
    serve->add_option("--port", port, "Port to listen on");
    serve->add_option("--host", host, "Address to bind");
    serve->add_option("--corpus-dir", corpusDir, "Directory of app models served under /corpus");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*analyze) {
            AnalysisSession session(load_app_model_file(modelPath));
            session.analyze({maxLen, false});
            detail::write_artifact(graphFormat == "dot" ? to_dot(session.nav_graph()) : artifact_text(session.report()),
                                   outPath, out);
        } else if (*crawl) {
            AnalysisSession session(load_app_model_file(modelPath));
            session.analyze();
            const auto name = session.resolve_activity(activity);
            const auto entry =
                entryPath.empty() ? session.default_entry(name) : entry_script_from_json(detail::read_json_file(entryPath));
            const auto& g = session.crawl(name, entry, crawlOpts);
            const auto hints = hintsPath.empty() ? FragmentHints{} : hints_from_json(detail::read_json_file(hintsPath));
            const auto names = name_fragments(g, hints);
            detail::write_artifact(crawlFormat == "dot" ? to_dot(g, names) : artifact_text(to_json(g, names)), outPath,
                                   out);
        } else if (*link) {
            AnalysisSession session(load_app_model_file(modelPath));
            session.analyze();
            const auto selection = selectPath.empty() ? select_all_activities(session.shortcuts())
                                                      : selection_from_json(detail::read_json_file(selectPath));
            detail::write_artifact(export_manifest(release(session, selection)), outPath, out);
        } else if (*replay) {
            const auto model = std::make_shared<const AppModel>(load_app_model_file(modelPath));
            const auto manifest = import_manifest(std::string_view(read_file(manifestPath)), model.get());
            const auto trace = replay_deep_link(model, manifest, parse_deep_link(manifest, uri));
            detail::write_artifact(traceFormat == "json" ? artifact_text(to_json(trace)) : trace_jsonl(trace), outPath,
                                   out);
            if (!trace.reached()) {
                err << error_envelope(trace.failure, trace.failureMessage, trace.templateId).dump() << '\n';
                return 1;
            }
        } else if (*count) {
            out << count_declared_deep_links(load_app_model_file(modelPath)) << '\n';
        } else if (*serve) {
            DeepLinkService service({corpusDir, verbosity_from_env()});
            err << "listening on " << host << ':' << port << std::endl;
            if (!service.listen(host, port))
                throw Error(ErrorCode::ValidationError, "cannot listen on " + host + ":" + std::to_string(port));
        }
    } catch (const Error& e) {
        err << error_envelope(e).dump() << '\n';
        return 2;
    }
    return 0;
}

} // namespace deeplink
