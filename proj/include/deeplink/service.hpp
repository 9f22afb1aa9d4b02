#pragma once

// HTTP/JSON front end over AnalysisSession. Each session is guarded by its
// own mutex; different sessions proceed in parallel.

#include "deeplink/pipeline.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>

namespace deeplink {

inline int http_status(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::StepOrder:
    case ErrorCode::NotCrawled: return 409;
    case ErrorCode::NoSuchTarget:
    case ErrorCode::NoSuchFragment: return 404;
    default: return 400;
    }
}

inline nlohmann::json error_envelope(std::string_view code, const std::string& message, const std::string& detail = {})
{
    return {{"code", std::string(code)}, {"message", message}, {"detail", detail}};
}

inline nlohmann::json error_envelope(const Error& e) { return error_envelope(to_string(e.code()), e.message(), e.detail()); }

struct ServiceOptions {
    std::string corpusDir;
    int verbosity = 0; // 0 quiet, 1 requests, 2 requests and bodies
};

/// Reads DEEPLINK_LOG (quiet | info | debug).
inline int verbosity_from_env()
{
    const char* v = std::getenv("DEEPLINK_LOG");
    if (!v) return 0;
    const std::string s(v);
    if (s == "debug") return 2;
    if (s == "info") return 1;
    return 0;
}

class DeepLinkService {
public:
    explicit DeepLinkService(ServiceOptions opts = {}) : opts_(std::move(opts)) { register_routes(); }

    httplib::Server& server() noexcept { return server_; }

    bool listen(const std::string& host, int port) { return server_.listen(host, port); }
    void stop() { server_.stop(); }

private:
    struct SteeringState {
        std::optional<SimSession> session;
        EntryScript script;
        bool scriptable = true; // false once an intent follows a click
    };

    struct Entry {
        std::mutex mutex;
        AnalysisSession analysis;
        SteeringState steering;

        explicit Entry(AppModel m) : analysis(std::move(m)) {}
    };

    using Handler = std::function<void(Entry&, const httplib::Request&, httplib::Response&)>;

    static void send_json(httplib::Response& res, int status, const nlohmann::json& body)
    {
        res.status = status;
        res.set_content(artifact_text(body), "application/json");
    }

    static nlohmann::json parse_body(const httplib::Request& req)
    {
        if (req.body.empty()) return nlohmann::json::object();
        try {
            return nlohmann::json::parse(req.body);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorCode::ParseError, e.what());
        }
    }

    std::string new_id()
    {
        std::uniform_int_distribution<std::uint64_t> dist;
        std::string id;
        do {
            id = to_hex16(dist(rng_));
        } while (sessions_.contains(id));
        return id;
    }

    std::shared_ptr<Entry> lookup(const std::string& id)
    {
        std::lock_guard lock(sessions_mutex_);
        auto it = sessions_.find(id);
        return it == sessions_.end() ? nullptr : it->second;
    }

    /// Wraps a per-session handler: lookup, locking and error mapping.
    httplib::Server::Handler with_session(Handler h)
    {
        return [this, h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
            auto entry = lookup(req.path_params.at("id"));
            if (!entry) {
                send_json(res, 404, error_envelope("NoSuchSession", "unknown session", req.path_params.at("id")));
                return;
            }
            std::lock_guard lock(entry->mutex);
            guarded(res, [&] { h(*entry, req, res); });
        };
    }

    template <typename F>
    static void guarded(httplib::Response& res, F&& f)
    {
        try {
            f();
        } catch (const Error& e) {
            send_json(res, http_status(e.code()), error_envelope(e));
        } catch (const nlohmann::json::exception& e) {
            send_json(res, 400, error_envelope("ParseError", e.what()));
        }
    }

    static nlohmann::json steering_json(const SteeringState& s)
    {
        if (!s.session) return {{"running", false}};
        const auto& sim = *s.session;
        nlohmann::json j{{"running", !sim.terminated()}};
        if (!sim.terminated()) {
            const auto tree = sim.current_view_tree();
            j["activity"] = sim.current_activity();
            j["screen"] = sim.current_screen();
            j["tree"] = to_json(tree);
            j["treeHash"] = tree_hash(tree).hex();
            nlohmann::json stack = nlohmann::json::array();
            for (const auto& inst : sim.back_stack()) stack.push_back(inst.activity);
            j["stack"] = stack;
        }
        j["entryScript"] = s.scriptable ? to_json(s.script) : nlohmann::json(nullptr);
        return j;
    }

    void register_routes()
    {
        if (opts_.verbosity > 0) {
            server_.set_logger([v = opts_.verbosity](const httplib::Request& req, const httplib::Response& res) {
                std::cerr << req.method << ' ' << req.path << " -> " << res.status << '\n';
                if (v > 1 && !req.body.empty()) std::cerr << "  " << req.body << '\n';
            });
        }

        server_.Get("/corpus", [this](const httplib::Request&, httplib::Response& res) {
            nlohmann::json names = nlohmann::json::array();
            if (!opts_.corpusDir.empty() && std::filesystem::is_directory(opts_.corpusDir)) {
                std::vector<std::string> files;
                for (const auto& f : std::filesystem::directory_iterator(opts_.corpusDir))
                    if (f.path().filename().string().ends_with(".app.json")) files.push_back(f.path().filename());
                std::sort(files.begin(), files.end());
                names = files;
            }
            send_json(res, 200, {{"models", names}});
        });

        server_.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto body = parse_body(req);
                if (body.contains("corpusModel")) {
                    const auto name = body["corpusModel"].get<std::string>();
                    if (opts_.corpusDir.empty() || name.find('/') != std::string::npos)
                        throw Error(ErrorCode::ValidationError, "no corpus model '" + name + "'", name);
                    body = nlohmann::json::parse(read_file(opts_.corpusDir + "/" + name));
                }
                auto entry = std::make_shared<Entry>(load_app_model(body));
                std::string id;
                {
                    std::lock_guard lock(sessions_mutex_);
                    id = new_id();
                    sessions_.emplace(id, entry);
                }
                nlohmann::json activities = nlohmann::json::array();
                for (const auto& a : entry->analysis.model().activities) activities.push_back(a.name);
                send_json(res, 201, {{"id", id},
                                     {"packageName", entry->analysis.model().packageName},
                                     {"mainActivity", entry->analysis.model().mainActivity},
                                     {"activities", activities}});
            });
        });

        server_.Delete("/sessions/:id", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(sessions_mutex_);
            if (sessions_.erase(req.path_params.at("id")) == 0) {
                send_json(res, 404, error_envelope("NoSuchSession", "unknown session", req.path_params.at("id")));
                return;
            }
            res.status = 204;
        });

        server_.Post("/sessions/:id/analyze", with_session([](Entry& e, const httplib::Request& req, httplib::Response& res) {
            const auto body = parse_body(req);
            PathOptions opts;
            if (body.contains("maxLen")) opts.maxLen = body["maxLen"].get<std::size_t>();
            e.analysis.analyze(opts);
            send_json(res, 200, e.analysis.report());
        }));

        server_.Get("/sessions/:id/navgraph", with_session([](Entry& e, const httplib::Request& req, httplib::Response& res) {
            if (req.get_param_value("format") == "dot") {
                res.set_content(to_dot(e.analysis.nav_graph()), "text/vnd.graphviz");
                return;
            }
            send_json(res, 200, to_json(e.analysis.nav_graph()));
        }));

        server_.Get("/sessions/:id/activities/:activity/shortcuts",
                    with_session([](Entry& e, const httplib::Request& req, httplib::Response& res) {
                        const auto name = e.analysis.resolve_activity(req.path_params.at("activity"));
                        send_json(res, 200, shortcuts_json(e.analysis.shortcuts(), name));
                    }));

        server_.Post("/sessions/:id/activities/:activity/crawl",
                     with_session([](Entry& e, const httplib::Request& req, httplib::Response& res) {
                         const auto name = e.analysis.resolve_activity(req.path_params.at("activity"));
                         const auto body = parse_body(req);
                         if (!e.analysis.analyzed())
                             throw Error(ErrorCode::StepOrder, "crawling needs an analyzed model");
                         CrawlOptions opts;
                         if (body.contains("options")) {
                             const auto& o = body["options"];
                             opts.crossEdges = o.value("crossEdges", false);
                             opts.positionFallback = o.value("positionFallback", false);
                             opts.stepBudget = o.value("stepBudget", opts.stepBudget);
                         }
                         const auto entry = body.contains("entry") ? entry_script_from_json(body["entry"])
                                                                   : e.analysis.default_entry(name);
                         e.analysis.crawl(name, entry, opts);
                         send_json(res, 200, e.analysis.ftg_json(name));
                     }));

        server_.Get("/sessions/:id/activities/:activity/ftg",
                    with_session([](Entry& e, const httplib::Request& req, httplib::Response& res) {
                        const auto name = e.analysis.resolve_activity(req.path_params.at("activity"));
                        if (!e.analysis.analyzed()) throw Error(ErrorCode::StepOrder, "the model has not been analyzed");
                        if (req.get_param_value("format") == "dot") {
                            const auto& g = e.analysis.ftg(name);
                            std::map<StructureHash, std::string> names;
                            for (const auto& v : e.analysis.ftg_json(name)["vertices"])
                                names.emplace(structure_hash_from_hex(v["hash"].get<std::string>()), v["name"]);
                            res.set_content(to_dot(g, names), "text/vnd.graphviz");
                            return;
                        }
                        send_json(res, 200, e.analysis.ftg_json(name));
                    }));

        server_.Put("/sessions/:id/selection", with_session([](Entry& e, const httplib::Request& req, httplib::Response& res) {
            e.analysis.select(selection_from_json(parse_body(req)));
            send_json(res, 200, to_json(*e.analysis.selection()));
        }));

        server_.Post("/sessions/:id/manifest", with_session([](Entry& e, const httplib::Request&, httplib::Response& res) {
            res.status = 200;
            res.set_content(export_manifest(e.analysis.build_manifest()), "application/json");
        }));

        server_.Get("/sessions/:id/manifest", with_session([](Entry& e, const httplib::Request&, httplib::Response& res) {
            res.status = 200;
            res.set_content(export_manifest(e.analysis.manifest()), "application/json");
        }));

        server_.Post("/sessions/:id/replay", with_session([](Entry& e, const httplib::Request& req, httplib::Response& res) {
            const auto body = parse_body(req);
            if (!body.contains("uri") || !body["uri"].is_string())
                throw Error(ErrorCode::ParseError, "replay body needs a string 'uri'");
            const auto& trace = e.analysis.replay(body["uri"].get<std::string>());
            send_json(res, 200, {{"index", e.analysis.traces().size() - 1}, {"trace", to_json(trace)}});
        }));

        server_.Get("/sessions/:id/trace/:n", with_session([](Entry& e, const httplib::Request& req, httplib::Response& res) {
            std::size_t n = 0;
            const auto& s = req.path_params.at("n");
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
            if (ec != std::errc{} || p != s.data() + s.size() || n >= e.analysis.traces().size()) {
                send_json(res, 404, error_envelope("NoSuchTrace", "no trace " + s, s));
                return;
            }
            const auto& trace = e.analysis.traces()[n];
            if (req.get_param_value("format") == "jsonl") {
                res.set_content(trace_jsonl(trace), "application/x-ndjson");
                return;
            }
            send_json(res, 200, to_json(trace));
        }));

        server_.Get("/sessions/:id/snapshot", with_session([](Entry& e, const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, e.analysis.snapshot());
        }));

        // Interactive steering of a simulator, used to compose entry scripts.
        server_.Get("/sessions/:id/simulator", with_session([](Entry& e, const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, steering_json(e.steering));
        }));

        server_.Post("/sessions/:id/simulator", with_session([](Entry& e, const httplib::Request& req, httplib::Response& res) {
            const auto body = parse_body(req);
            const auto op = body.value("op", std::string{});
            auto& st = e.steering;
            if (op == "launch") {
                st.session = SimSession::launch(e.analysis.model_ptr());
                st.script = {};
                st.scriptable = true;
            } else {
                if (!st.session) throw Error(ErrorCode::StepOrder, "launch the simulator first");
                if (op == "intent") {
                    auto intent = intent_from_json(body.at("intent"));
                    auto values = body.contains("values") ? values_from_json(body["values"]) : ValueMap{};
                    st.session->send_intent(intent, values);
                    if (!st.script.actions.empty()) st.scriptable = false;
                    st.script.intents.emplace_back(std::move(intent), std::move(values));
                } else if (op == "click") {
                    const auto view = body.at("view").get<std::string>();
                    st.session->click(view);
                    st.script.actions.push_back(view);
                } else if (op == "back") {
                    st.session->do_back();
                    st.scriptable = false;
                } else {
                    throw Error(ErrorCode::ParseError, "unknown simulator op '" + op + "'", op);
                }
            }
            send_json(res, 200, steering_json(st));
        }));
    }

    ServiceOptions opts_;
    httplib::Server server_;
    std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::mt19937_64 rng_{std::random_device{}()};
};

} // namespace deeplink
