#include "ontomerge/service.hpp"

#include "ontomerge/ingest.hpp"
#include "ontomerge/json_codec.hpp"
#include "ontomerge/owl_io.hpp"
#include "ontomerge/script.hpp"
#include "ontomerge/xml.hpp"

#include <httplib.h>

#include <chrono>
#include <ctime>
#include <map>
#include <mutex>
#include <random>

namespace ontomerge::service {

namespace {

using codec::json;

struct Upload {
    std::string name;
    std::string format; // "owl" or "xml"
    std::string content;
};

struct Session {
    std::mutex mu;
    std::string id;
    std::string created_at;
    std::uint64_t version = 0;
    std::vector<Upload> uploads;
    EngineConfig engine;
    matcher::MatchConfig match;
    std::unique_ptr<Advisor> advisor;
    std::vector<std::string> warnings;
};

/// Failure carrying an HTTP status, reported as {"error", "message"}.
struct HttpError {
    int status;
    std::string code;
    std::string message;
};

std::string now_utc()
{
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

int status_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::UnknownSession: return 404;
    case ErrorCode::VersionConflict: return 409;
    case ErrorCode::MalformedXml:
    case ErrorCode::ScriptSyntax:
    case ErrorCode::UnresolvableReference:
    case ErrorCode::MixedRoots:
    case ErrorCode::EmptyInput: return 400;
    default: return 422;
    }
}

std::string format_of(const std::string& filename, const std::string& content)
{
    if (filename.ends_with(".xml"))
        return "xml";
    if (filename.ends_with(".owl") || filename.ends_with(".rdf"))
        return "owl";
    return content.find("rdf:RDF") != std::string::npos ? "owl" : "xml";
}

std::string stem(const std::string& filename)
{
    return std::filesystem::path(filename).stem().string();
}

Ontology load_upload(Upload& u, std::vector<std::string>& warnings)
{
    if (u.format == "xml") {
        if (u.name.empty())
            throw Error(ErrorCode::InvalidArgument, "an XML source needs a name");
        auto doc = xml::parse(u.content, u.name);
        std::vector<xml::Element> docs{std::move(doc)};
        auto schema = ingest::infer_schema(docs);
        ingest::LiftConfig config;
        config.ontology_name = u.name;
        for (const auto& w : schema.warnings)
            warnings.push_back(u.name + ": " + w);
        return ingest::lift(schema, docs, config);
    }
    if (u.format != "owl")
        throw Error(ErrorCode::InvalidArgument, "unknown source format '" + u.format + "'");
    std::vector<std::string> w;
    auto o = read_owl(u.content, u.name.empty() ? "source" : u.name, &w, u.name.empty() ? "<upload>" : u.name);
    for (auto& m : w)
        warnings.push_back(o.name() + ": " + m);
    if (u.name.empty())
        u.name = o.name();
    o.set_name(u.name);
    return o;
}

json summary(const Session& s)
{
    return {{"id", s.id}, {"created_at", s.created_at}, {"state_version", s.version}};
}

json state_json(const Session& s)
{
    const auto& session = s.advisor->session();
    json sources = json::array();
    for (const auto& o : session.sources())
        sources.push_back(codec::to_json(o));
    json log = json::array();
    for (const auto& op : session.log())
        log.push_back(to_line(op));
    json images = json::object();
    for (FrameKind k : {FrameKind::Class, FrameKind::Slot, FrameKind::Instance}) {
        json map = json::object();
        for (const auto& [from, to] : session.image_map(k))
            map[from.str()] = to;
        images[std::string(to_string(k))] = std::move(map);
    }
    json out = summary(s);
    out["preferred"] = session.preferred() ? json(*session.preferred()) : json(nullptr);
    out["config"] = {{"merged", s.engine.merged_name},
                     {"suffix_policy", std::string(to_string(s.engine.suffix_policy))},
                     {"threshold", s.match.threshold}};
    out["sources"] = std::move(sources);
    out["merged"] = codec::to_json(session.merged());
    out["images"] = std::move(images);
    out["log"] = std::move(log);
    out["dismissed"] = std::vector<std::string>(s.advisor->dismissed().begin(), s.advisor->dismissed().end());
    out["warnings"] = s.warnings;
    return out;
}

json suggestions_json(const std::vector<Suggestion>& list)
{
    json out = json::array();
    for (const auto& s : list)
        out.push_back(codec::to_json(s));
    return out;
}

json conflicts_json(const std::vector<Conflict>& list)
{
    json out = json::array();
    for (const auto& c : list)
        out.push_back(codec::to_json(c));
    return out;
}

json parse_body(const httplib::Request& req)
{
    if (req.body.empty())
        return json::object();
    try {
        auto body = json::parse(req.body);
        if (!body.is_object())
            throw HttpError{400, "invalid-argument", "request body must be a JSON object"};
        return body;
    } catch (const json::parse_error& e) {
        throw HttpError{400, "invalid-argument", std::string("request body is not JSON: ") + e.what()};
    }
}

} // namespace

struct Server::Impl {
    ServiceConfig config;
    httplib::Server http;
    mutable std::mutex registry_mu;
    std::map<std::string, std::shared_ptr<Session>> sessions;
    std::mt19937_64 rng{std::random_device{}()};
    std::vector<std::string> restore_errors;
    bool bound = false;

    explicit Impl(ServiceConfig c) : config(std::move(c))
    {
        restore();
        routes();
    }

    // ---- persistence ----------------------------------------------------

    std::filesystem::path dir_of(const Session& s) const { return *config.data_dir / s.id; }

    void persist(const Session& s) const
    {
        if (!config.data_dir)
            return;
        auto dir = dir_of(s);
        std::filesystem::create_directories(dir / "sources");
        MergeScript script;
        script.engine = s.engine;
        script.match = s.match;
        for (const auto& u : s.uploads) {
            auto rel = std::filesystem::path("sources") / (u.name + "." + u.format);
            if (!std::filesystem::exists(dir / rel))
                write_text_file(dir / rel, u.content);
            script.sources.push_back(ScriptSource{u.name, rel});
        }
        for (const auto& op : s.advisor->session().log())
            script.steps.push_back(ScriptStep{0, op});
        json meta = {{"id", s.id},
                     {"created_at", s.created_at},
                     {"state_version", s.version},
                     {"dismissed", std::vector<std::string>(s.advisor->dismissed().begin(),
                                                            s.advisor->dismissed().end())}};
        write_text_file(dir / "session.merge", write_script(script));
        write_text_file(dir / "session.json", meta.dump(2) + "\n");
    }

    void restore()
    {
        if (!config.data_dir)
            return;
        std::filesystem::create_directories(*config.data_dir);
        for (const auto& entry : std::filesystem::directory_iterator(*config.data_dir)) {
            if (!entry.is_directory() || !std::filesystem::exists(entry.path() / "session.json"))
                continue;
            try {
                auto meta = json::parse(xml::read_file(entry.path() / "session.json"));
                auto script = load_script(entry.path() / "session.merge");
                auto s = std::make_shared<Session>();
                s->id = meta.at("id").get<std::string>();
                s->created_at = meta.at("created_at").get<std::string>();
                s->version = meta.at("state_version").get<std::uint64_t>();
                s->engine = script.engine;
                s->match = script.match;
                for (const auto& src : script.sources) {
                    auto ext = src.path.extension().string();
                    s->uploads.push_back(Upload{src.name, ext == ".xml" ? "xml" : "owl",
                                                xml::read_file(entry.path() / src.path)});
                }
                s->advisor = std::make_unique<Advisor>(replay(script, &s->warnings));
                for (const auto& key : meta.value("dismissed", std::vector<std::string>{}))
                    s->advisor->dismiss(key, false);
                sessions[s->id] = std::move(s);
            } catch (const std::exception& e) {
                restore_errors.push_back(entry.path().string() + ": " + e.what());
            }
        }
    }

    // ---- sessions -------------------------------------------------------

    std::string new_id()
    {
        static constexpr char hex[] = "0123456789abcdef";
        std::string id;
        auto bits = rng();
        for (int i = 0; i < 16; ++i, bits >>= 4)
            id += hex[bits & 0xF];
        return id;
    }

    std::shared_ptr<Session> find(const std::string& id) const
    {
        std::lock_guard lock(registry_mu);
        auto it = sessions.find(id);
        if (it == sessions.end())
            throw Error(ErrorCode::UnknownSession, "no session '" + id + "'");
        return it->second;
    }

    std::shared_ptr<Session> create(std::vector<Upload> uploads, const json& options)
    {
        auto s = std::make_shared<Session>();
        s->created_at = now_utc();
        if (options.contains("merged"))
            s->engine.merged_name = options.at("merged").get<std::string>();
        if (options.contains("suffix_policy")) {
            auto p = parse_suffix_policy(options.at("suffix_policy").get<std::string>());
            if (!p)
                throw Error(ErrorCode::InvalidArgument, "unknown suffix policy");
            s->engine.suffix_policy = *p;
        }
        if (options.contains("threshold"))
            s->match.threshold = options.at("threshold").get<double>();
        std::vector<Ontology> sources;
        for (auto& u : uploads)
            sources.push_back(load_upload(u, s->warnings));
        s->uploads = std::move(uploads);
        AdvisorConfig ac;
        ac.match = s->match;
        s->advisor = std::make_unique<Advisor>(MergeSession(std::move(sources), s->engine), ac);
        {
            std::lock_guard lock(registry_mu);
            do
                s->id = new_id();
            while (sessions.contains(s->id));
            sessions[s->id] = s;
        }
        persist(*s);
        return s;
    }

    static void check_version(const Session& s, const json& body, bool required)
    {
        if (!body.contains("state_version")) {
            if (required)
                throw HttpError{400, "invalid-argument", "state_version is required"};
            return;
        }
        auto seen = body.at("state_version").get<std::uint64_t>();
        if (seen != s.version)
            throw Error(ErrorCode::VersionConflict, "state version " + std::to_string(seen) +
                                                        " is stale; current version is " + std::to_string(s.version));
    }

    json step_json(Session& s, const StepResult& r)
    {
        json out = {{"state_version", s.version},
                    {"record", codec::to_json(r.record)},
                    {"suggestions", suggestions_json(r.suggestions)},
                    {"conflicts", conflicts_json(r.conflicts)}};
        if (r.explanation)
            out["explanation"] = codec::to_json(*r.explanation);
        return out;
    }

    json apply(Session& s, const Operation& op)
    {
        auto result = s.advisor->step(op);
        ++s.version;
        persist(s);
        return step_json(s, result);
    }

    // ---- HTTP -----------------------------------------------------------

    using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

    static void send(httplib::Response& res, int status, const json& body)
    {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    Handler guarded(std::function<json(const httplib::Request&, httplib::Response&)> fn)
    {
        return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
            try {
                auto body = fn(req, res);
                if (!body.is_null())
                    send(res, res.status == -1 ? 200 : res.status, body);
            } catch (const HttpError& e) {
                send(res, e.status, {{"error", e.code}, {"message", e.message}});
            } catch (const StepError& e) {
                send(res, status_for(e.cause()), codec::error_json(e.cause(), e.what()));
            } catch (const Error& e) {
                json body = codec::error_json(e.code(), e.what());
                int status = status_for(e.code());
                if (status == 422)
                    body["operation_error"] = true;
                send(res, status, body);
            } catch (const json::exception& e) {
                send(res, 400, {{"error", "invalid-argument"}, {"message", e.what()}});
            } catch (const std::exception& e) {
                send(res, 500, {{"error", "internal"}, {"message", e.what()}});
            }
        };
    }

    template <class Fn>
    Handler with_session(Fn fn)
    {
        return guarded([this, fn](const httplib::Request& req, httplib::Response& res) -> json {
            auto s = find(req.matches[1]);
            std::lock_guard lock(s->mu);
            return fn(*s, req, res);
        });
    }

    void routes()
    {
        http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                  {"Access-Control-Allow-Headers", "Content-Type"},
                                  {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
        http.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

        http.Get("/health", guarded([](const httplib::Request&, httplib::Response&) -> json {
                     return {{"status", "ok"}};
                 }));

        http.Get("/sessions", guarded([this](const httplib::Request&, httplib::Response&) -> json {
                     std::vector<std::shared_ptr<Session>> list;
                     {
                         std::lock_guard lock(registry_mu);
                         for (const auto& [id, s] : sessions)
                             list.push_back(s);
                     }
                     json out = json::array();
                     for (const auto& s : list) {
                         std::lock_guard lock(s->mu);
                         out.push_back(summary(*s));
                     }
                     return {{"sessions", out}};
                 }));

        http.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) -> json {
                      std::vector<Upload> uploads;
                      json options = json::object();
                      if (req.is_multipart_form_data()) {
                          // OWL documents carry their own name; XML ones are named after the file
                          for (const auto& f : req.get_file_values("source")) {
                              auto format = format_of(f.filename, f.content);
                              uploads.push_back(Upload{format == "xml" ? stem(f.filename) : "", format, f.content});
                          }
                          for (const char* key : {"merged", "suffix_policy"})
                              if (req.has_file(key))
                                  options[key] = req.get_file_value(key).content;
                          if (req.has_file("threshold"))
                              options["threshold"] = std::stod(req.get_file_value("threshold").content);
                      } else {
                          auto body = parse_body(req);
                          for (const auto& src : body.value("sources", json::array())) {
                              Upload u;
                              u.name = src.value("name", "");
                              u.content = src.at("content").get<std::string>();
                              u.format = src.value("format", format_of(u.name, u.content));
                              uploads.push_back(std::move(u));
                          }
                          options = body.value("config", json::object());
                      }
                      if (uploads.size() < 2)
                          throw HttpError{400, "invalid-argument", "a session needs at least two sources"};
                      auto s = create(std::move(uploads), options);
                      std::lock_guard lock(s->mu);
                      res.status = 201;
                      return state_json(*s);
                  }));

        const std::string base = R"(/sessions/([0-9a-zA-Z_-]+))";

        http.Get(base, with_session([](Session& s, const httplib::Request&, httplib::Response&) -> json {
                     return state_json(s);
                 }));

        http.Get(base + "/suggestions",
                 with_session([](Session& s, const httplib::Request&, httplib::Response&) -> json {
                     return {{"state_version", s.version}, {"suggestions", suggestions_json(s.advisor->suggestions())}};
                 }));

        http.Get(base + "/conflicts", with_session([](Session& s, const httplib::Request&, httplib::Response&) -> json {
                     return {{"state_version", s.version}, {"conflicts", conflicts_json(s.advisor->conflicts())}};
                 }));

        http.Post(base + "/operations",
                  with_session([this](Session& s, const httplib::Request& req, httplib::Response&) -> json {
                      auto body = parse_body(req);
                      check_version(s, body, true);
                      if (!body.contains("op"))
                          throw HttpError{400, "invalid-argument", "missing 'op'"};
                      return apply(s, codec::operation_from_json(body.at("op")));
                  }));

        http.Post(base + "/undo", with_session([this](Session& s, const httplib::Request& req, httplib::Response&) -> json {
                      auto body = parse_body(req);
                      check_version(s, body, false);
                      s.advisor->undo();
                      ++s.version;
                      persist(s);
                      return {{"state_version", s.version},
                              {"suggestions", suggestions_json(s.advisor->suggestions())},
                              {"conflicts", conflicts_json(s.advisor->conflicts())}};
                  }));

        http.Post(base + "/preferred",
                  with_session([this](Session& s, const httplib::Request& req, httplib::Response&) -> json {
                      auto body = parse_body(req);
                      check_version(s, body, false);
                      SetPreferred op;
                      if (body.contains("source") && !body.at("source").is_null())
                          op.source = body.at("source").get<std::string>();
                      return apply(s, op);
                  }));

        http.Post(base + "/dismiss",
                  with_session([this](Session& s, const httplib::Request& req, httplib::Response&) -> json {
                      auto body = parse_body(req);
                      auto key = body.value("key", "");
                      if (!s.advisor->dismiss(key))
                          throw Error(ErrorCode::InvalidArgument, "no standing suggestion '" + key + "'");
                      persist(s);
                      return {{"state_version", s.version},
                              {"dismissed", key},
                              {"suggestions", suggestions_json(s.advisor->suggestions())}};
                  }));

        http.Get(base + "/export", with_session([](Session& s, const httplib::Request& req, httplib::Response& res) -> json {
                     std::string format = "canonical";
                     if (req.has_param("format"))
                         format = req.get_param_value("format");
                     else if (req.get_header_value("Accept").find("rdf+xml") != std::string::npos)
                         format = "owl";
                     const auto& merged = s.advisor->session().merged();
                     if (format == "canonical")
                         res.set_content(write_canonical(merged), "text/plain; charset=utf-8");
                     else if (format == "owl")
                         res.set_content(write_owl(merged), "application/rdf+xml");
                     else
                         throw HttpError{400, "invalid-argument", "format must be canonical or owl"};
                     res.status = 200;
                     return nullptr;
                 }));
    }
};

Server::Server(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Server::~Server()
{
    stop();
}

int Server::bind_any_port(const std::string& host)
{
    int port = impl_->http.bind_to_any_port(host);
    impl_->bound = port > 0;
    return impl_->bound ? port : -1;
}

bool Server::bind(const std::string& host, int port)
{
    impl_->bound = impl_->http.bind_to_port(host, port);
    return impl_->bound;
}

bool Server::run()
{
    return impl_->bound && impl_->http.listen_after_bind();
}

void Server::stop()
{
    if (impl_ && impl_->http.is_running())
        impl_->http.stop();
}

void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

bool Server::running() const { return impl_->http.is_running(); }

std::size_t Server::session_count() const
{
    std::lock_guard lock(impl_->registry_mu);
    return impl_->sessions.size();
}

const std::vector<std::string>& Server::restore_errors() const { return impl_->restore_errors; }

} // namespace ontomerge::service
