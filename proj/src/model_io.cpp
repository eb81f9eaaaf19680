#include "halearn/model_io.hpp"

#include <filesystem>
#include <fstream>
#include <system_error>

#include <json.hpp>

#include "halearn/errors.hpp"

namespace halearn {

using nlohmann::json;

namespace {

json flow_to_json(const PolynomialFlow& flow) {
    json outputs = json::array();
    for (const auto& out : flow.outputs) {
        json terms = json::array();
        for (std::size_t j = 0; j < flow.exponents.size(); ++j)
            terms.push_back({{"coef", out.coef[j]}, {"exponents", flow.exponents[j]}});
        outputs.push_back({{"name", out.name}, {"rmse", out.rmse}, {"terms", terms}});
    }
    return {{"degree", flow.degree}, {"inputs", flow.inputs}, {"outputs", outputs}};
}

PolynomialFlow flow_from_json(const json& j) {
    PolynomialFlow flow;
    flow.degree = j.at("degree").get<int>();
    flow.inputs = j.at("inputs").get<std::vector<std::string>>();
    flow.exponents = monomial_basis(flow.inputs.size(), flow.degree);
    for (const auto& oj : j.at("outputs")) {
        PolynomialFlow::Output out;
        out.name = oj.at("name").get<std::string>();
        out.rmse = oj.at("rmse").get<double>();
        const auto& terms = oj.at("terms");
        if (terms.size() != flow.exponents.size())
            throw Error(ErrorCode::MalformedDocument, "flow term count mismatch");
        out.coef.resize(terms.size());
        for (std::size_t t = 0; t < terms.size(); ++t) {
            if (terms[t].at("exponents").get<std::vector<int>>() != flow.exponents[t])
                throw Error(ErrorCode::MalformedDocument, "flow basis out of order");
            out.coef[t] = terms[t].at("coef").get<double>();
        }
        flow.outputs.push_back(std::move(out));
    }
    return flow;
}

json config_to_json(const LearnerConfig& c) {
    return {{"beta", c.beta},
            {"degree", c.degree},
            {"diag_threshold", c.diag_threshold},
            {"dist_threshold", c.dist_threshold},
            {"max_stored", c.max_stored},
            {"min_size", c.min_size},
            {"penalty", c.penalty},
            {"ridge", c.ridge},
            {"time_var_threshold", c.time_var_threshold},
            {"vicinity", c.vicinity},
            {"window", c.window}};
}

LearnerConfig config_from_json(const json& j) {
    LearnerConfig c;
    c.beta = j.at("beta").get<double>();
    c.degree = j.at("degree").get<int>();
    c.diag_threshold = j.at("diag_threshold").get<double>();
    c.dist_threshold = j.at("dist_threshold").get<double>();
    c.max_stored = j.at("max_stored").get<std::size_t>();
    c.min_size = j.at("min_size").get<std::size_t>();
    c.penalty = j.at("penalty").get<double>();
    c.ridge = j.at("ridge").get<double>();
    c.time_var_threshold = j.at("time_var_threshold").get<double>();
    c.vicinity = j.at("vicinity").get<std::size_t>();
    c.window = j.at("window").get<std::size_t>();
    return c;
}

json jump_to_json(const JumpCondition& jump) {
    json clauses = json::array();
    for (const Clause& c : jump.clauses)
        clauses.push_back({{"after", c.after}, {"before", c.before}, {"channel", c.channel}});
    json j = {{"ambiguous", jump.ambiguous}, {"clauses", clauses}};
    if (jump.time_condition)
        j["time"] = *jump.time_condition;
    else
        j["time"] = nullptr;
    return j;
}

JumpCondition jump_from_json(const json& j) {
    JumpCondition jump;
    jump.ambiguous = j.at("ambiguous").get<bool>();
    for (const auto& cj : j.at("clauses"))
        jump.clauses.push_back({cj.at("channel").get<std::string>(),
                                cj.at("before").get<double>(), cj.at("after").get<double>()});
    if (!j.at("time").is_null()) jump.time_condition = j.at("time").get<double>();
    return jump;
}

} // namespace

std::string serialize_model(const ModelStore& store) {
    json doc;
    doc["version"] = kModelSchemaVersion;
    doc["kind"] = "halearn-model";
    doc["config"] = config_to_json(store.config);
    doc["traces"] = store.traces_processed;
    doc["next_id"] = store.next_id;

    if (store.normalization) {
        json ranges = json::array();
        for (auto [lo, hi] : store.normalization->range)
            ranges.push_back({{"max", hi}, {"min", lo}});
        doc["normalization"] = {
            {"channels", ranges},
            {"time_span",
             json::array({store.normalization->time_start, store.normalization->time_end})}};
    } else {
        doc["normalization"] = nullptr;
    }

    if (!store.schema.channels.empty()) {
        json channels = json::array();
        for (const Channel& ch : store.schema.channels)
            channels.push_back(
                {{"name", ch.name}, {"role", ch.role == Role::Input ? "input" : "output"}});
        doc["schema"] = {{"channels", channels}, {"time_index", store.schema.time_index}};
    } else {
        doc["schema"] = nullptr;
    }

    json modes = json::array();
    for (const auto& [id, state] : store.states) {
        json segments = json::array();
        for (const StoredSegment& seg : state.segments)
            segments.push_back({{"channels", seg.channels},
                                {"duration", seg.duration},
                                {"end", seg.end},
                                {"period", seg.period},
                                {"start", seg.start}});
        json mode = {{"dwell", state.dwell},
                     {"id", id},
                     {"segments", segments},
                     {"visits", state.visits}};
        mode["flow"] = state.flow ? flow_to_json(*state.flow) : json(nullptr);
        mode["flow_error"] = state.flow_error;
        modes.push_back(std::move(mode));
    }
    doc["modes"] = modes;

    json switches = json::array();
    for (const auto& [key, tr] : store.transitions) {
        json nbs = json::array();
        for (const StoredNeighborhood& nb : tr.segments)
            nbs.push_back(
                {{"center", nb.center}, {"channels", nb.channels}, {"times", nb.times}});
        switches.push_back({{"confidence", tr.confidence},
                            {"dist_mean", tr.dist_mean},
                            {"dst", key.second},
                            {"jump", jump_to_json(tr.jump)},
                            {"neighborhoods", nbs},
                            {"src", key.first},
                            {"support", tr.support},
                            {"updates", tr.updates}});
    }
    doc["switches"] = switches;

    return doc.dump(2) + "\n";
}

ModelStore deserialize_model(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& err) {
        throw Error(ErrorCode::MalformedDocument, err.what());
    }
    try {
        if (!doc.is_object() || !doc.contains("version"))
            throw Error(ErrorCode::MalformedDocument, "not a model document");
        if (doc.at("version").get<int>() != kModelSchemaVersion)
            throw Error(ErrorCode::SchemaVersionMismatch,
                        "expected version " + std::to_string(kModelSchemaVersion));
        if (doc.at("kind").get<std::string>() != "halearn-model")
            throw Error(ErrorCode::MalformedDocument, "unknown document kind");

        ModelStore store;
        store.config = config_from_json(doc.at("config"));
        store.traces_processed = doc.at("traces").get<std::size_t>();
        store.next_id = doc.at("next_id").get<int>();

        if (!doc.at("normalization").is_null()) {
            NormalizationParams params;
            for (const auto& rj : doc.at("normalization").at("channels"))
                params.range.emplace_back(rj.at("min").get<double>(), rj.at("max").get<double>());
            params.time_start = doc.at("normalization").at("time_span").at(0).get<double>();
            params.time_end = doc.at("normalization").at("time_span").at(1).get<double>();
            store.normalization = params;
        }
        if (!doc.at("schema").is_null()) {
            store.schema.time_index = doc.at("schema").at("time_index").get<std::size_t>();
            for (const auto& cj : doc.at("schema").at("channels")) {
                Channel ch;
                ch.name = cj.at("name").get<std::string>();
                std::string role = cj.at("role").get<std::string>();
                if (role != "input" && role != "output")
                    throw Error(ErrorCode::MalformedDocument, "bad channel role '" + role + "'");
                ch.role = role == "input" ? Role::Input : Role::Output;
                store.schema.channels.push_back(ch);
            }
        }

        for (const auto& mj : doc.at("modes")) {
            StateRecord state;
            state.id = mj.at("id").get<int>();
            state.visits = mj.at("visits").get<std::size_t>();
            state.dwell = mj.at("dwell").get<std::vector<double>>();
            for (const auto& sj : mj.at("segments")) {
                StoredSegment seg;
                seg.start = sj.at("start").get<std::size_t>();
                seg.end = sj.at("end").get<std::size_t>();
                seg.period = sj.at("period").get<double>();
                seg.duration = sj.at("duration").get<double>();
                seg.channels = sj.at("channels").get<std::vector<std::vector<double>>>();
                state.segments.push_back(std::move(seg));
            }
            if (!mj.at("flow").is_null()) state.flow = flow_from_json(mj.at("flow"));
            state.flow_error = mj.at("flow_error").get<std::string>();
            int id = state.id;
            store.states.emplace(id, std::move(state));
        }

        for (const auto& tj : doc.at("switches")) {
            TransitionRecord tr;
            tr.src = tj.at("src").get<int>();
            tr.dst = tj.at("dst").get<int>();
            tr.support = tj.at("support").get<std::size_t>();
            tr.updates = tj.at("updates").get<std::size_t>();
            tr.confidence = tj.at("confidence").get<std::vector<double>>();
            tr.dist_mean = tj.at("dist_mean").get<std::vector<double>>();
            tr.jump = jump_from_json(tj.at("jump"));
            for (const auto& nj : tj.at("neighborhoods")) {
                StoredNeighborhood nb;
                nb.center = nj.at("center").get<std::size_t>();
                nb.times = nj.at("times").get<std::vector<double>>();
                nb.channels = nj.at("channels").get<std::vector<std::vector<double>>>();
                tr.segments.push_back(std::move(nb));
            }
            store.transitions.emplace(std::make_pair(tr.src, tr.dst), std::move(tr));
        }
        store.check_invariants();
        return store;
    } catch (const json::exception& err) {
        throw Error(ErrorCode::MalformedDocument, err.what());
    }
}

void save_model(const ModelStore& store, const std::string& path) {
    namespace fs = std::filesystem;
    std::string text = serialize_model(store);
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot open '" + tmp.string() + "'");
        out << text;
        if (!out) throw Error(ErrorCode::IoError, "write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::IoError, "cannot rename temp file onto '" + path + "'");
    }
}

ModelStore load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_model(text);
}

} // namespace halearn
