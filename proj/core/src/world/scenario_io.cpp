#include "teamsim/world/scenario_io.hpp"

#include <fstream>
#include <sstream>

namespace teamsim::world {
namespace {

using nlohmann::json;

template <typename T>
T field(const json& j, const char* key) {
    if (!j.contains(key)) throw InvalidConfig(std::string("missing key '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidConfig(std::string("bad value for '") + key + "': " + e.what());
    }
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidConfig(std::string("bad value for '") + key + "': " + e.what());
    }
}

Sensitivity parse_sensitivity(const std::string& s) {
    if (s == "open") return Sensitivity::open;
    if (s == "sensitive") return Sensitivity::sensitive;
    throw InvalidConfig("sensitivity must be 'open' or 'sensitive', got '" + s + "'");
}

GeneratorParams params_from_json(const json& j) {
    GeneratorParams g;
    maybe(j, "lambda", g.lambda);
    maybe(j, "tau", g.tau);
    maybe(j, "q_threshold", g.q_threshold);
    maybe(j, "reliability_spread", g.reliability_spread);
    return g;
}

json params_to_json(const GeneratorParams& g) {
    return {{"lambda", g.lambda}, {"tau", g.tau}, {"q_threshold", g.q_threshold},
            {"reliability_spread", g.reliability_spread}};
}

}  // namespace

Scenario scenario_from_json(const json& j) {
    if (!j.is_object()) throw InvalidConfig("scenario must be a JSON object");
    Scenario s;
    s.description = field<std::string>(j, "description");
    for (const auto& h : field<json>(j, "hypotheses")) {
        s.hypotheses.push_back({field<std::string>(h, "id"), field<std::string>(h, "label")});
    }
    s.ground_truth = field<std::string>(j, "ground_truth");
    for (const auto& js : field<json>(j, "sources")) {
        Source src;
        src.id = field<std::string>(js, "id");
        src.label = field<std::string>(js, "label");
        src.sensitivity = parse_sensitivity(field<std::string>(js, "sensitivity"));
        src.discovered = field<bool>(js, "discovered");
        if (js.contains("linked_question") && !js.at("linked_question").is_null()) {
            src.linked_question = field<std::string>(js, "linked_question");
        }
        src.n_items = field<int>(js, "n_items");
        src.signal_rate = field<double>(js, "signal_rate");
        src.reliability_mean = field<double>(js, "reliability_mean");
        s.sources.push_back(std::move(src));
    }
    s.generator = params_from_json(field<json>(j, "generator"));
    s.seed = field<std::uint64_t>(j, "seed");

    if (j.contains("items")) {
        for (const auto& ji : field<json>(j, "items")) {
            InfoItem item;
            item.id = field<std::string>(ji, "id");
            item.source_id = field<std::string>(ji, "source_id");
            item.true_class = field<std::string>(ji, "true_class");
            item.true_reliability = field<double>(ji, "true_reliability");
            if (!s.source_index(item.source_id)) {
                throw InvalidConfig("item '" + item.id + "' references unknown source '" + item.source_id + "'");
            }
            s.scripted_items[item.source_id].push_back(std::move(item));
        }
        for (auto& src : s.sources) {
            if (auto it = s.scripted_items.find(src.id); it != s.scripted_items.end()) {
                src.n_items = static_cast<int>(it->second.size());
            }
        }
    }
    s.validate();
    return s;
}

json to_json(const Scenario& s) {
    json j;
    j["description"] = s.description;
    j["hypotheses"] = json::array();
    for (const auto& h : s.hypotheses) j["hypotheses"].push_back({{"id", h.id}, {"label", h.label}});
    j["ground_truth"] = s.ground_truth;
    j["sources"] = json::array();
    for (const auto& src : s.sources) {
        json js = {{"id", src.id},
                   {"label", src.label},
                   {"sensitivity", to_string(src.sensitivity)},
                   {"discovered", src.discovered},
                   {"n_items", src.n_items},
                   {"signal_rate", src.signal_rate},
                   {"reliability_mean", src.reliability_mean}};
        if (src.linked_question) js["linked_question"] = *src.linked_question;
        j["sources"].push_back(std::move(js));
    }
    j["generator"] = params_to_json(s.generator);
    j["seed"] = s.seed;
    if (!s.scripted_items.empty()) {
        j["items"] = json::array();
        for (const auto& src : s.sources) {
            auto it = s.scripted_items.find(src.id);
            if (it == s.scripted_items.end()) continue;
            for (const auto& item : it->second) {
                j["items"].push_back({{"id", item.id},
                                      {"source_id", item.source_id},
                                      {"true_class", item.true_class},
                                      {"true_reliability", item.true_reliability}});
            }
        }
    }
    return j;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot open scenario file " + path.string());
    try {
        return scenario_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw InvalidConfig(path.string() + ": " + e.what());
    }
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << to_json(s).dump(2) << '\n';
}

ScenarioConfig scenario_config_from_json(const json& j) {
    if (!j.is_object()) throw InvalidConfig("scenario config must be a JSON object");
    ScenarioConfig c;
    maybe(j, "description", c.description);
    maybe(j, "n_hypotheses", c.n_hypotheses);
    maybe(j, "n_sources", c.n_sources);
    maybe(j, "n_sensitive", c.n_sensitive);
    maybe(j, "n_linked", c.n_linked);
    maybe(j, "items_per_source", c.items_per_source);
    maybe(j, "p_signal", c.p_signal);
    maybe(j, "signal_variation", c.signal_variation);
    maybe(j, "reliability_mean", c.reliability_mean);
    if (j.contains("generator")) c.params = params_from_json(j.at("generator"));
    return c;
}

json to_json(const ScenarioConfig& c) {
    return {{"description", c.description},
            {"n_hypotheses", c.n_hypotheses},
            {"n_sources", c.n_sources},
            {"n_sensitive", c.n_sensitive},
            {"n_linked", c.n_linked},
            {"items_per_source", c.items_per_source},
            {"p_signal", c.p_signal},
            {"signal_variation", c.signal_variation},
            {"reliability_mean", c.reliability_mean},
            {"generator", params_to_json(c.params)}};
}

}  // namespace teamsim::world
