#include "eventcast/model_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace eventcast {

PatternConfig pattern_config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw_config(std::string("bad pattern JSON: ") + e.what());
    }
    PatternConfig config;
    if (!j.contains("pattern") || !j["pattern"].is_string())
        throw_config("pattern config needs a 'pattern' string");
    config.pattern = j["pattern"].get<std::string>();
    if (j.contains("predicates")) {
        for (const auto& [name, expr] : j["predicates"].items())
            config.predicates.emplace_back(name, expr.get<std::string>());
    }
    if (j.contains("exclusions")) {
        for (const auto& group : j["exclusions"])
            config.exclusions.push_back(group.get<std::vector<std::string>>());
    }
    if (j.contains("extraPredicates"))
        config.extra_predicates = j["extraPredicates"].get<std::vector<std::string>>();
    if (j.contains("policy")) config.policy = j["policy"].get<std::string>();
    if (config.policy != "strict" && config.policy != "skip-till-any")
        throw_config("policy must be 'strict' or 'skip-till-any'");
    return config;
}

PatternConfig load_pattern_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_io("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return pattern_config_from_json(buffer.str());
}

namespace {

// named predicates may reference each other; resolve lazily with a cycle check
struct NamedPredicates {
    const PatternConfig& config;
    const ExternalRegistry& externals;
    std::map<std::string, Predicate> cache;
    std::set<std::string> in_progress;

    Predicate resolve(const std::string& name) {
        auto it = cache.find(name);
        if (it != cache.end()) return it->second;
        auto ext = externals.find(name);
        if (ext != externals.end()) {
            Predicate p = pred_external(name, ext->second);
            cache.emplace(name, p);
            return p;
        }
        for (const auto& [defined, expr] : config.predicates) {
            if (defined != name) continue;
            if (!in_progress.insert(name).second)
                throw_config("predicate definition cycle through '" + name + "'");
            Predicate p = parse_predicate(expr, [this](const std::string& n) { return resolve(n); });
            in_progress.erase(name);
            cache.emplace(name, p);
            return p;
        }
        return nullptr;
    }
};

}  // namespace

CompiledPattern compile_pattern(const PatternConfig& config, const ExternalRegistry& externals,
                                int state_budget) {
    NamedPredicates named{config, externals, {}, {}};
    const PredicateResolver resolver = [&named](const std::string& name) {
        return named.resolve(name);
    };

    Sre pattern = parse_sre(config.pattern, resolver);
    if (config.policy == "skip-till-any") pattern = rewrite_skip_till_any(pattern);
    Sre streaming = to_streaming(pattern);

    // alphabet: pattern predicates plus the declared extras, syntactically deduped
    std::vector<Predicate> preds = collect_predicates(streaming);
    std::set<std::string> seen;
    for (const auto& p : preds) seen.insert(to_string(p));
    for (const auto& text : config.extra_predicates) {
        Predicate p = parse_predicate(text, resolver);
        if (seen.insert(to_string(p)).second) preds.push_back(std::move(p));
    }
    if (preds.empty()) throw_config("pattern has no predicates to build an alphabet from");

    std::vector<std::vector<int>> exclusion_groups;
    for (const auto& group : config.exclusions) {
        std::vector<int> indices;
        for (const auto& name : group) {
            Predicate p = named.resolve(name);
            if (!p) throw_config("exclusion group references unknown predicate '" + name + "'");
            const std::string key = to_string(p);
            int idx = -1;
            for (size_t i = 0; i < preds.size(); ++i) {
                if (to_string(preds[i]) == key) {
                    idx = static_cast<int>(i);
                    break;
                }
            }
            if (idx < 0)
                throw_config("exclusion group predicate '" + name +
                             "' does not occur in the pattern or extras");
            indices.push_back(idx);
        }
        exclusion_groups.push_back(std::move(indices));
    }

    CompiledPattern out{std::move(pattern), std::move(streaming),
                        build_minterms(std::move(preds), std::move(exclusion_groups)), Dsfa{}, 0};
    for (const auto& m : out.minterms.minterms()) {
        if (!satisfiable_conjunction(m.conjuncts)) ++out.unsatisfiable_minterms;
    }
    out.dsfa = determinize(compile_sfa(out.streaming), out.minterms, state_budget);
    return out;
}

std::string model_to_json(const PredictionSuffixTree& pst, const MintermSet& minterms,
                          const Psa* psa) {
    nlohmann::json j;
    j["version"] = 1;
    j["order"] = pst.max_depth();
    nlohmann::json alphabet = nlohmann::json::array();
    for (const auto& m : minterms.minterms()) alphabet.push_back(m.description());
    j["alphabet"] = std::move(alphabet);

    nlohmann::json nodes = nlohmann::json::array();
    for (int node = 0; node < pst.node_count(); ++node) {
        nlohmann::json n;
        n["label"] = pst.label(node);
        n["gamma"] = pst.distribution(node);
        n["count"] = pst.context_count(node);
        nodes.push_back(std::move(n));
    }
    j["pst"]["nodes"] = std::move(nodes);

    if (psa) {
        nlohmann::json p;
        p["labels"] = psa->labels;
        p["tau"] = psa->tau;
        p["gamma"] = psa->gamma;
        p["pi"] = psa->pi;
        j["psa"] = std::move(p);
    }
    return j.dump(2);
}

LoadedModel model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw_config(std::string("bad model JSON: ") + e.what());
    }
    if (!j.contains("version") || j["version"].get<int>() != 1)
        throw_config("unsupported model version");

    const auto alphabet = j.at("alphabet").get<std::vector<std::string>>();
    const int order = j.at("order").get<int>();
    const int t = static_cast<int>(alphabet.size());

    LoadedModel out{order, alphabet, PredictionSuffixTree(t, order), std::nullopt};
    for (const auto& n : j.at("pst").at("nodes")) {
        const auto label = n.at("label").get<std::vector<int>>();
        const int node = label.empty() ? 0 : out.pst.ensure_node(label);
        out.pst.set_distribution(node, n.at("gamma").get<std::vector<double>>());
        out.pst.set_count(node, n.at("count").get<std::int64_t>());
    }

    if (j.contains("psa")) {
        Psa psa;
        psa.alphabet_size = t;
        psa.labels = j["psa"].at("labels").get<std::vector<std::vector<int>>>();
        psa.tau = j["psa"].at("tau").get<std::vector<int>>();
        psa.gamma = j["psa"].at("gamma").get<std::vector<double>>();
        psa.pi = j["psa"].at("pi").get<std::vector<double>>();
        out.psa = std::move(psa);
    }
    return out;
}

void save_model(const std::string& path, const PredictionSuffixTree& pst,
                const MintermSet& minterms, const Psa* psa) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_io("cannot write '" + path + "'");
    out << model_to_json(pst, minterms, psa);
}

LoadedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_io("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return model_from_json(buffer.str());
}

}  // namespace eventcast
