#include "billiard/domain_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace billiard {

using nlohmann::json;

DomainSpec parse_domain_spec_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw BadSpec(std::string("domain spec is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("type"))
        throw BadSpec("domain spec must be an object with a \"type\" field");

    DomainSpec spec;
    const std::string type = j.at("type").get<std::string>();
    const json params = j.value("params", json::object());
    try {
        if (type == "circle") {
            spec.kind = DomainSpec::Kind::Circle;
            spec.radius = params.at("R").get<double>();
        } else if (type == "ellipse") {
            spec.kind = DomainSpec::Kind::Ellipse;
            spec.semi_major = params.at("a").get<double>();
            spec.semi_minor = params.at("b").get<double>();
        } else if (type == "support_fourier") {
            spec.kind = DomainSpec::Kind::SupportFourier;
            spec.a0 = params.at("a0").get<double>();
            for (const auto& row : params.value("coefficients", json::array())) {
                if (!row.is_array() || row.size() != 3)
                    throw BadSpec("coefficients must be rows [n, a_n, b_n]");
                SupportMode m;
                m.n = row[0].get<int>();
                m.a = row[1].get<double>();
                m.b = row[2].get<double>();
                spec.modes.push_back(m);
            }
        } else {
            throw BadSpec("unknown domain type \"" + type + "\"");
        }
        spec.nodes = j.value("nodes", 1024);
    } catch (const json::exception& e) {
        throw BadSpec(std::string("domain spec field error: ") + e.what());
    }
    return spec;
}

DomainSpec load_domain_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadSpec("cannot open domain spec file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_domain_spec_json(buf.str());
}

SupportDomain load_domain(const std::string& path) {
    return build_domain(load_domain_spec(path));
}

std::string domain_spec_to_json(const DomainSpec& spec) {
    nlohmann::ordered_json j;
    switch (spec.kind) {
    case DomainSpec::Kind::Circle:
        j["type"] = "circle";
        j["params"] = {{"R", spec.radius}};
        break;
    case DomainSpec::Kind::Ellipse:
        j["type"] = "ellipse";
        j["params"] = {{"a", spec.semi_major}, {"b", spec.semi_minor}};
        break;
    case DomainSpec::Kind::SupportFourier: {
        j["type"] = "support_fourier";
        nlohmann::ordered_json coeffs = nlohmann::ordered_json::array();
        for (const auto& m : spec.modes) coeffs.push_back({m.n, m.a, m.b});
        j["params"] = {{"a0", spec.a0}, {"coefficients", coeffs}};
        break;
    }
    }
    j["nodes"] = spec.nodes;
    return j.dump(2);
}

} // namespace billiard
