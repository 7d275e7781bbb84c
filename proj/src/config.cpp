#include "gomopt/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "gomopt/errors.hpp"

namespace gomopt {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_number(const std::string& v, const std::string& origin, int line_no) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (const std::exception&) {
        throw parse_error(origin + ":" + std::to_string(line_no) +
                          ": not a number: '" + v + "'");
    }
}

}  // namespace

Config parse_config_text(const std::string& text, const std::string& origin) {
    static const char* kNumericKeys[] = {"r",  "delta", "beta", "gamma", "zeta",
                                         "mu", "sigma", "m0",   "a",     "q"};
    std::map<std::string, std::string> raw;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw parse_error(origin + ":" + std::to_string(line_no) +
                              ": expected key=value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const bool numeric = std::find(std::begin(kNumericKeys), std::end(kNumericKeys),
                                       key) != std::end(kNumericKeys);
        if (!numeric && key != "efficacy")
            throw parse_error(origin + ":" + std::to_string(line_no) +
                              ": unknown key '" + key + "'");
        if (numeric) parse_number(value, origin, line_no);
        if (raw.count(key))
            throw parse_error(origin + ":" + std::to_string(line_no) +
                              ": duplicate key '" + key + "'");
        raw[key] = value;
    }

    Config cfg;
    ModelParams defaults;
    auto num = [&](const char* key, double fallback) {
        const auto it = raw.find(key);
        return it == raw.end() ? fallback : std::stod(it->second);
    };
    cfg.params = ModelParams(num("r", defaults.r), num("delta", defaults.delta),
                             num("beta", defaults.beta), num("gamma", defaults.gamma),
                             num("zeta", defaults.zeta), num("mu", defaults.mu),
                             num("sigma", defaults.sigma), num("m0", defaults.m0));
    const std::string kind = raw.count("efficacy") ? raw["efficacy"] : "zero";
    if (kind == "zero") {
        cfg.efficacy = EfficacyModel::zero();
    } else if (kind == "isoelastic") {
        if (!raw.count("a") || !raw.count("q"))
            throw parse_error(origin + ": isoelastic efficacy needs keys a and q");
        cfg.efficacy = EfficacyModel::isoelastic(num("a", 0.0), num("q", 0.0));
    } else {
        throw parse_error(origin + ": efficacy must be 'zero' or 'isoelastic', got '" +
                          kind + "'");
    }
    cfg.raw = std::move(raw);
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path);
}

uint64_t config_hash(const std::map<std::string, std::string>& raw) {
    uint64_t h = 0xCBF29CE484222325ULL;  // std::map iterates keys in order
    for (const auto& [key, value] : raw) {
        for (const std::string* part : {&key, &value}) {
            for (char ch : *part) {
                h ^= static_cast<unsigned char>(ch);
                h *= 0x100000001B3ULL;
            }
            h ^= '=';
            h *= 0x100000001B3ULL;
        }
    }
    return h;
}

}  // namespace gomopt
