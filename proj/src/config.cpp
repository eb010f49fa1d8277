#include "cyclebranch/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cyclebranch/errors.hpp"

namespace cyclebranch {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

double parse_double(const std::string& text, const std::string& what) {
    const char* begin = text.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ConfigError("cannot parse '" + text + "' as a number for " + what);
    return v;
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            cfg.sections_[section];
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        auto& sect = cfg.sections_[section];
        if (sect.count(key))
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" +
                              key + "'");
        sect[key] = value;
    }
    return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

const std::string& ConfigFile::get(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    if (it != sections_.end()) {
        auto kv = it->second.find(key);
        if (kv != it->second.end()) return kv->second;
    }
    throw ConfigError(origin_ + ": missing key '" + key + "' in section [" + section + "]");
}

std::string ConfigFile::get_or(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
    return parse_double(get(section, key), "[" + section + "] " + key);
}

double ConfigFile::get_double_or(const std::string& section, const std::string& key,
                                 double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

int ConfigFile::get_int_or(const std::string& section, const std::string& key,
                           int fallback) const {
    if (!has(section, key)) return fallback;
    const std::string& text = get(section, key);
    try {
        std::size_t used = 0;
        int v = std::stoi(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ": cannot parse '" + text + "' as an integer for [" +
                          section + "] " + key);
    }
}

LVSystem load_lv_system(const std::string& path) {
    ConfigFile cfg = ConfigFile::parse_file(path);
    double a = cfg.get_double("system", "a");
    double b = cfg.get_double("system", "b");
    double c = cfg.get_double("system", "c");
    double d = cfg.get_double("system", "d");
    InteractionTerm term = InteractionTerm::from_name(cfg.get("system", "term"));
    std::string name = cfg.get_or("system", "name", "");
    return LVSystem(a, b, c, d, term, name);
}

SymbolPolynomial load_symbol(const std::string& path) {
    ConfigFile cfg = ConfigFile::parse_file(path);
    int degree = cfg.get_int_or("symbol", "degree", 0);
    if (degree < 2) throw ConfigError(path + ": [symbol] degree must be an integer >= 2");
    std::vector<LambdaPoly> polys;
    polys.reserve(static_cast<std::size_t>(degree));
    for (int k = 0; k < degree; ++k) {
        std::string key = "a" + std::to_string(k);
        if (!cfg.has("symbol", key))
            throw ConfigError(path + ": missing coefficient row '" + key + "'");
        std::istringstream row(cfg.get("symbol", key));
        LambdaPoly poly;
        std::string tok;
        while (row >> tok) poly.coeffs.push_back(parse_double(tok, key));
        if (poly.coeffs.empty())
            throw ConfigError(path + ": coefficient row '" + key + "' is empty");
        polys.push_back(std::move(poly));
    }
    return SymbolPolynomial::from_lambda_polys(std::move(polys));
}

}  // namespace cyclebranch
