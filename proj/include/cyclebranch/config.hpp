#pragma once

#include <map>
#include <string>

#include "cyclebranch/hbcore.hpp"
#include "cyclebranch/lvmodel.hpp"

namespace cyclebranch {

// Flat key=value text with [section] headers; '#' starts a comment. Keys are
// unique per section, whitespace around keys and values is trimmed.
class ConfigFile {
  public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;
    const std::string& get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const;
    int get_int_or(const std::string& section, const std::string& key, int fallback) const;

  private:
    std::string origin_;
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

// [system] section: a, b, c, d positive reals, term in {arctan_linear,
// quad_logistic, cubic_logistic}, optional name.
LVSystem load_lv_system(const std::string& path);

// [symbol] section: degree l >= 2, then one row per coefficient a0..a{l-1},
// each a space-separated list of lambda-polynomial coefficients (ascending).
SymbolPolynomial load_symbol(const std::string& path);

double parse_double(const std::string& text, const std::string& what);

}  // namespace cyclebranch
