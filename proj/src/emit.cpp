#include "cyclebranch/emit.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cyclebranch/errors.hpp"

namespace cyclebranch {

std::string format_g16(double v) {
    if (!std::isfinite(v)) {
        if (std::isnan(v)) return "nan";
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ToolError("cannot open for writing: " + path);
    out << content;
    out.flush();
    if (!out) throw ToolError("write failed: " + path);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows,
               const std::vector<std::string>& trailing_comments) {
    std::ostringstream text;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) text << ',';
        text << header[i];
    }
    text << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw ConfigError("write_csv: row width does not match the header");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) text << ',';
            text << format_g16(row[i]);
        }
        text << '\n';
    }
    for (const auto& comment : trailing_comments) text << "# " << comment << '\n';
    write_text_file(path, text.str());
}

namespace {

std::string escape_json(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    return out;
}

std::string json_number(double v) {
    // JSON has no inf/nan literals; artifacts should never contain them anyway
    if (!std::isfinite(v)) return "null";
    return format_g16(v);
}

}  // namespace

void JsonWriter::separator() {
    if (first_.empty()) throw ConfigError("JsonWriter: no open scope");
    if (!first_.back()) out_ += ',';
    first_.back() = false;
}

void JsonWriter::write_key(const std::string& key) {
    separator();
    out_ += '"';
    out_ += escape_json(key);
    out_ += "\":";
}

JsonWriter& JsonWriter::begin_object() {
    if (!first_.empty()) separator();
    out_ += '{';
    first_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::begin_object(const std::string& key) {
    write_key(key);
    out_ += '{';
    first_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    if (first_.empty()) throw ConfigError("JsonWriter: unbalanced end_object");
    out_ += '}';
    first_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::begin_array(const std::string& key) {
    write_key(key);
    out_ += '[';
    first_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    if (first_.empty()) throw ConfigError("JsonWriter: unbalanced end_array");
    out_ += ']';
    first_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, double v) {
    write_key(key);
    out_ += json_number(v);
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, int v) {
    write_key(key);
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, bool v) {
    write_key(key);
    out_ += v ? "true" : "false";
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, const char* v) {
    return field(key, std::string(v));
}

JsonWriter& JsonWriter::field(const std::string& key, const std::string& v) {
    write_key(key);
    out_ += '"';
    out_ += escape_json(v);
    out_ += '"';
    return *this;
}

JsonWriter& JsonWriter::element(double v) {
    separator();
    out_ += json_number(v);
    return *this;
}

const std::string& JsonWriter::str() const {
    if (!first_.empty()) throw ConfigError("JsonWriter: unclosed scopes remain");
    return out_;
}

void write_svg(const std::string& path, const std::vector<std::pair<double, double>>& series,
               const SvgOptions& options) {
    if (series.empty()) throw ConfigError("write_svg: empty series");
    std::vector<std::pair<double, double>> pts = series;
    for (auto& p : pts) {
        if (!std::isfinite(p.first) || !std::isfinite(p.second))
            throw ConfigError("write_svg: non-finite value in series");
        if (options.log_x) {
            if (p.first <= 0) throw ConfigError("write_svg: nonpositive x on a log axis");
            p.first = std::log10(p.first);
        }
        if (options.log_y) {
            if (p.second <= 0) throw ConfigError("write_svg: nonpositive y on a log axis");
            p.second = std::log10(p.second);
        }
    }
    double x_min = pts.front().first, x_max = x_min;
    double y_min = pts.front().second, y_max = y_min;
    for (const auto& p : pts) {
        x_min = std::min(x_min, p.first);
        x_max = std::max(x_max, p.first);
        y_min = std::min(y_min, p.second);
        y_max = std::max(y_max, p.second);
    }
    if (x_max == x_min) {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if (y_max == y_min) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    const double margin = 60.0;
    const double plot_w = options.width - 2 * margin;
    const double plot_h = options.height - 2 * margin;

    auto px = [&](double x) { return margin + (x - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double y) { return options.height - margin - (y - y_min) / (y_max - y_min) * plot_h; };

    char buf[64];
    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << options.width
        << "\" height=\"" << options.height << "\" viewBox=\"0 0 " << options.width << ' '
        << options.height << "\">\n";
    svg << "  <rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
    svg << "  <text x=\"" << options.width / 2 << "\" y=\"" << options.height - margin / 3
        << "\" text-anchor=\"middle\" font-size=\"14\">" << options.x_label
        << (options.log_x ? " (log10)" : "") << "</text>\n";
    svg << "  <text x=\"" << margin / 3 << "\" y=\"" << options.height / 2
        << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 " << margin / 3
        << ' ' << options.height / 2 << ")\">" << options.y_label
        << (options.log_y ? " (log10)" : "") << "</text>\n";
    svg << "  <polyline fill=\"none\" stroke=\"#1f6fbf\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) svg << ' ';
        std::snprintf(buf, sizeof(buf), "%.3f,%.3f", px(pts[i].first), py(pts[i].second));
        svg << buf;
    }
    svg << "\"/>\n</svg>\n";
    write_text_file(path, svg.str());
}

}  // namespace cyclebranch
