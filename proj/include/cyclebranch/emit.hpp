#pragma once

#include <string>
#include <utility>
#include <vector>

namespace cyclebranch {

// %.16g rendering used by every artifact; regression tests compare text.
std::string format_g16(double v);

// Header row, then rows at 16 significant digits; trailing comment lines are
// prefixed with '# '. Throws ToolError when the path cannot be written.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows,
               const std::vector<std::string>& trailing_comments = {});

// Minimal streaming JSON writer with caller-controlled key order, so summaries
// are byte-stable across runs. Numbers render via format_g16.
class JsonWriter {
  public:
    JsonWriter& begin_object();
    JsonWriter& begin_object(const std::string& key);
    JsonWriter& end_object();
    JsonWriter& begin_array(const std::string& key);
    JsonWriter& end_array();
    JsonWriter& field(const std::string& key, double v);
    JsonWriter& field(const std::string& key, int v);
    JsonWriter& field(const std::string& key, bool v);
    JsonWriter& field(const std::string& key, const char* v);
    JsonWriter& field(const std::string& key, const std::string& v);
    JsonWriter& element(double v);
    const std::string& str() const;  // throws ConfigError if structures are open

  private:
    void separator();
    void write_key(const std::string& key);
    std::string out_;
    std::vector<bool> first_;  // one entry per open scope
};

void write_text_file(const std::string& path, const std::string& content);

struct SvgOptions {
    std::string x_label = "x";
    std::string y_label = "y";
    bool log_x = false;
    bool log_y = false;
    int width = 800;
    int height = 600;
};

// Single-polyline SVG 1.1 chart; byte-deterministic for identical input.
// Throws ConfigError on an empty series or non-finite values (and nonpositive
// values on a log axis); ToolError when the path is unwritable.
void write_svg(const std::string& path, const std::vector<std::pair<double, double>>& series,
               const SvgOptions& options = {});

}  // namespace cyclebranch
