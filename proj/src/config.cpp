#include "logonet/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "logonet/errors.hpp"

namespace logonet {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return {};
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void bad_line(int lineno, const std::string& why) {
    throw parse_error("config line " + std::to_string(lineno) + ": " + why);
}

json parse_scalar(const std::string& raw, int lineno) {
    if (raw.empty()) bad_line(lineno, "empty value");
    if (raw.front() == '"') {
        if (raw.size() < 2 || raw.back() != '"') bad_line(lineno, "unterminated string");
        std::string out;
        for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
            if (raw[i] == '\\') {
                if (i + 2 >= raw.size()) bad_line(lineno, "dangling escape");
                char c = raw[++i];
                if (c != '"' && c != '\\') bad_line(lineno, "unsupported escape");
                out += c;
            } else if (raw[i] == '"') {
                bad_line(lineno, "unexpected quote inside string");
            } else {
                out += raw[i];
            }
        }
        return out;
    }
    if (raw == "true") return true;
    if (raw == "false") return false;
    try {
        std::size_t used = 0;
        if (raw.find_first_of(".eE") == std::string::npos) {
            long long v = std::stoll(raw, &used);
            if (used == raw.size()) return v;
        }
        double v = std::stod(raw, &used);
        if (used == raw.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    bad_line(lineno, "cannot parse value '" + raw + "'");
}

json parse_value(const std::string& raw, int lineno) {
    if (!raw.empty() && raw.front() == '[') {
        if (raw.back() != ']') bad_line(lineno, "unterminated array");
        json arr = json::array();
        std::string body = raw.substr(1, raw.size() - 2);
        std::string item;
        bool in_string = false;
        auto flush = [&] {
            std::string t = trim(item);
            if (!t.empty()) arr.push_back(parse_scalar(t, lineno));
            item.clear();
        };
        for (char c : body) {
            if (c == '"') in_string = !in_string;
            if (c == ',' && !in_string) {
                flush();
                continue;
            }
            item += c;
        }
        if (in_string) bad_line(lineno, "unterminated string");
        flush();
        return arr;
    }
    return parse_scalar(raw, lineno);
}

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

// ---- typed accessors with config-level diagnostics ----

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
    throw config_error("config key '" + key + "': " + why);
}

long long as_integer(const json& v, const std::string& key) {
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float()) {
        double d = v.get<double>();
        if (d == std::floor(d)) return static_cast<long long>(d);
    }
    bad_key(key, "expected an integer");
}

double as_number(const json& v, const std::string& key) {
    if (v.is_number()) return v.get<double>();
    bad_key(key, "expected a number");
}

bool as_boolean(const json& v, const std::string& key) {
    if (v.is_boolean()) return v.get<bool>();
    bad_key(key, "expected true or false");
}

std::string as_string(const json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    bad_key(key, "expected a string");
}

}  // namespace

json parse_toml_subset(const std::string& text) {
    json doc = json::object();
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        std::size_t eq = body.find('=');
        if (eq == std::string::npos) bad_line(lineno, "expected key = value");
        std::string key = trim(body.substr(0, eq));
        if (key.empty() ||
            key.find_first_not_of(
                "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_") !=
                std::string::npos)
            bad_line(lineno, "invalid key '" + key + "'");
        if (doc.contains(key)) bad_line(lineno, "duplicate key '" + key + "'");
        doc[key] = parse_value(trim(body.substr(eq + 1)), lineno);
    }
    return doc;
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();

    bool is_json;
    if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
        is_json = true;
    } else if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".toml") == 0) {
        is_json = false;
    } else {
        std::size_t first = text.find_first_not_of(" \t\r\n");
        is_json = first != std::string::npos && text[first] == '{';
    }

    if (!is_json) return parse_toml_subset(text);
    try {
        json doc = json::parse(text);
        if (!doc.is_object()) throw parse_error(path + ": top-level config must be an object");
        return doc;
    } catch (const json::exception& ex) {
        throw parse_error(path + ": " + ex.what());
    }
}

SweepFileConfig sweep_config_from_json(const json& doc) {
    static const char* known[] = {
        "clique_sizes", "models",       "nu",          "tail_fraction", "n_resamples",
        "p_select",     "q_train",      "q_test",      "series_with_replacement",
        "seed",         "em_max_iterations", "em_tolerance", "ridge",
        "kendall_sine", "timing",       "jobs",        "output_path",   "data"};
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw config_error("unknown config key '" + key + "'");
    }

    SweepFileConfig out;
    SweepConfig& cfg = out.sweep;
    ResamplePlan& plan = cfg.plan;

    if (doc.contains("clique_sizes")) {
        if (!doc["clique_sizes"].is_array()) bad_key("clique_sizes", "expected an array");
        cfg.clique_sizes.clear();
        for (const auto& v : doc["clique_sizes"])
            cfg.clique_sizes.push_back(static_cast<int>(as_integer(v, "clique_sizes")));
    }
    if (doc.contains("models")) {
        if (!doc["models"].is_array()) bad_key("models", "expected an array");
        cfg.models.clear();
        for (const auto& v : doc["models"])
            cfg.models.push_back(model_from_string(as_string(v, "models")));
    }
    if (doc.contains("nu")) {
        const json& v = doc["nu"];
        if (v.is_string()) {
            if (v.get<std::string>() != "tail")
                bad_key("nu", "expected a number or the string \"tail\"");
            cfg.nu_source = NuSource::tail_estimate;
        } else {
            cfg.nu_source = NuSource::fixed;
            cfg.nu = as_number(v, "nu");
        }
    }
    if (doc.contains("tail_fraction")) cfg.tail_fraction = as_number(doc["tail_fraction"], "tail_fraction");
    if (doc.contains("n_resamples"))
        plan.n_resamples = static_cast<int>(as_integer(doc["n_resamples"], "n_resamples"));
    if (doc.contains("p_select"))
        plan.p_select = static_cast<int>(as_integer(doc["p_select"], "p_select"));
    if (doc.contains("q_train"))
        plan.q_train = static_cast<int>(as_integer(doc["q_train"], "q_train"));
    if (doc.contains("q_test")) plan.q_test = static_cast<int>(as_integer(doc["q_test"], "q_test"));
    if (doc.contains("series_with_replacement"))
        plan.series_with_replacement = as_boolean(doc["series_with_replacement"], "series_with_replacement");
    if (doc.contains("seed"))
        plan.seed = static_cast<std::uint64_t>(as_integer(doc["seed"], "seed"));
    if (doc.contains("em_max_iterations"))
        cfg.em_max_iterations = static_cast<int>(as_integer(doc["em_max_iterations"], "em_max_iterations"));
    if (doc.contains("em_tolerance")) cfg.em_tolerance = as_number(doc["em_tolerance"], "em_tolerance");
    if (doc.contains("ridge")) cfg.ridge = as_number(doc["ridge"], "ridge");
    if (doc.contains("kendall_sine")) cfg.kendall_sine = as_boolean(doc["kendall_sine"], "kendall_sine");
    if (doc.contains("timing")) cfg.timing = as_boolean(doc["timing"], "timing");
    if (doc.contains("jobs")) cfg.jobs = static_cast<int>(as_integer(doc["jobs"], "jobs"));
    if (doc.contains("output_path")) cfg.output_path = as_string(doc["output_path"], "output_path");
    if (doc.contains("data")) out.data = as_string(doc["data"], "data");
    return out;
}

}  // namespace logonet
