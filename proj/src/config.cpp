#include "gapbench/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gapbench {

namespace {

using nlohmann::json;

std::string strip(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Removes a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& s) {
    bool in_str = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_str = !in_str;
        if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

json parse_scalar(const std::string& tok, int line_no) {
    if (tok.empty()) throw std::invalid_argument("line " + std::to_string(line_no) + ": empty value");
    if (tok.front() == '"') {
        if (tok.size() < 2 || tok.back() != '"')
            throw std::invalid_argument("line " + std::to_string(line_no) + ": unterminated string");
        return tok.substr(1, tok.size() - 2);
    }
    if (tok == "true") return true;
    if (tok == "false") return false;
    try {
        std::size_t used = 0;
        if (tok.find_first_of(".eE") == std::string::npos && tok != "inf" && tok != "-inf") {
            const long long v = std::stoll(tok, &used);
            if (used == tok.size()) return v;
        }
        if (tok == "inf") return std::numeric_limits<double>::infinity();
        if (tok == "-inf") return -std::numeric_limits<double>::infinity();
        const double v = std::stod(tok, &used);
        if (used == tok.size()) return v;
    } catch (...) {
    }
    throw std::invalid_argument("line " + std::to_string(line_no) + ": cannot parse value '" + tok +
                                "'");
}

json parse_value(const std::string& raw, int line_no) {
    const std::string tok = strip(raw);
    if (!tok.empty() && tok.front() == '[') {
        if (tok.back() != ']')
            throw std::invalid_argument("line " + std::to_string(line_no) + ": unterminated array");
        json arr = json::array();
        std::string body = tok.substr(1, tok.size() - 2);
        std::string cur;
        bool in_str = false;
        int depth = 0;
        for (char c : body) {
            if (c == '"') in_str = !in_str;
            if (!in_str && c == '[') ++depth;
            if (!in_str && c == ']') --depth;
            if (c == ',' && !in_str && depth == 0) {
                if (!strip(cur).empty()) arr.push_back(parse_value(cur, line_no));
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (!strip(cur).empty()) arr.push_back(parse_value(cur, line_no));
        return arr;
    }
    return parse_scalar(tok, line_no);
}

}  // namespace

nlohmann::json parse_toml_lite(const std::string& text) {
    json root = json::object();
    json* table = &root;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("line " + std::to_string(line_no) +
                                            ": malformed table header");
            const std::string path = strip(line.substr(1, line.size() - 2));
            table = &root;
            std::size_t start = 0;
            while (start <= path.size()) {
                const std::size_t dot = path.find('.', start);
                const std::string part =
                    strip(path.substr(start, dot == std::string::npos ? dot : dot - start));
                if (part.empty())
                    throw std::invalid_argument("line " + std::to_string(line_no) +
                                                ": empty table name");
                table = &(*table)[part];
                if (table->is_null()) *table = json::object();
                if (dot == std::string::npos) break;
                start = dot + 1;
            }
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = strip(line.substr(0, eq));
        if (key.empty())
            throw std::invalid_argument("line " + std::to_string(line_no) + ": empty key");
        (*table)[key] = parse_value(line.substr(eq + 1), line_no);
    }
    return root;
}

nlohmann::json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
        return nlohmann::json::parse(buf.str());
    return parse_toml_lite(buf.str());
}

std::string canonical_json(const nlohmann::json& j) {
    // nlohmann objects iterate in sorted key order and numbers print in
    // shortest round-trip form, so dump() is already canonical.
    return j.dump();
}

std::string config_hash(const nlohmann::json& j) {
    const std::string s = canonical_json(j);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace gapbench
