#include "fiberlink/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fiberlink::config {

const Value* Table::find(const std::string& key) const {
    for (const auto& [k, v] : kv_)
        if (k == key) return &v;
    return nullptr;
}

Value& Table::set(const std::string& key) {
    for (auto& [k, v] : kv_)
        if (k == key) return v;
    kv_.emplace_back(key, Value{});
    return kv_.back().second;
}

namespace {
[[noreturn]] void kind_error(const char* want) {
    throw ConfigError(std::string("config value is not a ") + want);
}
}  // namespace

double Value::as_number() const {
    if (kind_ != Kind::Number) kind_error("number");
    return num_;
}
std::int64_t Value::as_int() const {
    const double v = as_number();
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9 || std::abs(v) > 9.0e15) kind_error("integer");
    return static_cast<std::int64_t>(r);
}
bool Value::as_bool() const {
    if (kind_ != Kind::Bool) kind_error("boolean");
    return bool_;
}
const std::string& Value::as_string() const {
    if (kind_ != Kind::String) kind_error("string");
    return str_;
}
const std::vector<Value>& Value::as_list() const {
    if (kind_ != Kind::List) kind_error("list");
    return list_;
}
const Table& Value::as_table() const {
    if (kind_ != Kind::Table) kind_error("table");
    return tables_.front();
}
const std::vector<Table>& Value::as_table_array() const {
    if (kind_ != Kind::TableArray) kind_error("array of tables");
    return tables_;
}

Value Value::number(double v) { Value x; x.kind_ = Kind::Number; x.num_ = v; return x; }
Value Value::boolean(bool v) { Value x; x.kind_ = Kind::Bool; x.bool_ = v; return x; }
Value Value::string(std::string v) { Value x; x.kind_ = Kind::String; x.str_ = std::move(v); return x; }
Value Value::list(std::vector<Value> v) { Value x; x.kind_ = Kind::List; x.list_ = std::move(v); return x; }
Value Value::table() { Value x; x.kind_ = Kind::Table; x.tables_.emplace_back(); return x; }
Value Value::table_array() { Value x; x.kind_ = Kind::TableArray; return x; }

Table& Value::mutable_table() {
    if (kind_ != Kind::Table) kind_error("table");
    return tables_.front();
}
std::vector<Table>& Value::mutable_table_array() {
    if (kind_ != Kind::TableArray) kind_error("array of tables");
    return tables_;
}

namespace {

struct Parser {
    const std::string& origin;
    int lineno = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        std::ostringstream ss;
        ss << origin << ":" << lineno << ": " << msg;
        throw ConfigError(ss.str());
    }

    static std::string strip(const std::string& s) {
        std::size_t a = 0, b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return s.substr(a, b - a);
    }

    // Removes a trailing comment, respecting quoted strings.
    static std::string strip_comment(const std::string& s) {
        bool in_str = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"') in_str = !in_str;
            else if (s[i] == '#' && !in_str) return s.substr(0, i);
        }
        return s;
    }

    std::vector<std::string> split_path(const std::string& dotted) const {
        std::vector<std::string> parts;
        std::string cur;
        for (char c : dotted) {
            if (c == '.') {
                if (cur.empty()) fail("empty path segment in '" + dotted + "'");
                parts.push_back(cur);
                cur.clear();
            } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
                cur += c;
            } else if (!std::isspace(static_cast<unsigned char>(c))) {
                fail(std::string("unexpected character '") + c + "' in table path");
            }
        }
        if (cur.empty()) fail("empty path segment in '" + dotted + "'");
        parts.push_back(cur);
        return parts;
    }

    Value parse_scalar(const std::string& text) const {
        const std::string s = strip(text);
        if (s.empty()) fail("missing value");
        if (s.front() == '"') {
            if (s.size() < 2 || s.back() != '"') fail("unterminated string");
            return Value::string(s.substr(1, s.size() - 2));
        }
        if (s == "true") return Value::boolean(true);
        if (s == "false") return Value::boolean(false);
        if (s.front() == '[') {
            if (s.back() != ']') fail("unterminated list");
            std::vector<Value> items;
            std::string body = s.substr(1, s.size() - 2);
            std::string cur;
            bool in_str = false;
            for (char c : body) {
                if (c == '"') in_str = !in_str;
                if (c == ',' && !in_str) {
                    if (!strip(cur).empty()) items.push_back(parse_scalar(cur));
                    cur.clear();
                } else {
                    cur += c;
                }
            }
            if (!strip(cur).empty()) items.push_back(parse_scalar(cur));
            return Value::list(std::move(items));
        }
        char* endp = nullptr;
        const double v = std::strtod(s.c_str(), &endp);
        if (endp == s.c_str() || *endp != '\0') fail("cannot parse value '" + s + "'");
        return Value::number(v);
    }
};

Table* descend(Table* t, const std::vector<std::string>& path, std::size_t upto,
               const Parser& p) {
    for (std::size_t i = 0; i < upto; ++i) {
        Value& v = t->set(path[i]);
        switch (v.kind()) {
            case Value::Kind::Table:
                t = &v.mutable_table();
                break;
            case Value::Kind::TableArray: {
                auto& arr = v.mutable_table_array();
                if (arr.empty()) p.fail("table array '" + path[i] + "' has no elements yet");
                t = &arr.back();
                break;
            }
            case Value::Kind::Number:
                // Freshly created by set(); turn into a table.
                v = Value::table();
                t = &v.mutable_table();
                break;
            default:
                p.fail("'" + path[i] + "' is not a table");
        }
    }
    return t;
}

}  // namespace

Table parse_string(const std::string& text, const std::string& origin) {
    Table root;
    Parser p{origin};
    Table* current = &root;

    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        ++p.lineno;
        line = Parser::strip(Parser::strip_comment(line));
        if (line.empty()) continue;

        if (line.size() >= 4 && line.substr(0, 2) == "[[") {
            if (line.substr(line.size() - 2) != "]]") p.fail("malformed [[table]] header");
            auto path = p.split_path(line.substr(2, line.size() - 4));
            Table* parent = descend(&root, path, path.size() - 1, p);
            Value& v = parent->set(path.back());
            if (v.kind() == Value::Kind::Number) v = Value::table_array();
            if (v.kind() != Value::Kind::TableArray) p.fail("'" + path.back() + "' is not an array of tables");
            v.mutable_table_array().emplace_back();
            current = &v.mutable_table_array().back();
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') p.fail("malformed [table] header");
            auto path = p.split_path(line.substr(1, line.size() - 2));
            Table* parent = descend(&root, path, path.size() - 1, p);
            Value& v = parent->set(path.back());
            if (v.kind() == Value::Kind::Number) v = Value::table();
            if (v.kind() == Value::Kind::TableArray) {
                auto& arr = v.mutable_table_array();
                if (arr.empty()) p.fail("table array '" + path.back() + "' has no elements yet");
                current = &arr.back();
            } else if (v.kind() == Value::Kind::Table) {
                current = &v.mutable_table();
            } else {
                p.fail("'" + path.back() + "' is not a table");
            }
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) p.fail("expected 'key = value'");
        const std::string key = Parser::strip(line.substr(0, eq));
        if (key.empty()) p.fail("empty key");
        auto path = p.split_path(key);
        Table* parent = descend(current, path, path.size() - 1, p);
        parent->set(path.back()) = p.parse_scalar(line.substr(eq + 1));
    }
    return root;
}

Table parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

const Value* find_path(const Table& t, const std::string& dotted) {
    const Table* cur = &t;
    std::string part;
    std::istringstream ss(dotted);
    const Value* v = nullptr;
    while (std::getline(ss, part, '.')) {
        if (!cur) return nullptr;
        v = cur->find(part);
        if (!v) return nullptr;
        cur = v->kind() == Value::Kind::Table ? &v->as_table() : nullptr;
    }
    return v;
}

double get_number(const Table& t, const std::string& dotted, double fallback) {
    const Value* v = find_path(t, dotted);
    return v ? v->as_number() : fallback;
}
std::int64_t get_int(const Table& t, const std::string& dotted, std::int64_t fallback) {
    const Value* v = find_path(t, dotted);
    return v ? v->as_int() : fallback;
}
bool get_bool(const Table& t, const std::string& dotted, bool fallback) {
    const Value* v = find_path(t, dotted);
    return v ? v->as_bool() : fallback;
}
std::string get_string(const Table& t, const std::string& dotted, const std::string& fallback) {
    const Value* v = find_path(t, dotted);
    return v ? v->as_string() : fallback;
}
double require_number(const Table& t, const std::string& dotted) {
    const Value* v = find_path(t, dotted);
    if (!v) throw ConfigError("missing required key '" + dotted + "'");
    return v->as_number();
}
std::string require_string(const Table& t, const std::string& dotted) {
    const Value* v = find_path(t, dotted);
    if (!v) throw ConfigError("missing required key '" + dotted + "'");
    return v->as_string();
}
const Table* get_table(const Table& t, const std::string& dotted) {
    const Value* v = find_path(t, dotted);
    return v && v->kind() == Value::Kind::Table ? &v->as_table() : nullptr;
}
const std::vector<Table>* get_table_array(const Table& t, const std::string& dotted) {
    const Value* v = find_path(t, dotted);
    return v && v->kind() == Value::Kind::TableArray ? &v->as_table_array() : nullptr;
}

}  // namespace fiberlink::config
