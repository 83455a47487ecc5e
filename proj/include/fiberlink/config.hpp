#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fiberlink::config {

// Minimal TOML-style reader for the scenario/topology/budget/plan files:
// '#' comments, [table] and [table.sub] headers, [[array.of.tables]],
// key = number | true/false | "string" | [list]. Sub-table headers after an
// [[array]] header attach to the most recent array element.

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Value;

class Table {
public:
    const Value* find(const std::string& key) const;
    Value& set(const std::string& key);
    bool empty() const { return kv_.empty(); }
    const std::vector<std::pair<std::string, Value>>& items() const { return kv_; }

private:
    std::vector<std::pair<std::string, Value>> kv_;
};

class Value {
public:
    enum class Kind { Number, Bool, String, List, Table, TableArray };

    Kind kind() const { return kind_; }

    double as_number() const;
    std::int64_t as_int() const;
    bool as_bool() const;
    const std::string& as_string() const;
    const std::vector<Value>& as_list() const;
    const Table& as_table() const;
    const std::vector<Table>& as_table_array() const;

    static Value number(double v);
    static Value boolean(bool v);
    static Value string(std::string v);
    static Value list(std::vector<Value> v);
    static Value table();
    static Value table_array();

    Table& mutable_table();
    std::vector<Table>& mutable_table_array();

private:
    Kind kind_ = Kind::Number;
    double num_ = 0.0;
    bool bool_ = false;
    std::string str_;
    std::vector<Value> list_;
    std::vector<Table> tables_;  // Table or TableArray payload
};

Table parse_string(const std::string& text, const std::string& origin = "<string>");
Table parse_file(const std::string& path);

// Dotted-path lookups; the require_* forms throw ConfigError when the key is
// missing or has the wrong kind.
const Value* find_path(const Table& t, const std::string& dotted);
double get_number(const Table& t, const std::string& dotted, double fallback);
std::int64_t get_int(const Table& t, const std::string& dotted, std::int64_t fallback);
bool get_bool(const Table& t, const std::string& dotted, bool fallback);
std::string get_string(const Table& t, const std::string& dotted, const std::string& fallback);
double require_number(const Table& t, const std::string& dotted);
std::string require_string(const Table& t, const std::string& dotted);
const Table* get_table(const Table& t, const std::string& dotted);
const std::vector<Table>* get_table_array(const Table& t, const std::string& dotted);

}  // namespace fiberlink::config
