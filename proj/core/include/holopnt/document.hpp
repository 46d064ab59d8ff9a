#ifndef HOLOPNT_DOCUMENT_HPP
#define HOLOPNT_DOCUMENT_HPP

#include "holopnt/linalg.hpp"

#include <string>
#include <vector>

namespace holopnt::doc {

// Minimal key/value document format used for model and loop descriptions:
//
//   # comment
//   system = { bosons = 3, two_levels = 0, cutoff = 20 }
//   model  = "lambda"
//   graph  = [ { i = 1, j = 2, amp = "r1", phase = "p1" } ]
//   waypoints = [ { theta = 0.0, phi = 0.0 } ]
//
// Scalars are numbers, quoted strings, or true/false. Tables are brace
// delimited and arrays bracket delimited; both may span lines. Errors carry
// line/column positions. Anything outside this grammar is rejected.
struct Value;

struct Table {
    std::vector<std::pair<std::string, Value>> entries;

    const Value* find(const std::string& key) const;
    const Value& at(const std::string& key) const;  // throws InputError
    bool has(const std::string& key) const { return find(key) != nullptr; }

    // Throws InputError when a key outside `allowed` is present.
    void reject_unknown_keys(const std::vector<std::string>& allowed,
                             const std::string& context) const;
};

struct Value {
    enum class Kind { number, string, boolean, table, array };
    Kind kind = Kind::number;
    double num = 0.0;
    std::string str;
    bool boolean = false;
    Table table;
    std::vector<Value> array;
    int line = 0;
    int col = 0;

    double as_number(const std::string& what) const;
    int as_int(const std::string& what) const;
    const std::string& as_string(const std::string& what) const;
    const Table& as_table(const std::string& what) const;
    const std::vector<Value>& as_array(const std::string& what) const;
};

Table parse_document(const std::string& text);

}  // namespace holopnt::doc

#endif
