#include "holopnt/document.hpp"

#include <cctype>
#include <cmath>
#include <tuple>

namespace holopnt::doc {

const Value* Table::find(const std::string& key) const {
    for (const auto& [k, v] : entries) {
        if (k == key) return &v;
    }
    return nullptr;
}

const Value& Table::at(const std::string& key) const {
    const Value* v = find(key);
    if (!v) throw InputError("missing required key '" + key + "'");
    return *v;
}

void Table::reject_unknown_keys(const std::vector<std::string>& allowed,
                                const std::string& context) const {
    for (const auto& [k, v] : entries) {
        bool ok = false;
        for (const auto& a : allowed) {
            if (k == a) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw InputError("line " + std::to_string(v.line) + ", col " + std::to_string(v.col) +
                             ": unknown key '" + k + "' in " + context);
        }
    }
}

namespace {

[[noreturn]] void fail_at(int line, int col, const std::string& what) {
    throw InputError("line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + what);
}

}  // namespace

double Value::as_number(const std::string& what) const {
    if (kind != Kind::number) fail_at(line, col, what + " must be a number");
    return num;
}

int Value::as_int(const std::string& what) const {
    const double v = as_number(what);
    const int i = static_cast<int>(std::llround(v));
    if (std::abs(v - i) > 1e-12) fail_at(line, col, what + " must be an integer");
    return i;
}

const std::string& Value::as_string(const std::string& what) const {
    if (kind != Kind::string) fail_at(line, col, what + " must be a quoted string");
    return str;
}

const Table& Value::as_table(const std::string& what) const {
    if (kind != Kind::table) fail_at(line, col, what + " must be a { ... } table");
    return table;
}

const std::vector<Value>& Value::as_array(const std::string& what) const {
    if (kind != Kind::array) fail_at(line, col, what + " must be a [ ... ] array");
    return array;
}

namespace {

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    Table parse_top() {
        Table top;
        for (;;) {
            skip_ws_and_comments();
            if (eof()) break;
            auto [key, kl, kc] = key_token();
            skip_ws_and_comments();
            if (!accept('=')) fail("expected '=' after key '" + key + "'");
            Value v = parse_value();
            if (top.find(key)) fail_at(kl, kc, "duplicate key '" + key + "'");
            top.entries.emplace_back(std::move(key), std::move(v));
        }
        return top;
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return eof() ? '\0' : text_[pos_]; }

    char advance() {
        const char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_ws_and_comments() {
        while (!eof()) {
            const char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '#') {
                while (!eof() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    bool accept(char c) {
        skip_ws_and_comments();
        if (peek() == c) {
            advance();
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const { fail_at(line_, col_, what); }

    std::tuple<std::string, int, int> key_token() {
        skip_ws_and_comments();
        const int l = line_, c = col_;
        std::string key;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
            key.push_back(advance());
        }
        if (key.empty()) fail("expected a key");
        return {key, l, c};
    }

    Value parse_value() {
        skip_ws_and_comments();
        if (eof()) fail("expected a value");
        Value v;
        v.line = line_;
        v.col = col_;
        const char c = peek();
        if (c == '"') {
            advance();
            v.kind = Value::Kind::string;
            while (!eof() && peek() != '"') {
                if (peek() == '\n') fail("unterminated string");
                v.str.push_back(advance());
            }
            if (eof()) fail("unterminated string");
            advance();
        } else if (c == '{') {
            advance();
            v.kind = Value::Kind::table;
            if (!accept('}')) {
                for (;;) {
                    auto [key, kl, kc] = key_token();
                    if (!accept('=')) fail("expected '=' in table entry '" + key + "'");
                    Value inner = parse_value();
                    if (v.table.find(key)) fail_at(kl, kc, "duplicate key '" + key + "' in table");
                    v.table.entries.emplace_back(std::move(key), std::move(inner));
                    if (accept('}')) break;
                    if (!accept(',')) fail("expected ',' or '}' in table");
                }
            }
        } else if (c == '[') {
            advance();
            v.kind = Value::Kind::array;
            if (!accept(']')) {
                for (;;) {
                    v.array.push_back(parse_value());
                    if (accept(']')) break;
                    if (!accept(',')) fail("expected ',' or ']' in array");
                }
            }
        } else if (c == 't' || c == 'f') {
            std::string word;
            while (!eof() && std::isalpha(static_cast<unsigned char>(peek()))) {
                word.push_back(advance());
            }
            if (word == "true") {
                v.kind = Value::Kind::boolean;
                v.boolean = true;
            } else if (word == "false") {
                v.kind = Value::Kind::boolean;
                v.boolean = false;
            } else {
                fail("unrecognized bare word '" + word + "'");
            }
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
            std::string num;
            while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '-' ||
                              peek() == '+' || peek() == '.' || peek() == 'e' || peek() == 'E')) {
                num.push_back(advance());
            }
            try {
                std::size_t used = 0;
                v.kind = Value::Kind::number;
                v.num = std::stod(num, &used);
                if (used != num.size()) throw std::invalid_argument(num);
            } catch (const std::exception&) {
                fail_at(v.line, v.col, "malformed number '" + num + "'");
            }
        } else {
            fail(std::string("unexpected character '") + c + "'");
        }
        return v;
    }
};

}  // namespace

Table parse_document(const std::string& text) { return Parser(text).parse_top(); }

}  // namespace holopnt::doc
