#include "holopnt/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

namespace holopnt::fock {

Complex Coefficient::evaluate(const ParameterPoint& params) const {
    Complex value = literal;
    for (const auto& f : factors) {
        const double x = params.get(f.param);
        switch (f.func) {
            case CoeffFactor::Func::value: value *= x; break;
            case CoeffFactor::Func::cosine: value *= std::cos(x); break;
            case CoeffFactor::Func::sine: value *= std::sin(x); break;
            case CoeffFactor::Func::phase: value *= std::exp(Complex(0.0, f.sign * x)); break;
        }
    }
    return value;
}

Coefficient Coefficient::conjugated() const {
    Coefficient out = *this;
    out.literal = std::conj(out.literal);
    for (auto& f : out.factors) {
        if (f.func == CoeffFactor::Func::phase) f.sign = -f.sign;
    }
    return out;
}

std::vector<std::string> Coefficient::parameter_names() const {
    std::vector<std::string> names;
    for (const auto& f : factors) names.push_back(f.param);
    return names;
}

OperatorTerm OperatorTerm::adjoint() const {
    OperatorTerm out;
    out.coeff = coeff.conjugated();
    out.factors.reserve(factors.size());
    for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
        LadderOp op = *it;
        switch (op.kind) {
            case LadderKind::create: op.kind = LadderKind::annihilate; break;
            case LadderKind::annihilate: op.kind = LadderKind::create; break;
            case LadderKind::raise_op: op.kind = LadderKind::lower_op; break;
            case LadderKind::lower_op: op.kind = LadderKind::raise_op; break;
            case LadderKind::number_op: break;
        }
        out.factors.push_back(op);
    }
    return out;
}

OperatorExpression OperatorExpression::adjoint() const {
    std::vector<OperatorTerm> terms;
    terms.reserve(terms_.size());
    for (const auto& t : terms_) terms.push_back(t.adjoint());
    return OperatorExpression(std::move(terms));
}

OperatorExpression OperatorExpression::plus_hermitian_conjugate() const {
    std::vector<OperatorTerm> terms = terms_;
    for (const auto& t : terms_) terms.push_back(t.adjoint());
    return OperatorExpression(std::move(terms));
}

std::vector<std::string> OperatorExpression::parameter_names() const {
    std::set<std::string> seen;
    std::vector<std::string> names;
    for (const auto& t : terms_) {
        for (auto& n : t.coeff.parameter_names()) {
            if (seen.insert(n).second) names.push_back(n);
        }
    }
    return names;
}

void OperatorExpression::validate_modes(const ModeSystem& system) const {
    for (const auto& t : terms_) {
        for (const auto& op : t.factors) {
            switch (op.kind) {
                case LadderKind::create:
                case LadderKind::annihilate:
                case LadderKind::number_op:
                    if (op.mode < 0 || op.mode >= system.boson_modes) {
                        throw InputError("boson mode index " + std::to_string(op.mode + 1) +
                                         " out of range (system has " +
                                         std::to_string(system.boson_modes) + " boson modes)");
                    }
                    break;
                case LadderKind::raise_op:
                case LadderKind::lower_op:
                    if (op.mode < 0 || op.mode >= system.two_level_modes) {
                        throw InputError("two-level mode index " + std::to_string(op.mode + 1) +
                                         " out of range (system has " +
                                         std::to_string(system.two_level_modes) +
                                         " two-level modes)");
                    }
                    break;
            }
        }
    }
}

namespace {

// Applies one ladder factor in place; returns false when the amplitude is
// annihilated. `cap` is the per-boson cutoff for hard truncation, or -1.
bool apply_factor(const LadderOp& op, const ModeSystem& sys, OccupationState& s, double& amp,
                  int cap) {
    switch (op.kind) {
        case LadderKind::create: {
            int& n = s.occupations[op.mode];
            if (cap >= 0 && n + 1 > cap) return false;
            amp *= std::sqrt(static_cast<double>(n + 1));
            ++n;
            return true;
        }
        case LadderKind::annihilate: {
            int& n = s.occupations[op.mode];
            if (n == 0) return false;
            amp *= std::sqrt(static_cast<double>(n));
            --n;
            return true;
        }
        case LadderKind::number_op: {
            const int n = s.occupations[op.mode];
            if (n == 0) return false;
            amp *= n;
            return true;
        }
        case LadderKind::raise_op: {
            int& b = s.occupations[sys.boson_modes + op.mode];
            if (b == 1) return false;
            b = 1;
            return true;
        }
        case LadderKind::lower_op: {
            int& b = s.occupations[sys.boson_modes + op.mode];
            if (b == 0) return false;
            b = 0;
            return true;
        }
    }
    return false;
}

}  // namespace

CMatrix operator_matrix(const OperatorExpression& expr, const FockBasis& basis,
                        const ParameterPoint& params, bool expect_hermitian) {
    const ModeSystem& sys = basis.system();
    expr.validate_modes(sys);

    // Layer bases are exact (intermediate excursions allowed); all other
    // bases hard-truncate each creation at the cutoff.
    const bool layer = basis.is_single_layer();
    const int cap = (!layer && sys.cutoff_per_boson_mode) ? *sys.cutoff_per_boson_mode : -1;

    const std::size_t dim = basis.size();
    CMatrix m = CMatrix::Zero(dim, dim);
    for (const auto& term : expr.terms()) {
        const Complex c = term.coeff.evaluate(params);
        if (c == Complex(0.0, 0.0)) continue;
        for (std::size_t j = 0; j < dim; ++j) {
            OccupationState s = basis.state(j);
            double amp = 1.0;
            bool alive = true;
            for (auto it = term.factors.rbegin(); it != term.factors.rend(); ++it) {
                if (!apply_factor(*it, sys, s, amp, cap)) {
                    alive = false;
                    break;
                }
            }
            if (!alive) continue;
            const std::ptrdiff_t i = basis.index_of(s);
            if (i >= 0) m(i, j) += c * amp;
        }
    }

    if (expect_hermitian) {
        const double defect = hermiticity_defect(m);
        if (defect > 1e-12 * std::max(1.0, max_abs(m))) {
            throw NumericalError("expression flagged hermitian produced defect " +
                                 std::to_string(defect));
        }
    }
    return m;
}

bool is_number_conserving(const OperatorExpression& expr) {
    for (const auto& t : expr.terms()) {
        int balance = 0;
        for (const auto& op : t.factors) {
            switch (op.kind) {
                case LadderKind::create:
                case LadderKind::raise_op: ++balance; break;
                case LadderKind::annihilate:
                case LadderKind::lower_op: --balance; break;
                case LadderKind::number_op: break;
            }
        }
        if (balance != 0) return false;
    }
    return true;
}

namespace {

struct Lexer {
    const std::string& text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    [[noreturn]] void fail(const std::string& what) {
        throw InputError("operator expression: " + what + " at offset " + std::to_string(pos));
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }
    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_' ||
                text[pos] == '\'')) {
            ++pos;
        }
        if (start == pos) fail("expected identifier");
        return text.substr(start, pos - start);
    }
    double number() {
        skip_ws();
        std::size_t start = pos;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
        bool digits = false;
        while (pos < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.')) {
            digits = true;
            ++pos;
        }
        if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
            ++pos;
            if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        }
        if (!digits) fail("expected number");
        return std::stod(text.substr(start, pos - start));
    }
};

int mode_index(Lexer& lex) {
    lex.expect('(');
    const double v = lex.number();
    lex.expect(')');
    const int idx = static_cast<int>(v);
    if (idx < 1 || idx != v) lex.fail("mode index must be a positive integer");
    return idx - 1;
}

OperatorTerm parse_term(Lexer& lex, bool negated) {
    OperatorTerm term;
    if (negated) term.coeff.literal = -term.coeff.literal;
    bool saw_item = false;
    for (;;) {
        lex.skip_ws();
        if (lex.eof()) break;
        const char c = lex.peek();
        if (c == '+' || c == '-') break;
        if (c == '*') {
            lex.expect('*');
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            term.coeff.literal *= lex.number();
            saw_item = true;
            continue;
        }
        if (c == '(') {  // complex literal (re, im)
            lex.expect('(');
            const double re = lex.number();
            lex.expect(',');
            const double im = lex.number();
            lex.expect(')');
            term.coeff.literal *= Complex(re, im);
            saw_item = true;
            continue;
        }
        const std::string id = lex.ident();
        saw_item = true;
        if (id == "a'") {
            term.factors.push_back({LadderKind::create, mode_index(lex)});
        } else if (id == "a") {
            term.factors.push_back({LadderKind::annihilate, mode_index(lex)});
        } else if (id == "n") {
            term.factors.push_back({LadderKind::number_op, mode_index(lex)});
        } else if (id == "sp") {
            term.factors.push_back({LadderKind::raise_op, mode_index(lex)});
        } else if (id == "sm") {
            term.factors.push_back({LadderKind::lower_op, mode_index(lex)});
        } else {
            if (lex.peek() == '(') lex.fail("unknown operator symbol '" + id + "'");
            term.coeff.factors.push_back({CoeffFactor::Func::value, id, 1});
        }
    }
    if (!saw_item) lex.fail("empty term");
    return term;
}

}  // namespace

OperatorExpression parse_expression(const std::string& text) {
    Lexer lex{text};
    OperatorExpression expr;
    bool negated = lex.accept('-');
    for (;;) {
        expr.add(parse_term(lex, negated));
        if (lex.eof()) break;
        if (lex.accept('+')) {
            negated = false;
        } else if (lex.accept('-')) {
            negated = true;
        } else {
            lex.fail("expected '+' or '-' between terms");
        }
        if (lex.eof()) lex.fail("dangling term separator");
    }
    return expr;
}

std::string to_string(const OperatorExpression& expr) {
    std::ostringstream out;
    bool first_term = true;
    for (const auto& t : expr.terms()) {
        if (!first_term) out << " + ";
        first_term = false;
        out << '(' << t.coeff.literal.real() << ',' << t.coeff.literal.imag() << ')';
        for (const auto& f : t.coeff.factors) {
            switch (f.func) {
                case CoeffFactor::Func::value: out << " * " << f.param; break;
                case CoeffFactor::Func::cosine: out << " * cos[" << f.param << ']'; break;
                case CoeffFactor::Func::sine: out << " * sin[" << f.param << ']'; break;
                case CoeffFactor::Func::phase:
                    out << " * exp[" << (f.sign > 0 ? "+i " : "-i ") << f.param << ']';
                    break;
            }
        }
        for (const auto& op : t.factors) {
            switch (op.kind) {
                case LadderKind::create: out << " a'(" << op.mode + 1 << ')'; break;
                case LadderKind::annihilate: out << " a(" << op.mode + 1 << ')'; break;
                case LadderKind::number_op: out << " n(" << op.mode + 1 << ')'; break;
                case LadderKind::raise_op: out << " sp(" << op.mode + 1 << ')'; break;
                case LadderKind::lower_op: out << " sm(" << op.mode + 1 << ')'; break;
            }
        }
    }
    return out.str();
}

}  // namespace holopnt::fock
