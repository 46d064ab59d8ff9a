#ifndef HOLOPNT_EXPRESSION_HPP
#define HOLOPNT_EXPRESSION_HPP

#include "holopnt/fock.hpp"
#include "holopnt/parameters.hpp"

#include <string>
#include <vector>

namespace holopnt::fock {

// One ladder symbol. Mode indices are 0-based internally; `raise_op` /
// `lower_op` address two-level modes (index counts from the first two-level
// mode). `number_op` is sugar for create(k) annihilate(k).
enum class LadderKind { create, annihilate, number_op, raise_op, lower_op };

struct LadderOp {
    LadderKind kind;
    int mode = 0;
};

// Scalar coefficient: literal * prod(factors). A factor references one real
// parameter through a fixed function, which is enough for every model here
// (plain values, polar amplitudes, and trigonometric chart couplings).
struct CoeffFactor {
    enum class Func { value, cosine, sine, phase };  // phase: exp(i * sign * x)
    Func func = Func::value;
    std::string param;
    int sign = 1;  // only meaningful for phase factors
};

struct Coefficient {
    Complex literal{1.0, 0.0};
    std::vector<CoeffFactor> factors;

    Complex evaluate(const ParameterPoint& params) const;
    Coefficient conjugated() const;
    std::vector<std::string> parameter_names() const;
};

struct OperatorTerm {
    Coefficient coeff;
    // Factors in written (left-to-right) operator order; the rightmost
    // factor acts on a ket first.
    std::vector<LadderOp> factors;

    OperatorTerm adjoint() const;
};

// Sum of coefficient * ladder-monomial terms.
class OperatorExpression {
public:
    OperatorExpression() = default;
    explicit OperatorExpression(std::vector<OperatorTerm> terms) : terms_(std::move(terms)) {}

    const std::vector<OperatorTerm>& terms() const { return terms_; }
    void add(OperatorTerm term) { terms_.push_back(std::move(term)); }

    OperatorExpression adjoint() const;
    // Appends the adjoint of every current term (H + H.c. construction).
    OperatorExpression plus_hermitian_conjugate() const;

    std::vector<std::string> parameter_names() const;
    void validate_modes(const ModeSystem& system) const;

private:
    std::vector<OperatorTerm> terms_;
};

// Dense matrix of the expression on the basis. Ladder factors act on raw
// occupation vectors; only the final state is looked up, so intermediate
// excursions outside a layer are handled exactly. On cutoff bases a creation
// beyond the cutoff annihilates the state (hard truncation).
CMatrix operator_matrix(const OperatorExpression& expr, const FockBasis& basis,
                        const ParameterPoint& params, bool expect_hermitian = false);

// True iff every term balances creation against annihilation counts, with
// two-level raise/lower counting as one creation/annihilation each.
bool is_number_conserving(const OperatorExpression& expr);

// Parses the documented operator grammar, e.g.
//   "kappa * a'(1) a(2) + kappa * a'(2) a(1) + omega * n(1) + g * sp(1) sm(1)"
// Mode indices are 1-based in text. Throws InputError with position info.
OperatorExpression parse_expression(const std::string& text);

std::string to_string(const OperatorExpression& expr);

}  // namespace holopnt::fock

#endif
