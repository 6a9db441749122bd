#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace ptinv::expr {

enum class Op {
    Const, Var,
    Neg, Add, Sub, Mul, Div, Pow,
    Exp, Log, Sin, Cos, Sqrt, Abs, Sign,
    Lt, Le, Gt, Ge, And, Or,
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Op op;
    double value = 0.0;  // Const only
    NodePtr lhs;
    NodePtr rhs;
};

/// Real-valued expression in the single variable x.
///
/// Grammar (lowest to highest precedence):
///   sum     := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?            right associative
///   primary := number | x | pi | func '(' sum ')' | '(' sum ')' | '[' cond ']'
///   cond    := conj (('|' | '||') conj)*
///   conj    := cmp (('&' | '&&') cmp)*
///   cmp     := sum (('<' | '<=' | '>' | '>=') sum)+   chained, e.g. [0<x<1]
/// with func one of exp, log, sin, cos, sqrt, abs. A bracketed condition is an
/// indicator: 1 where it holds, 0 elsewhere.
class Expression {
public:
    static Expression parse(std::string_view text);

    double operator()(double x) const;

    /// Symbolic derivative in x. Indicators differentiate to zero (the jump
    /// is not representable), abs to sign.
    Expression derivative() const;

    bool is_constant() const;
    const std::string& source() const noexcept { return source_; }

private:
    Expression(NodePtr root, std::string source) : root_(std::move(root)), source_(std::move(source)) {}

    NodePtr root_;
    std::string source_;
};

}  // namespace ptinv::expr
