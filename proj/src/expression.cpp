#include "ptinv/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <vector>

#include <fmt/format.h>

#include "ptinv/errors.hpp"

namespace ptinv::expr {
namespace {

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
    return std::make_shared<const Node>(Node{op, 0.0, std::move(lhs), std::move(rhs)});
}

NodePtr constant(double v) { return std::make_shared<const Node>(Node{Op::Const, v, nullptr, nullptr}); }

bool is_const(const NodePtr& n, double v) { return n->op == Op::Const && n->value == v; }

bool depends_on_x(const NodePtr& n) {
    if (!n) return false;
    if (n->op == Op::Var) return true;
    return depends_on_x(n->lhs) || depends_on_x(n->rhs);
}

double eval(const Node& n, double x) {
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::Var: return x;
        case Op::Neg: return -eval(*n.lhs, x);
        case Op::Add: return eval(*n.lhs, x) + eval(*n.rhs, x);
        case Op::Sub: return eval(*n.lhs, x) - eval(*n.rhs, x);
        case Op::Mul: return eval(*n.lhs, x) * eval(*n.rhs, x);
        case Op::Div: return eval(*n.lhs, x) / eval(*n.rhs, x);
        case Op::Pow: {
            const double e = eval(*n.rhs, x);
            const double b = eval(*n.lhs, x);
            if (e == 2.0) return b * b;
            return std::pow(b, e);
        }
        case Op::Exp: return std::exp(eval(*n.lhs, x));
        case Op::Log: return std::log(eval(*n.lhs, x));
        case Op::Sin: return std::sin(eval(*n.lhs, x));
        case Op::Cos: return std::cos(eval(*n.lhs, x));
        case Op::Sqrt: return std::sqrt(eval(*n.lhs, x));
        case Op::Abs: return std::fabs(eval(*n.lhs, x));
        case Op::Sign: {
            const double v = eval(*n.lhs, x);
            return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
        }
        case Op::Lt: return eval(*n.lhs, x) < eval(*n.rhs, x) ? 1.0 : 0.0;
        case Op::Le: return eval(*n.lhs, x) <= eval(*n.rhs, x) ? 1.0 : 0.0;
        case Op::Gt: return eval(*n.lhs, x) > eval(*n.rhs, x) ? 1.0 : 0.0;
        case Op::Ge: return eval(*n.lhs, x) >= eval(*n.rhs, x) ? 1.0 : 0.0;
        case Op::And: return (eval(*n.lhs, x) != 0.0 && eval(*n.rhs, x) != 0.0) ? 1.0 : 0.0;
        case Op::Or: return (eval(*n.lhs, x) != 0.0 || eval(*n.rhs, x) != 0.0) ? 1.0 : 0.0;
    }
    return std::nan("");
}

// Constructors with light constant folding so derivative trees stay small.
NodePtr add(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    if (a->op == Op::Const && b->op == Op::Const) return constant(a->value + b->value);
    return make(Op::Add, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
    if (is_const(b, 0.0)) return a;
    if (a->op == Op::Const && b->op == Op::Const) return constant(a->value - b->value);
    if (is_const(a, 0.0)) return make(Op::Neg, std::move(b));
    return make(Op::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (a->op == Op::Const && b->op == Op::Const) return constant(a->value * b->value);
    return make(Op::Mul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0)) return constant(0.0);
    if (is_const(b, 1.0)) return a;
    return make(Op::Div, std::move(a), std::move(b));
}

NodePtr neg(NodePtr a) {
    if (a->op == Op::Const) return constant(-a->value);
    return make(Op::Neg, std::move(a));
}

NodePtr differentiate(const NodePtr& n) {
    switch (n->op) {
        case Op::Const: return constant(0.0);
        case Op::Var: return constant(1.0);
        case Op::Neg: return neg(differentiate(n->lhs));
        case Op::Add: return add(differentiate(n->lhs), differentiate(n->rhs));
        case Op::Sub: return sub(differentiate(n->lhs), differentiate(n->rhs));
        case Op::Mul:
            return add(mul(differentiate(n->lhs), n->rhs), mul(n->lhs, differentiate(n->rhs)));
        case Op::Div:
            return div(sub(mul(differentiate(n->lhs), n->rhs), mul(n->lhs, differentiate(n->rhs))),
                       mul(n->rhs, n->rhs));
        case Op::Pow: {
            const NodePtr& base = n->lhs;
            const NodePtr& ex = n->rhs;
            if (!depends_on_x(ex)) {
                NodePtr lowered = ex->op == Op::Const ? constant(ex->value - 1.0) : sub(ex, constant(1.0));
                return mul(mul(ex, make(Op::Pow, base, lowered)), differentiate(base));
            }
            // d(f^g) = f^g (g' log f + g f'/f)
            return mul(n, add(mul(differentiate(ex), make(Op::Log, base)),
                              div(mul(ex, differentiate(base)), base)));
        }
        case Op::Exp: return mul(n, differentiate(n->lhs));
        case Op::Log: return div(differentiate(n->lhs), n->lhs);
        case Op::Sin: return mul(make(Op::Cos, n->lhs), differentiate(n->lhs));
        case Op::Cos: return neg(mul(make(Op::Sin, n->lhs), differentiate(n->lhs)));
        case Op::Sqrt: return div(differentiate(n->lhs), mul(constant(2.0), n));
        case Op::Abs: return mul(make(Op::Sign, n->lhs), differentiate(n->lhs));
        case Op::Sign:
        case Op::Lt:
        case Op::Le:
        case Op::Gt:
        case Op::Ge:
        case Op::And:
        case Op::Or: return constant(0.0);
    }
    return constant(0.0);
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse() {
        NodePtr root = sum();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw ParseError(fmt::format("malformed expression '{}': {} at offset {}", text_, why, pos_));
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(std::string_view tok) {
        skip_space();
        if (text_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    void expect(std::string_view tok) {
        if (!accept(tok)) fail(fmt::format("expected '{}'", tok));
    }

    NodePtr sum() {
        NodePtr lhs = term();
        for (;;) {
            if (accept("+")) lhs = make(Op::Add, lhs, term());
            else if (accept("-")) lhs = make(Op::Sub, lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept("*")) lhs = make(Op::Mul, lhs, unary());
            else if (accept("/")) lhs = make(Op::Div, lhs, unary());
            else return lhs;
        }
    }

    NodePtr unary() {
        if (accept("-")) return make(Op::Neg, unary());
        if (accept("+")) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept("^")) return make(Op::Pow, base, unary());
        return base;
    }

    NodePtr primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (accept("(")) {
            NodePtr inner = sum();
            expect(")");
            return inner;
        }
        if (accept("[")) {
            NodePtr inner = condition();
            expect("]");
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t end = pos_;
            while (end < text_.size() && std::isalnum(static_cast<unsigned char>(text_[end]))) ++end;
            const std::string name(text_.substr(pos_, end - pos_));
            pos_ = end;
            if (name == "x") return make(Op::Var);
            if (name == "pi") return constant(std::numbers::pi);
            Op op;
            if (name == "exp") op = Op::Exp;
            else if (name == "log") op = Op::Log;
            else if (name == "sin") op = Op::Sin;
            else if (name == "cos") op = Op::Cos;
            else if (name == "sqrt") op = Op::Sqrt;
            else if (name == "abs") op = Op::Abs;
            else fail(fmt::format("unknown identifier '{}'", name));
            expect("(");
            NodePtr arg = sum();
            expect(")");
            return make(op, arg);
        }
        fail(fmt::format("unexpected character '{}'", c));
    }

    NodePtr number() {
        char* end = nullptr;
        const std::string rest(text_.substr(pos_));
        const double v = std::strtod(rest.c_str(), &end);
        const auto used = static_cast<std::size_t>(end - rest.c_str());
        if (used == 0) fail("bad number");
        pos_ += used;
        return constant(v);
    }

    NodePtr condition() {
        NodePtr lhs = conjunction();
        for (;;) {
            if (accept("||") || accept("|")) lhs = make(Op::Or, lhs, conjunction());
            else return lhs;
        }
    }

    NodePtr conjunction() {
        NodePtr lhs = comparison();
        for (;;) {
            if (accept("&&") || accept("&")) lhs = make(Op::And, lhs, comparison());
            else return lhs;
        }
    }

    std::optional<Op> comparator() {
        if (accept("<=")) return Op::Le;
        if (accept(">=")) return Op::Ge;
        if (accept("<")) return Op::Lt;
        if (accept(">")) return Op::Gt;
        return std::nullopt;
    }

    NodePtr comparison() {
        NodePtr left = sum();
        auto op = comparator();
        if (!op) fail("indicator needs a comparison");
        NodePtr right = sum();
        NodePtr result = make(*op, left, right);
        while (auto next = comparator()) {
            NodePtr further = sum();
            result = make(Op::And, result, make(*next, right, further));
            right = further;
        }
        return result;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text) {
    Parser p(text);
    return Expression(p.parse(), std::string(text));
}

double Expression::operator()(double x) const { return eval(*root_, x); }

Expression Expression::derivative() const {
    return Expression(differentiate(root_), "d/dx(" + source_ + ")");
}

bool Expression::is_constant() const { return !depends_on_x(root_); }

}  // namespace ptinv::expr
