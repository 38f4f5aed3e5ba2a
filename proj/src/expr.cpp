#include "diskmc/expr.hpp"

#include <cmath>
#include <sstream>

namespace diskmc {

std::string type_name(Type t) {
    switch (t) {
    case Type::Int: return "int";
    case Type::Real: return "real";
    case Type::Bool: return "bool";
    }
    return "?";
}

bool Value::operator==(const Value& o) const {
    if (type != o.type) return false;
    switch (type) {
    case Type::Int: return i == o.i;
    case Type::Real: return d == o.d;
    case Type::Bool: return b == o.b;
    }
    return false;
}

ExprPtr Expr::make_literal(Value v, SourcePos pos) {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::Literal;
    e->literal = v;
    e->type = v.type;
    e->pos = pos;
    return e;
}

ExprPtr Expr::make_var(std::string name, SourcePos pos) {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::Var;
    e->name = std::move(name);
    e->pos = pos;
    return e;
}

ExprPtr Expr::make_unary(UnaryOp op, ExprPtr a, SourcePos pos) {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::Unary;
    e->uop = op;
    e->children.push_back(std::move(a));
    e->pos = pos;
    return e;
}

ExprPtr Expr::make_binary(BinaryOp op, ExprPtr a, ExprPtr b, SourcePos pos) {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::Binary;
    e->bop = op;
    e->children.push_back(std::move(a));
    e->children.push_back(std::move(b));
    e->pos = pos;
    return e;
}

ExprPtr Expr::make_ite(ExprPtr c, ExprPtr t, ExprPtr f, SourcePos pos) {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::Ite;
    e->children.push_back(std::move(c));
    e->children.push_back(std::move(t));
    e->children.push_back(std::move(f));
    e->pos = pos;
    return e;
}

ExprPtr Expr::clone() const {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->pos = pos;
    e->literal = literal;
    e->name = name;
    e->var_index = var_index;
    e->uop = uop;
    e->bop = bop;
    e->type = type;
    e->children.reserve(children.size());
    for (const auto& c : children) e->children.push_back(c->clone());
    return e;
}

bool expr_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case ExprKind::Literal:
        return a.literal == b.literal;
    case ExprKind::Var:
        return a.name == b.name;
    case ExprKind::Unary:
        if (a.uop != b.uop) return false;
        break;
    case ExprKind::Binary:
        if (a.bop != b.bop) return false;
        break;
    case ExprKind::Ite:
        break;
    }
    if (a.children.size() != b.children.size()) return false;
    for (size_t k = 0; k < a.children.size(); ++k)
        if (!expr_equal(*a.children[k], *b.children[k])) return false;
    return true;
}

namespace {

// Higher value binds tighter. Mirrors the parser's precedence ladder.
int precedence(const Expr& e) {
    switch (e.kind) {
    case ExprKind::Ite: return 1;
    case ExprKind::Binary:
        switch (e.bop) {
        case BinaryOp::Or: return 2;
        case BinaryOp::And: return 3;
        case BinaryOp::Eq: case BinaryOp::Ne:
        case BinaryOp::Lt: case BinaryOp::Le:
        case BinaryOp::Gt: case BinaryOp::Ge: return 4;
        case BinaryOp::Add: case BinaryOp::Sub: return 5;
        case BinaryOp::Mul: case BinaryOp::Div: return 6;
        case BinaryOp::Min: case BinaryOp::Max: return 9; // function syntax
        }
        return 9;
    case ExprKind::Unary: return 7;
    default: return 9; // literals, vars
    }
}

const char* binop_text(BinaryOp op) {
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "&";
    case BinaryOp::Or: return "|";
    case BinaryOp::Min: return "min";
    case BinaryOp::Max: return "max";
    }
    return "?";
}

std::string real_literal_text(double d) {
    if (std::isinf(d)) return d > 0 ? "1e400" : "-1e400"; // not produced by the parser
    // Shortest form that round-trips through strtod; always keeps a marker
    // ('.' or 'e') so the literal lexes as a real again.
    for (int prec = 1; prec <= 17; ++prec) {
        std::ostringstream os;
        os.precision(prec);
        os << d;
        std::string s = os.str();
        if (std::stod(s) == d) {
            if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
                s.find("inf") == std::string::npos)
                s += ".0";
            return s;
        }
    }
    return "0.0";
}

void print_expr(const Expr& e, std::string& out) {
    auto child = [&](const Expr& c, bool strict) {
        bool paren = precedence(c) < precedence(e) || (strict && precedence(c) == precedence(e));
        if (paren) out += '(';
        print_expr(c, out);
        if (paren) out += ')';
    };
    switch (e.kind) {
    case ExprKind::Literal:
        switch (e.literal.type) {
        case Type::Int: out += std::to_string(e.literal.i); break;
        case Type::Real: out += real_literal_text(e.literal.d); break;
        case Type::Bool: out += e.literal.b ? "true" : "false"; break;
        }
        break;
    case ExprKind::Var:
        out += e.name;
        break;
    case ExprKind::Unary:
        out += e.uop == UnaryOp::Neg ? "-" : "!";
        child(*e.children[0], true);
        break;
    case ExprKind::Binary:
        if (e.bop == BinaryOp::Min || e.bop == BinaryOp::Max) {
            out += binop_text(e.bop);
            out += '(';
            print_expr(*e.children[0], out);
            out += ", ";
            print_expr(*e.children[1], out);
            out += ')';
        } else {
            child(*e.children[0], false);
            out += ' ';
            out += binop_text(e.bop);
            out += ' ';
            // Left-associative grammar: parenthesize an equal-precedence right child.
            child(*e.children[1], true);
        }
        break;
    case ExprKind::Ite:
        child(*e.children[0], true);
        out += " ? ";
        child(*e.children[1], true);
        out += " : ";
        // '?:' is right-associative; a conditional in the else branch needs no parens.
        child(*e.children[2], precedence(*e.children[2]) != 1);
        break;
    }
}

} // namespace

std::string to_string(const Expr& e) {
    std::string out;
    print_expr(e, out);
    return out;
}

Value evaluate(const Expr& e, std::span<const int32_t> vars) {
    switch (e.kind) {
    case ExprKind::Literal:
        return e.literal;
    case ExprKind::Var:
        if (e.var_index < 0 || static_cast<size_t>(e.var_index) >= vars.size())
            throw EvalError("unresolved variable '" + e.name + "' in expression");
        return Value::of_int(vars[static_cast<size_t>(e.var_index)]);
    case ExprKind::Unary: {
        Value a = evaluate(*e.children[0], vars);
        if (e.uop == UnaryOp::Not) return Value::of_bool(!a.b);
        if (a.type == Type::Int) return Value::of_int(-a.i);
        return Value::of_real(-a.d);
    }
    case ExprKind::Ite: {
        Value c = evaluate(*e.children[0], vars);
        return evaluate(c.b ? *e.children[1] : *e.children[2], vars);
    }
    case ExprKind::Binary:
        break;
    }

    // Short-circuit booleans before evaluating the right side.
    if (e.bop == BinaryOp::And || e.bop == BinaryOp::Or) {
        Value a = evaluate(*e.children[0], vars);
        if (e.bop == BinaryOp::And && !a.b) return Value::of_bool(false);
        if (e.bop == BinaryOp::Or && a.b) return Value::of_bool(true);
        return evaluate(*e.children[1], vars);
    }

    Value a = evaluate(*e.children[0], vars);
    Value b = evaluate(*e.children[1], vars);
    bool exact = a.type == Type::Int && b.type == Type::Int;

    switch (e.bop) {
    case BinaryOp::Add:
        return exact ? Value::of_int(a.i + b.i) : Value::of_real(a.as_real() + b.as_real());
    case BinaryOp::Sub:
        return exact ? Value::of_int(a.i - b.i) : Value::of_real(a.as_real() - b.as_real());
    case BinaryOp::Mul:
        return exact ? Value::of_int(a.i * b.i) : Value::of_real(a.as_real() * b.as_real());
    case BinaryOp::Div: {
        double den = b.as_real();
        if (den == 0.0) throw EvalError("division by zero in '" + to_string(e) + "'");
        return Value::of_real(a.as_real() / den);
    }
    case BinaryOp::Min:
        return exact ? Value::of_int(std::min(a.i, b.i))
                     : Value::of_real(std::min(a.as_real(), b.as_real()));
    case BinaryOp::Max:
        return exact ? Value::of_int(std::max(a.i, b.i))
                     : Value::of_real(std::max(a.as_real(), b.as_real()));
    case BinaryOp::Eq:
        if (a.type == Type::Bool) return Value::of_bool(a.b == b.b);
        return Value::of_bool(exact ? a.i == b.i : a.as_real() == b.as_real());
    case BinaryOp::Ne:
        if (a.type == Type::Bool) return Value::of_bool(a.b != b.b);
        return Value::of_bool(exact ? a.i != b.i : a.as_real() != b.as_real());
    case BinaryOp::Lt:
        return Value::of_bool(exact ? a.i < b.i : a.as_real() < b.as_real());
    case BinaryOp::Le:
        return Value::of_bool(exact ? a.i <= b.i : a.as_real() <= b.as_real());
    case BinaryOp::Gt:
        return Value::of_bool(exact ? a.i > b.i : a.as_real() > b.as_real());
    case BinaryOp::Ge:
        return Value::of_bool(exact ? a.i >= b.i : a.as_real() >= b.as_real());
    case BinaryOp::And:
    case BinaryOp::Or:
        break; // handled above
    }
    throw EvalError("unreachable operator");
}

} // namespace diskmc
