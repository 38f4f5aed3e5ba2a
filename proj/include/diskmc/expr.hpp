#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "diskmc/diagnostics.hpp"

namespace diskmc {

enum class Type : uint8_t { Int, Real, Bool };

std::string type_name(Type t);

// Runtime value of an expression. Integer arithmetic is exact (64-bit
// intermediates over 32-bit variables); reals are doubles and never demote.
struct Value {
    Type type = Type::Int;
    int64_t i = 0;
    double d = 0.0;
    bool b = false;

    static Value of_int(int64_t v) { return Value{Type::Int, v, 0.0, false}; }
    static Value of_real(double v) { return Value{Type::Real, 0, v, false}; }
    static Value of_bool(bool v) { return Value{Type::Bool, 0, 0.0, v}; }

    // Numeric value with int -> real promotion.
    double as_real() const { return type == Type::Int ? static_cast<double>(i) : d; }

    bool operator==(const Value& o) const;
};

enum class ExprKind : uint8_t { Literal, Var, Unary, Binary, Ite };

enum class UnaryOp : uint8_t { Neg, Not };

enum class BinaryOp : uint8_t {
    Add, Sub, Mul, Div, Min, Max,
    Eq, Ne, Lt, Le, Gt, Ge,
    And, Or,
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
    ExprKind kind = ExprKind::Literal;
    SourcePos pos;

    Value literal;                 // Literal
    std::string name;              // Var (model variable or constant before folding)
    int32_t var_index = -1;        // Var, resolved by type checking
    UnaryOp uop = UnaryOp::Neg;    // Unary
    BinaryOp bop = BinaryOp::Add;  // Binary
    std::vector<ExprPtr> children; // Unary: 1, Binary: 2, Ite: 3 (cond, then, else)

    Type type = Type::Int; // annotated by type checking

    static ExprPtr make_literal(Value v, SourcePos pos = {});
    static ExprPtr make_var(std::string name, SourcePos pos = {});
    static ExprPtr make_unary(UnaryOp op, ExprPtr a, SourcePos pos = {});
    static ExprPtr make_binary(BinaryOp op, ExprPtr a, ExprPtr b, SourcePos pos = {});
    static ExprPtr make_ite(ExprPtr c, ExprPtr t, ExprPtr e, SourcePos pos = {});

    ExprPtr clone() const;
};

// Structural equality; positions and type annotations are ignored.
bool expr_equal(const Expr& a, const Expr& b);

// Canonical text form; reparsing it yields a structurally equal tree.
std::string to_string(const Expr& e);

// Evaluate over a variable valuation. Every Var node must carry a resolved
// var_index into `vars`. Throws EvalError on division by zero.
Value evaluate(const Expr& e, std::span<const int32_t> vars);

} // namespace diskmc
