#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace sislab {

/// Immutable expression tree in one variable `x`.
///
/// Grammar (whitespace ignored):
///
///     expr    := term (('+'|'-') term)*
///     term    := factor (('*'|'/') factor)*
///     factor  := '-'? power
///     power   := primary ('^' factor)?
///     primary := number | 'x' | func '(' expr ')' | '(' expr ')'
///     func    := 'sin' | 'cos' | 'exp' | 'log'
///
/// `^` binds tighter than unary minus and is right associative, so `-x^2` is
/// `-(x^2)` and `2^3^2` is `2^(3^2)`.
class CoeffExpr {
public:
    enum class Kind { Number, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log };

    struct Node;

    CoeffExpr();  // literal 0
    static CoeffExpr number(double v);
    static CoeffExpr var();
    static CoeffExpr unary(Kind k, CoeffExpr arg);
    static CoeffExpr binary(Kind k, CoeffExpr lhs, CoeffExpr rhs);

    Kind kind() const;
    double value() const;  // Number only
    CoeffExpr lhs() const;  // binary ops, and the argument of unary ops
    CoeffExpr rhs() const;

    double eval(double x) const;

    /// Fully parenthesised text that parses back to an identical tree.
    std::string to_string() const;

    friend bool operator==(const CoeffExpr& a, const CoeffExpr& b);

private:
    explicit CoeffExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

/// Throws ParseError (with byte offset) on malformed text or unknown identifiers.
CoeffExpr parse_expr(std::string_view text);

}  // namespace sislab
