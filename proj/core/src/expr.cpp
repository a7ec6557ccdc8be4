#include "sislab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "sislab/error.hpp"

namespace sislab {

struct CoeffExpr::Node {
    Kind kind;
    double value = 0.0;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
};

CoeffExpr::CoeffExpr() : CoeffExpr(number(0.0)) {}

CoeffExpr CoeffExpr::number(double v) {
    return CoeffExpr(std::make_shared<const Node>(Node{Kind::Number, v, nullptr, nullptr}));
}

CoeffExpr CoeffExpr::var() {
    return CoeffExpr(std::make_shared<const Node>(Node{Kind::Var, 0.0, nullptr, nullptr}));
}

CoeffExpr CoeffExpr::unary(Kind k, CoeffExpr arg) {
    return CoeffExpr(std::make_shared<const Node>(Node{k, 0.0, std::move(arg.node_), nullptr}));
}

CoeffExpr CoeffExpr::binary(Kind k, CoeffExpr lhs, CoeffExpr rhs) {
    return CoeffExpr(
        std::make_shared<const Node>(Node{k, 0.0, std::move(lhs.node_), std::move(rhs.node_)}));
}

CoeffExpr::Kind CoeffExpr::kind() const { return node_->kind; }
double CoeffExpr::value() const { return node_->value; }
CoeffExpr CoeffExpr::lhs() const { return CoeffExpr(node_->a); }
CoeffExpr CoeffExpr::rhs() const { return CoeffExpr(node_->b); }

namespace {

double eval_node(const CoeffExpr::Node& n, double x) {
    using K = CoeffExpr::Kind;
    switch (n.kind) {
        case K::Number: return n.value;
        case K::Var: return x;
        case K::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
        case K::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
        case K::Mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
        case K::Div: return eval_node(*n.a, x) / eval_node(*n.b, x);
        case K::Pow: return std::pow(eval_node(*n.a, x), eval_node(*n.b, x));
        case K::Neg: return -eval_node(*n.a, x);
        case K::Sin: return std::sin(eval_node(*n.a, x));
        case K::Cos: return std::cos(eval_node(*n.a, x));
        case K::Exp: return std::exp(eval_node(*n.a, x));
        case K::Log: return std::log(eval_node(*n.a, x));
    }
    return 0.0;
}

bool equal_nodes(const CoeffExpr::Node* a, const CoeffExpr::Node* b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    if (a->kind == CoeffExpr::Kind::Number) return a->value == b->value;
    return equal_nodes(a->a.get(), b->a.get()) && equal_nodes(a->b.get(), b->b.get());
}

void print_node(const CoeffExpr::Node& n, std::string& out) {
    using K = CoeffExpr::Kind;
    auto bin = [&](char op) {
        out += '(';
        print_node(*n.a, out);
        out += ' ';
        out += op;
        out += ' ';
        print_node(*n.b, out);
        out += ')';
    };
    auto fn = [&](const char* name) {
        out += name;
        out += '(';
        print_node(*n.a, out);
        out += ')';
    };
    switch (n.kind) {
        case K::Number: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            out += buf;
            break;
        }
        case K::Var: out += 'x'; break;
        case K::Add: bin('+'); break;
        case K::Sub: bin('-'); break;
        case K::Mul: bin('*'); break;
        case K::Div: bin('/'); break;
        case K::Pow: bin('^'); break;
        case K::Neg:
            out += "(-";
            print_node(*n.a, out);
            out += ')';
            break;
        case K::Sin: fn("sin"); break;
        case K::Cos: fn("cos"); break;
        case K::Exp: fn("exp"); break;
        case K::Log: fn("log"); break;
    }
}

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    CoeffExpr parse() {
        skip_ws();
        if (pos_ == s_.size()) throw ParseError("empty expression", 0);
        CoeffExpr e = expr();
        skip_ws();
        if (pos_ != s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
        return e;
    }

private:
    using K = CoeffExpr::Kind;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    CoeffExpr expr() {
        CoeffExpr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = CoeffExpr::binary(K::Add, lhs, term());
            } else if (accept('-')) {
                lhs = CoeffExpr::binary(K::Sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    CoeffExpr term() {
        CoeffExpr lhs = factor();
        for (;;) {
            if (accept('*')) {
                lhs = CoeffExpr::binary(K::Mul, lhs, factor());
            } else if (accept('/')) {
                lhs = CoeffExpr::binary(K::Div, lhs, factor());
            } else {
                return lhs;
            }
        }
    }

    CoeffExpr factor() {
        if (accept('-')) return CoeffExpr::unary(K::Neg, power());
        return power();
    }

    CoeffExpr power() {
        CoeffExpr base = primary();
        if (accept('^')) return CoeffExpr::binary(K::Pow, base, factor());
        return base;
    }

    CoeffExpr primary() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of expression", pos_);
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            CoeffExpr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string_view id = s_.substr(start, pos_ - start);
            if (id == "x") return CoeffExpr::var();
            K fk;
            if (id == "sin") {
                fk = K::Sin;
            } else if (id == "cos") {
                fk = K::Cos;
            } else if (id == "exp") {
                fk = K::Exp;
            } else if (id == "log") {
                fk = K::Log;
            } else {
                throw ParseError("unknown identifier '" + std::string(id) + "'", start);
            }
            expect('(');
            CoeffExpr arg = expr();
            expect(')');
            return CoeffExpr::unary(fk, arg);
        }
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    // decimal with optional fraction and exponent; no sign (handled by factor)
    CoeffExpr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t nd = digits();
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            nd += digits();
        }
        if (nd == 0) throw ParseError("malformed number", start);
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            const std::size_t epos = pos_;
            ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            if (digits() == 0) throw ParseError("malformed exponent", epos);
        }
        const std::string text(s_.substr(start, pos_ - start));
        return CoeffExpr::number(std::strtod(text.c_str(), nullptr));
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

double CoeffExpr::eval(double x) const { return eval_node(*node_, x); }

std::string CoeffExpr::to_string() const {
    std::string out;
    print_node(*node_, out);
    return out;
}

bool operator==(const CoeffExpr& a, const CoeffExpr& b) {
    return equal_nodes(a.node_.get(), b.node_.get());
}

CoeffExpr parse_expr(std::string_view text) { return Parser(text).parse(); }

}  // namespace sislab
