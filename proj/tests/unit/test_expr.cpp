#include <doctest.h>

#include <cmath>
#include <random>

#include "sislab/error.hpp"
#include "sislab/expr.hpp"

using namespace sislab;
using K = CoeffExpr::Kind;

TEST_CASE("literal") {
    const CoeffExpr e = parse_expr("1");
    CHECK(e.kind() == K::Number);
    CHECK(e.value() == 1.0);
}

TEST_CASE("sum of literal and product") {
    const CoeffExpr e = parse_expr("1 + 0.5*x");
    const CoeffExpr want = CoeffExpr::binary(
        K::Add, CoeffExpr::number(1.0),
        CoeffExpr::binary(K::Mul, CoeffExpr::number(0.5), CoeffExpr::var()));
    CHECK(e == want);
}

TEST_CASE("exp at one") {
    const CoeffExpr e = parse_expr("exp(x)");
    CHECK(e.kind() == K::Exp);
    CHECK(e.eval(1.0) == doctest::Approx(2.718281828459045).epsilon(1e-15));
}

TEST_CASE("precedence and associativity") {
    CHECK(parse_expr("-x^2").eval(3.0) == -9.0);
    CHECK(parse_expr("2^3^2").eval(0.0) == 512.0);
    CHECK(parse_expr("8/4/2").eval(0.0) == 1.0);
    CHECK(parse_expr("1-2-3").eval(0.0) == -4.0);
    CHECK(parse_expr("2*-x").eval(2.0) == -4.0);
    CHECK(parse_expr("2^-1").eval(0.0) == 0.5);
    CHECK(parse_expr(" ( 1 + x ) * 2 ").eval(1.0) == 4.0);
    CHECK(parse_expr("1.5e2 + .5 + 2.").eval(0.0) == 152.5);
    CHECK(parse_expr("log(exp(2))").eval(0.0) == doctest::Approx(2.0));
    CHECK(parse_expr("sin(x)^2 + cos(x)^2").eval(0.7) == doctest::Approx(1.0));
}

TEST_CASE("syntax errors carry byte offsets") {
    auto offset_of = [](const char* s) -> std::size_t {
        try {
            parse_expr(s);
        } catch (const ParseError& e) {
            return e.offset();
        }
        return 9999;
    };
    CHECK(offset_of("1 + ") == 4);
    CHECK(offset_of("1 + y") == 4);
    CHECK(offset_of("sinh(x)") == 0);
    CHECK(offset_of("(1 + x") == 6);
    CHECK(offset_of("1 2") == 2);
    CHECK(offset_of("1e+") == 1);
    CHECK_THROWS_AS(parse_expr(""), ParseError);
    CHECK_THROWS_AS(parse_expr("   "), ParseError);
    CHECK_THROWS_AS(parse_expr("x x"), ConfigError);
    CHECK_THROWS_AS(parse_expr("--x"), ParseError);
}

namespace {

CoeffExpr random_tree(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 11);
    const int k = pick(rng);
    switch (k) {
        case 0: {
            std::uniform_real_distribution<double> v(-1e3, 1e3);
            // mix of round and awkward literals, including denormal-ish scales
            const int style = static_cast<int>(rng() % 3);
            double x = v(rng);
            if (style == 1) x = std::round(x);
            if (style == 2) x *= 1e-200;
            return CoeffExpr::number(std::abs(x));
        }
        case 1: return CoeffExpr::var();
        case 2: return CoeffExpr::binary(K::Add, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
        case 3: return CoeffExpr::binary(K::Sub, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
        case 4: return CoeffExpr::binary(K::Mul, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
        case 5: return CoeffExpr::binary(K::Div, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
        case 6: return CoeffExpr::binary(K::Pow, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
        case 7: return CoeffExpr::unary(K::Neg, random_tree(rng, depth - 1));
        case 8: return CoeffExpr::unary(K::Sin, random_tree(rng, depth - 1));
        case 9: return CoeffExpr::unary(K::Cos, random_tree(rng, depth - 1));
        case 10: return CoeffExpr::unary(K::Exp, random_tree(rng, depth - 1));
        default: return CoeffExpr::unary(K::Log, random_tree(rng, depth - 1));
    }
}

}  // namespace

TEST_CASE("print then parse round-trips random trees") {
    std::mt19937_64 rng(20240611);
    for (int i = 0; i < 2000; ++i) {
        const CoeffExpr e = random_tree(rng, 6);
        const std::string text = e.to_string();
        const CoeffExpr back = parse_expr(text);
        REQUIRE_MESSAGE(back == e, text);
        CHECK(back.to_string() == text);
    }
}

TEST_CASE("parsed text round-trips") {
    for (const char* s : {"1 + 0.5*x", "-x^2", "exp(-x)*(2 + sin(3*x))", "1/(1+x)^2", "-(-x)"}) {
        const CoeffExpr e = parse_expr(s);
        CHECK(parse_expr(e.to_string()) == e);
    }
}
