#pragma once

// Tiny arithmetic expression language for user-supplied target functions.
//
//   expr  := term (('+' | '-') term)*
//   term  := unary (('*' | '/') unary)*
//   unary := ('+' | '-') unary | power
//   power := atom ('^' unary)?
//   atom  := number | x | y | pi | (sin | cos | atan) '(' expr ')' | '(' expr ')'

#include <cctype>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bernbound {

using Function2 = std::function<double(double, double)>;

class expression_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

class ExpressionParser {
public:
    explicit ExpressionParser(std::string src) : src_(std::move(src)) {}

    Function2 parse() {
        auto f = expr();
        skip();
        if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw expression_error("expression '" + src_ + "' at offset " + std::to_string(pos_) + ": " + what);
    }

    void skip() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Function2 expr() {
        auto lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = [a = lhs, b = term()](double x, double y) { return a(x, y) + b(x, y); };
            } else if (accept('-')) {
                lhs = [a = lhs, b = term()](double x, double y) { return a(x, y) - b(x, y); };
            } else {
                return lhs;
            }
        }
    }

    Function2 term() {
        auto lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = [a = lhs, b = unary()](double x, double y) { return a(x, y) * b(x, y); };
            } else if (accept('/')) {
                lhs = [a = lhs, b = unary()](double x, double y) { return a(x, y) / b(x, y); };
            } else {
                return lhs;
            }
        }
    }

    Function2 unary() {
        if (accept('-')) return [a = unary()](double x, double y) { return -a(x, y); };
        if (accept('+')) return unary();
        return power();
    }

    Function2 power() {
        auto base = atom();
        if (accept('^')) return [a = base, b = unary()](double x, double y) { return std::pow(a(x, y), b(x, y)); };
        return base;
    }

    Function2 atom() {
        skip();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            const double v = std::stod(src_.substr(pos_), &used);
            pos_ += used;
            return [v](double, double) { return v; };
        }
        if (accept('(')) {
            auto inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        std::string name;
        while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) name += src_[pos_++];
        if (name == "x") return [](double x, double) { return x; };
        if (name == "y") return [](double, double y) { return y; };
        if (name == "pi") return [](double, double) { return std::numbers::pi; };
        double (*fn)(double) = nullptr;
        if (name == "sin") fn = [](double v) { return std::sin(v); };
        else if (name == "cos") fn = [](double v) { return std::cos(v); };
        else if (name == "atan") fn = [](double v) { return std::atan(v); };
        if (!fn) fail(name.empty() ? "expected a value" : "unknown identifier '" + name + "'");
        if (!accept('(')) fail("expected '(' after " + name);
        auto arg = expr();
        if (!accept(')')) fail("expected ')'");
        return [fn, a = arg](double x, double y) { return fn(a(x, y)); };
    }

    std::string src_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Compiles an expression in x (and y) into a callable; throws expression_error.
inline Function2 parse_expression(const std::string& src) { return detail::ExpressionParser(src).parse(); }

} // namespace bernbound
