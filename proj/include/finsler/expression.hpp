#pragma once

// Scalar expressions in the chart coordinates x1, x2.
//
// Grammar (whitespace is ignored):
//
//   expr    := term   { ('+' | '-') term }
//   term    := unary  { ('*' | '/') unary }
//   unary   := ('+' | '-') unary | power
//   power   := primary [ '^' unary ]            right associative
//   primary := number | 'x1' | 'x2' | 'pi'
//            | func '(' expr ')' | '(' expr ')'
//   func    := 'sqrt' | 'sin' | 'cos' | 'exp'
//
// Expressions are evaluated generically, so the same tree can be run on
// doubles or on Taylor jets.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/jet.hpp"

namespace finsler {

class Expression {
public:
    enum class Op { Const, X1, X2, Add, Sub, Mul, Div, Pow, Neg, Sqrt, Sin, Cos, Exp };

    struct Node {
        Op op = Op::Const;
        double value = 0.0;
        int lhs = -1;
        int rhs = -1;
    };

    Expression() = default;

    // `line` and `column` locate the first character of `text` in its source
    // file so that parse errors point at the offending character.
    static Expression parse(std::string_view text, int line = 1, int column = 1) {
        Parser p{text, line, column, {}, 0};
        Expression e;
        p.skip_ws();
        if (p.pos >= text.size()) p.fail("empty expression");
        e.root_ = p.parse_expr();
        p.skip_ws();
        if (p.pos != text.size()) p.fail(std::string("unexpected character '") + text[p.pos] + "'");
        e.nodes_ = std::move(p.nodes);
        e.source_ = std::string(text);
        return e;
    }

    bool empty() const { return nodes_.empty(); }
    const std::string& source() const { return source_; }

    template <class T>
    T eval(const T& x1, const T& x2) const {
        return eval_node(root_, x1, x2);
    }

private:
    template <class T>
    T eval_node(int i, const T& x1, const T& x2) const {
        using std::cos;
        using std::exp;
        using std::sin;
        using std::sqrt;
        const Node& n = nodes_[i];
        switch (n.op) {
            case Op::Const: return T(n.value);
            case Op::X1: return x1;
            case Op::X2: return x2;
            case Op::Add: return eval_node(n.lhs, x1, x2) + eval_node(n.rhs, x1, x2);
            case Op::Sub: return eval_node(n.lhs, x1, x2) - eval_node(n.rhs, x1, x2);
            case Op::Mul: return eval_node(n.lhs, x1, x2) * eval_node(n.rhs, x1, x2);
            case Op::Div: return eval_node(n.lhs, x1, x2) / eval_node(n.rhs, x1, x2);
            case Op::Neg: return -eval_node(n.lhs, x1, x2);
            case Op::Sqrt: return sqrt(eval_node(n.lhs, x1, x2));
            case Op::Sin: return sin(eval_node(n.lhs, x1, x2));
            case Op::Cos: return cos(eval_node(n.lhs, x1, x2));
            case Op::Exp: return exp(eval_node(n.lhs, x1, x2));
            case Op::Pow: {
                const Node& e = nodes_[n.rhs];
                T base = eval_node(n.lhs, x1, x2);
                if (e.op == Op::Const) {
                    const double k = e.value;
                    if (k == std::round(k) && std::abs(k) <= 16) return ipow(base, static_cast<int>(k));
                    using std::pow;
                    return pow(base, k);
                }
                using std::log;
                return exp(eval_node(n.rhs, x1, x2) * log(base));
            }
        }
        return T(0.0);
    }

    struct Parser {
        std::string_view text;
        int line;
        int column;
        std::vector<Node> nodes;
        std::size_t pos;

        [[noreturn]] void fail(const std::string& msg) const {
            throw ConfigParseError(msg, line, column + static_cast<int>(pos));
        }

        void skip_ws() {
            while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        }

        bool accept(char c) {
            skip_ws();
            if (pos < text.size() && text[pos] == c) {
                ++pos;
                return true;
            }
            return false;
        }

        int add(Op op, int lhs = -1, int rhs = -1, double value = 0.0) {
            nodes.push_back(Node{op, value, lhs, rhs});
            return static_cast<int>(nodes.size()) - 1;
        }

        int parse_expr() {
            int lhs = parse_term();
            while (true) {
                if (accept('+')) {
                    lhs = add(Op::Add, lhs, parse_term());
                } else if (accept('-')) {
                    lhs = add(Op::Sub, lhs, parse_term());
                } else {
                    return lhs;
                }
            }
        }

        int parse_term() {
            int lhs = parse_unary();
            while (true) {
                if (accept('*')) {
                    lhs = add(Op::Mul, lhs, parse_unary());
                } else if (accept('/')) {
                    lhs = add(Op::Div, lhs, parse_unary());
                } else {
                    return lhs;
                }
            }
        }

        int parse_unary() {
            if (accept('-')) return add(Op::Neg, parse_unary());
            if (accept('+')) return parse_unary();
            return parse_power();
        }

        int parse_power() {
            int base = parse_primary();
            if (accept('^')) return add(Op::Pow, base, parse_unary());
            return base;
        }

        int parse_primary() {
            skip_ws();
            if (pos >= text.size()) fail("unexpected end of expression");
            const char c = text[pos];
            if (c == '(') {
                ++pos;
                int inner = parse_expr();
                if (!accept(')')) fail("expected ')'");
                return inner;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                const std::string rest(text.substr(pos));
                char* end = nullptr;
                const double v = std::strtod(rest.c_str(), &end);
                if (end == rest.c_str()) fail("malformed number");
                pos += static_cast<std::size_t>(end - rest.c_str());
                return add(Op::Const, -1, -1, v);
            }
            if (std::isalpha(static_cast<unsigned char>(c))) {
                const std::size_t start = pos;
                while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
                    ++pos;
                }
                const std::string_view name = text.substr(start, pos - start);
                if (name == "x1") return add(Op::X1);
                if (name == "x2") return add(Op::X2);
                if (name == "pi") return add(Op::Const, -1, -1, std::numbers::pi);
                Op f;
                if (name == "sqrt") {
                    f = Op::Sqrt;
                } else if (name == "sin") {
                    f = Op::Sin;
                } else if (name == "cos") {
                    f = Op::Cos;
                } else if (name == "exp") {
                    f = Op::Exp;
                } else {
                    pos = start;
                    fail("unknown identifier '" + std::string(name) + "'");
                }
                if (!accept('(')) fail("expected '(' after " + std::string(name));
                int arg = parse_expr();
                if (!accept(')')) fail("expected ')'");
                return add(f, arg);
            }
            fail(std::string("unexpected character '") + c + "'");
        }
    };

    std::vector<Node> nodes_;
    int root_ = -1;
    std::string source_;
};

}  // namespace finsler
