#include "plap/cli/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

namespace plap::cli {

struct Expression::Node {
    enum class Kind { Number, X, Y, Neg, Add, Sub, Mul, Div, Sin, Cos, Abs, Step } kind;
    double value = 0.0;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind k, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0) {
    return std::make_shared<const Node>(Node{k, v, std::move(a), std::move(b)});
}

double eval(const Node& n, double x, double y) {
    switch (n.kind) {
        case Node::Kind::Number: return n.value;
        case Node::Kind::X: return x;
        case Node::Kind::Y: return y;
        case Node::Kind::Neg: return -eval(*n.a, x, y);
        case Node::Kind::Add: return eval(*n.a, x, y) + eval(*n.b, x, y);
        case Node::Kind::Sub: return eval(*n.a, x, y) - eval(*n.b, x, y);
        case Node::Kind::Mul: return eval(*n.a, x, y) * eval(*n.b, x, y);
        case Node::Kind::Div: return eval(*n.a, x, y) / eval(*n.b, x, y);
        case Node::Kind::Sin: return std::sin(eval(*n.a, x, y));
        case Node::Kind::Cos: return std::cos(eval(*n.a, x, y));
        case Node::Kind::Abs: return std::abs(eval(*n.a, x, y));
        case Node::Kind::Step: {
            const double t = eval(*n.a, x, y);
            return t > 0.0 ? 1.0 : (t < 0.0 ? 0.0 : 0.5);
        }
    }
    return 0.0;
}

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    NodePtr parse_all() {
        NodePtr e = expr();
        skip_space();
        if (pos_ != s_.size()) throw ExpressionError(std::string("unexpected '") + s_[pos_] + "'", pos_);
        return e;
    }

    bool uses_y = false;

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    void skip_space() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) throw ExpressionError(std::string("expected '") + c + "'", pos_);
    }

    NodePtr expr() {
        NodePtr left = term();
        for (;;) {
            if (accept('+')) {
                left = make(Node::Kind::Add, left, term());
            } else if (accept('-')) {
                left = make(Node::Kind::Sub, left, term());
            } else {
                return left;
            }
        }
    }

    NodePtr term() {
        NodePtr left = unary();
        for (;;) {
            if (accept('*')) {
                left = make(Node::Kind::Mul, left, unary());
            } else if (accept('/')) {
                left = make(Node::Kind::Div, left, unary());
            } else {
                return left;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Node::Kind::Neg, unary());
        if (accept('+')) return unary();
        return primary();
    }

    NodePtr primary() {
        skip_space();
        if (pos_ >= s_.size()) throw ExpressionError("unexpected end of expression", pos_);
        if (accept('(')) {
            NodePtr e = expr();
            expect(')');
            return e;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            const std::string_view name = s_.substr(start, pos_ - start);
            if (name == "x") return make(Node::Kind::X);
            if (name == "y") {
                uses_y = true;
                return make(Node::Kind::Y);
            }
            if (name == "pi") return make(Node::Kind::Number, nullptr, nullptr, std::numbers::pi);
            Node::Kind k;
            if (name == "sin") {
                k = Node::Kind::Sin;
            } else if (name == "cos") {
                k = Node::Kind::Cos;
            } else if (name == "abs") {
                k = Node::Kind::Abs;
            } else if (name == "step") {
                k = Node::Kind::Step;
            } else {
                throw ExpressionError("unknown identifier '" + std::string(name) + "'", start);
            }
            expect('(');
            NodePtr arg = expr();
            expect(')');
            return make(k, arg);
        }
        throw ExpressionError(std::string("unexpected '") + c + "'", pos_);
    }

    NodePtr number() {
        const char* begin = s_.data() + pos_;
        const char* end = s_.data() + s_.size();
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc()) throw ExpressionError("malformed number", pos_);
        pos_ += static_cast<std::size_t>(ptr - begin);
        return make(Node::Kind::Number, nullptr, nullptr, v);
    }
};

}  // namespace

Expression Expression::parse(std::string_view text) {
    Parser parser(text);
    Expression e;
    e.root_ = parser.parse_all();
    e.source_ = std::string(text);
    e.uses_y_ = parser.uses_y;
    return e;
}

double Expression::operator()(double x, double y) const { return eval(*root_, x, y); }

}  // namespace plap::cli
