#pragma once

#include "plap/error.hpp"

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

namespace plap::cli {

class ExpressionError : public PreconditionError {
public:
    ExpressionError(const std::string& msg, std::size_t position)
        : PreconditionError(msg + " at column " + std::to_string(position + 1)), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Arithmetic over the coordinates x and y:
///   expr   := term (('+' | '-') term)*
///   term   := unary (('*' | '/') unary)*
///   unary  := '-' unary | primary
///   primary:= number | 'x' | 'y' | 'pi' | name '(' expr ')' | '(' expr ')'
/// with name one of sin, cos, abs, step. step(t) is 0 for t < 0, 1 for t > 0
/// and 1/2 at t = 0.
class Expression {
public:
    static Expression parse(std::string_view text);

    double operator()(double x, double y = 0.0) const;
    const std::string& source() const noexcept { return source_; }
    bool uses_y() const noexcept { return uses_y_; }

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    std::string source_;
    bool uses_y_ = false;
};

}  // namespace plap::cli
