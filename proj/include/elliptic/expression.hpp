#ifndef ELLIPTIC_EXPRESSION_HPP
#define ELLIPTIC_EXPRESSION_HPP

#include <string>
#include <string_view>
#include <vector>

namespace elliptic {

/// A compiled scalar expression in one variable.
///
/// Grammar: numeric literals, the variable, binary + - * / ^ (right
/// associative, binds tighter than unary minus), unary minus, parentheses and
/// the functions exp(.) and abs(.). Compiled once to postfix; evaluation is
/// allocation free apart from a small stack and is safe to call concurrently.
class Expression {
public:
    /// Throws ConfigError with the column of the first offending character.
    static Expression parse(std::string_view text, std::string_view variable = "s");

    double operator()(double x) const;

    const std::string& source() const noexcept { return source_; }

private:
    enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Abs };
    struct Instr {
        Op op;
        double value = 0.0;
    };

    class Parser;

    std::string source_;
    std::vector<Instr> code_;
    std::size_t max_depth_ = 0;
};

}  // namespace elliptic

#endif
