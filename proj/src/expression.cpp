#include "elliptic/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>

#include "elliptic/errors.hpp"

namespace elliptic {

class Expression::Parser {
public:
    Parser(std::string_view text, std::string_view var, std::vector<Instr>& out)
        : text_(text), var_(var), out_(out) {}

    void run() {
        expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
    }

private:
    std::string_view text_;
    std::string_view var_;
    std::vector<Instr>& out_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("expression '" + std::string(text_) + "': " + msg + " at column " +
                          std::to_string(pos_ + 1));
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void emit(Op op, double v = 0.0) { out_.push_back({op, v}); }

    void expr() {
        term();
        for (;;) {
            if (accept('+')) {
                term();
                emit(Op::Add);
            } else if (accept('-')) {
                term();
                emit(Op::Sub);
            } else {
                return;
            }
        }
    }

    void term() {
        unary();
        for (;;) {
            if (accept('*')) {
                unary();
                emit(Op::Mul);
            } else if (accept('/')) {
                unary();
                emit(Op::Div);
            } else {
                return;
            }
        }
    }

    // -s^2 parses as -(s^2).
    void unary() {
        if (accept('-')) {
            unary();
            emit(Op::Neg);
        } else if (accept('+')) {
            unary();
        } else {
            power();
        }
    }

    void power() {
        primary();
        if (accept('^')) {
            unary();
            emit(Op::Pow);
        }
    }

    void primary() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const std::string tail(text_.substr(pos_));
            char* end = nullptr;
            const double v = std::strtod(tail.c_str(), &end);
            if (end == tail.c_str()) fail("malformed number");
            pos_ += static_cast<std::size_t>(end - tail.c_str());
            emit(Op::Const, v);
            return;
        }
        if (accept('(')) {
            expr();
            if (!accept(')')) fail("expected ')'");
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            const std::string_view name = text_.substr(start, pos_ - start);
            if (name == var_) {
                emit(Op::Var);
                return;
            }
            Op fn;
            if (name == "exp") {
                fn = Op::Exp;
            } else if (name == "abs") {
                fn = Op::Abs;
            } else {
                pos_ = start;
                fail("unknown identifier '" + std::string(name) + "'");
            }
            if (!accept('(')) fail("expected '(' after function name");
            expr();
            if (!accept(')')) fail("expected ')'");
            emit(fn);
            return;
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

Expression Expression::parse(std::string_view text, std::string_view variable) {
    Expression e;
    e.source_ = std::string(text);
    Parser(text, variable, e.code_).run();

    std::size_t depth = 0;
    for (const auto& ins : e.code_) {
        switch (ins.op) {
            case Op::Const:
            case Op::Var:
                ++depth;
                break;
            case Op::Add:
            case Op::Sub:
            case Op::Mul:
            case Op::Div:
            case Op::Pow:
                --depth;
                break;
            default:
                break;
        }
        e.max_depth_ = std::max(e.max_depth_, depth);
    }
    return e;
}

double Expression::operator()(double x) const {
    // Postfix evaluation; small expressions fit the inline buffer.
    double inline_stack[32] = {};
    std::vector<double> heap;
    double* st = inline_stack;
    if (max_depth_ > 32) {
        heap.resize(max_depth_);
        st = heap.data();
    }
    std::size_t sp = 0;
    for (const auto& ins : code_) {
        switch (ins.op) {
            case Op::Const: st[sp++] = ins.value; break;
            case Op::Var: st[sp++] = x; break;
            case Op::Add: --sp; st[sp - 1] += st[sp]; break;
            case Op::Sub: --sp; st[sp - 1] -= st[sp]; break;
            case Op::Mul: --sp; st[sp - 1] *= st[sp]; break;
            case Op::Div: --sp; st[sp - 1] /= st[sp]; break;
            case Op::Pow: --sp; st[sp - 1] = std::pow(st[sp - 1], st[sp]); break;
            case Op::Neg: st[sp - 1] = -st[sp - 1]; break;
            case Op::Exp: st[sp - 1] = std::exp(st[sp - 1]); break;
            case Op::Abs: st[sp - 1] = std::fabs(st[sp - 1]); break;
        }
    }
    return st[0];
}

}  // namespace elliptic
