// Grammar:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | '+' unary | power
//   power   := primary ('^' exponent)?
//   exponent:= ['-'] INT | '(' ['-' | '+'] INT ')'
//   primary := NUMBER | IDENT | FUNC '(' expr ')' | '(' expr ')'
//   FUNC    := sin | cos | exp | ln | sqrt
#include <cctype>
#include <cstdlib>
#include <string>

#include "gencourant/errors.hpp"
#include "gencourant/expr.hpp"

namespace gencourant {

namespace {

class Parser {
public:
    Parser(const std::string& text, const Chart& chart) : s_(text), chart_(chart) {}

    Expr run() {
        skip();
        if (pos_ >= s_.size()) throw SyntaxError("empty expression", pos_);
        Expr e = expr();
        skip();
        if (pos_ < s_.size()) throw SyntaxError(std::string("unexpected '") + s_[pos_] + "'", pos_);
        return e;
    }

private:
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= s_.size()) throw SyntaxError(std::string("expected '") + c + "'", pos_);
            throw SyntaxError(std::string("expected '") + c + "' but found '" + s_[pos_] + "'", pos_);
        }
    }

    Expr expr() {
        std::vector<Expr> terms{term()};
        for (;;) {
            if (accept('+'))
                terms.push_back(term());
            else if (accept('-'))
                terms.push_back(Expr::raw(Op::Neg, {term()}));
            else
                break;
        }
        return terms.size() == 1 ? terms[0] : Expr::raw(Op::Add, std::move(terms));
    }

    Expr term() {
        Expr lhs = unary();
        for (;;) {
            if (accept('*'))
                lhs = Expr::raw(Op::Mul, {lhs, unary()});
            else if (accept('/'))
                lhs = Expr::raw(Op::Div, {lhs, unary()});
            else
                break;
        }
        return lhs;
    }

    Expr unary() {
        if (accept('-')) return Expr::raw(Op::Neg, {unary()});
        if (accept('+')) return unary();
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (!accept('^')) return base;
        skip();
        bool paren = accept('(');
        skip();
        bool minus = false;
        if (accept('-'))
            minus = true;
        else
            accept('+');
        skip();
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) throw SyntaxError("expected integer exponent", pos_);
        if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E'))
            throw SyntaxError("exponent must be an integer", pos_);
        if (pos_ - start > 6) throw SyntaxError("exponent too large", start);
        int k = std::stoi(s_.substr(start, pos_ - start));
        if (paren) expect(')');
        return Expr::raw(Op::Pow, {base}, minus ? -k : k);
    }

    Expr primary() {
        skip();
        if (pos_ >= s_.size()) throw SyntaxError("unexpected end of input", pos_);
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            std::string id = s_.substr(start, pos_ - start);
            Op fn = Op::Const;
            if (id == "sin") fn = Op::Sin;
            else if (id == "cos") fn = Op::Cos;
            else if (id == "exp") fn = Op::Exp;
            else if (id == "ln") fn = Op::Ln;
            else if (id == "sqrt") fn = Op::Sqrt;
            if (fn != Op::Const) {
                expect('(');
                Expr arg = expr();
                expect(')');
                return Expr::raw(fn, {arg});
            }
            if (!chart_.has(id)) throw UnknownSymbol(id);
            return Expr::symbol(chart_.index_of(id));
        }
        throw SyntaxError(std::string("unexpected '") + c + "'", pos_);
    }

    Expr number() {
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw SyntaxError("malformed number", pos_);
        pos_ += static_cast<std::size_t>(end - begin);
        return Expr(v);
    }

    const std::string& s_;
    const Chart& chart_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(const std::string& text, const Chart& chart) { return Parser(text, chart).run(); }

}  // namespace gencourant
