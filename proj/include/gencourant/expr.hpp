#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gencourant/chart.hpp"

namespace gencourant {

enum class Op : std::uint8_t { Const, Sym, Neg, Add, Mul, Div, Pow, Sin, Cos, Exp, Ln, Sqrt };

struct Node;

// Immutable expression DAG over chart coordinates. Coordinates are referred
// to by index; names live on the Chart.
class Expr {
public:
    Expr();  // the constant 0
    explicit Expr(double c);

    static Expr constant(double c) { return Expr(c); }
    static Expr symbol(int index);
    // Builds a node without any simplification.
    static Expr raw(Op op, std::vector<Expr> args, int exponent = 0);

    Op op() const;
    double value() const;
    int index() const;
    int exponent() const;
    const std::vector<Expr>& args() const;

    bool is_const() const { return op() == Op::Const; }
    bool is_zero() const { return is_const() && value() == 0.0; }
    bool is_one() const { return is_const() && value() == 1.0; }
    // Bit k is set when the expression may depend on coordinate k.
    std::uint64_t deps() const;

    const Node* node() const { return p_.get(); }

private:
    explicit Expr(std::shared_ptr<const Node> p) : p_(std::move(p)) {}
    std::shared_ptr<const Node> p_;
    friend struct NodeAccess;
};

// Simplifying constructors.
Expr add(std::vector<Expr> terms);
Expr mul(std::vector<Expr> factors);
Expr neg(const Expr& a);
Expr div(const Expr& a, const Expr& b);
Expr pow(const Expr& a, int k);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr ln(const Expr& a);
Expr sqrt(const Expr& a);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator+(const Expr& a, double b);
Expr operator+(double a, const Expr& b);
Expr operator-(const Expr& a, double b);
Expr operator-(double a, const Expr& b);
Expr operator*(const Expr& a, double b);
Expr operator*(double a, const Expr& b);
Expr operator/(const Expr& a, double b);
Expr operator/(double a, const Expr& b);
Expr& operator+=(Expr& a, const Expr& b);
Expr& operator-=(Expr& a, const Expr& b);
Expr& operator*=(Expr& a, const Expr& b);

Expr parse_expr(const std::string& text, const Chart& chart);

// Exact partial derivative. Results are cached on the nodes.
Expr differentiate(const Expr& e, int coord);
Expr differentiate(const Expr& e, const std::string& coord, const Chart& chart);

Expr simplify(const Expr& e);

double evaluate(const Expr& e, std::span<const double> point);

// Infix text accepted by parse_expr. Without names, coordinates print as x1..xn.
std::string to_string(const Expr& e, const std::vector<std::string>& names = {});

std::size_t node_count(const Expr& e);

// Compiles a batch of expressions into a flat tape, sharing common nodes.
class Evaluator {
public:
    explicit Evaluator(std::span<const Expr> roots, std::vector<std::string> names = {});

    std::size_t size() const { return roots_.size(); }
    // Throws DomainError.
    void run(std::span<const double> point, std::vector<double>& out) const;

private:
    struct Instr {
        Op op;
        std::uint32_t first;   // operand offset in args_, or symbol index
        std::uint32_t count;   // operand count
        int exponent;
        double value;
        const Node* node;
    };
    std::vector<Instr> tape_;
    std::vector<std::uint32_t> args_;
    std::vector<std::uint32_t> roots_;
    std::vector<std::string> names_;
    std::vector<Expr> keep_;
};

}  // namespace gencourant
