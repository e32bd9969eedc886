#include "gencourant/expr.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <unordered_map>

#include "gencourant/errors.hpp"

namespace gencourant {

struct Node {
    Op op;
    int ival = 0;  // symbol index or exponent
    double value = 0.0;
    std::vector<Expr> args;
    std::uint64_t deps = 0;
    mutable std::vector<std::shared_ptr<const Node>> dcache;
};

struct NodeAccess {
    static Expr wrap(std::shared_ptr<const Node> p) { return Expr(std::move(p)); }
    static const std::shared_ptr<const Node>& ptr(const Expr& e) { return e.p_; }
};

namespace {

std::shared_ptr<const Node> make_const_node(double c) {
    auto n = std::make_shared<Node>();
    n->op = Op::Const;
    n->value = c;
    return n;
}

const std::shared_ptr<const Node>& zero_node() {
    static const auto z = make_const_node(0.0);
    return z;
}

const std::shared_ptr<const Node>& one_node() {
    static const auto o = make_const_node(1.0);
    return o;
}

}  // namespace

Expr::Expr() : p_(zero_node()) {}

Expr::Expr(double c) {
    if (c == 0.0 && !std::signbit(c))
        p_ = zero_node();
    else if (c == 1.0)
        p_ = one_node();
    else
        p_ = make_const_node(c);
}

Expr Expr::symbol(int index) {
    auto n = std::make_shared<Node>();
    n->op = Op::Sym;
    n->ival = index;
    n->deps = index < 64 ? (std::uint64_t{1} << index) : ~std::uint64_t{0};
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::raw(Op op, std::vector<Expr> args, int exponent) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->ival = exponent;
    for (const auto& a : args) n->deps |= a.deps();
    n->args = std::move(args);
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Op Expr::op() const { return p_->op; }
double Expr::value() const { return p_->value; }
int Expr::index() const { return p_->ival; }
int Expr::exponent() const { return p_->ival; }
const std::vector<Expr>& Expr::args() const { return p_->args; }
std::uint64_t Expr::deps() const { return p_->deps; }

// ---------------------------------------------------------------- builders

Expr add(std::vector<Expr> terms) {
    std::vector<Expr> out;
    out.reserve(terms.size());
    double c = 0.0;
    for (auto& t : terms) {
        if (t.op() == Op::Add) {
            for (const auto& s : t.args()) {
                if (s.is_const())
                    c += s.value();
                else
                    out.push_back(s);
            }
        } else if (t.is_const()) {
            c += t.value();
        } else {
            out.push_back(std::move(t));
        }
    }
    if (out.empty()) return Expr(c);
    if (c != 0.0) out.emplace_back(c);
    if (out.size() == 1) return out[0];
    return Expr::raw(Op::Add, std::move(out));
}

Expr mul(std::vector<Expr> factors) {
    std::vector<Expr> out;
    out.reserve(factors.size());
    double c = 1.0;
    for (auto& f : factors) {
        if (f.op() == Op::Mul) {
            for (const auto& s : f.args()) {
                if (s.is_const())
                    c *= s.value();
                else
                    out.push_back(s);
            }
        } else if (f.op() == Op::Neg) {
            c = -c;
            const Expr& inner = f.args()[0];
            if (inner.op() == Op::Mul) {
                for (const auto& s : inner.args()) {
                    if (s.is_const())
                        c *= s.value();
                    else
                        out.push_back(s);
                }
            } else if (inner.is_const()) {
                c *= inner.value();
            } else {
                out.push_back(inner);
            }
        } else if (f.is_const()) {
            c *= f.value();
        } else {
            out.push_back(std::move(f));
        }
        if (c == 0.0) return Expr();
    }
    if (out.empty()) return Expr(c);
    if (c == 1.0 && out.size() == 1) return out[0];
    if (c == -1.0) {
        Expr body = out.size() == 1 ? out[0] : Expr::raw(Op::Mul, std::move(out));
        return Expr::raw(Op::Neg, {body});
    }
    if (c != 1.0) out.insert(out.begin(), Expr(c));
    return Expr::raw(Op::Mul, std::move(out));
}

Expr neg(const Expr& a) {
    if (a.is_const()) return Expr(a.is_zero() ? 0.0 : -a.value());
    if (a.op() == Op::Neg) return a.args()[0];
    if (a.op() == Op::Mul && a.args()[0].is_const()) return mul({Expr(-1.0), a});
    return Expr::raw(Op::Neg, {a});
}

Expr div(const Expr& a, const Expr& b) {
    if (b.is_const() && b.value() != 0.0) {
        if (b.value() == 1.0) return a;
        return mul({a, Expr(1.0 / b.value())});
    }
    if (a.is_zero() && !b.is_const()) return Expr();
    return Expr::raw(Op::Div, {a, b});
}

Expr pow(const Expr& a, int k) {
    if (k == 0) return Expr(1.0);
    if (k == 1) return a;
    if (a.is_const() && (a.value() != 0.0 || k > 0)) return Expr(std::pow(a.value(), k));
    if (a.op() == Op::Pow) return pow(a.args()[0], a.exponent() * k);
    return Expr::raw(Op::Pow, {a}, k);
}

Expr sin(const Expr& a) {
    if (a.is_const()) return Expr(std::sin(a.value()));
    return Expr::raw(Op::Sin, {a});
}

Expr cos(const Expr& a) {
    if (a.is_const()) return Expr(std::cos(a.value()));
    return Expr::raw(Op::Cos, {a});
}

Expr exp(const Expr& a) {
    if (a.is_const()) return Expr(std::exp(a.value()));
    return Expr::raw(Op::Exp, {a});
}

Expr ln(const Expr& a) {
    if (a.is_const() && a.value() > 0.0) return Expr(std::log(a.value()));
    return Expr::raw(Op::Ln, {a});
}

Expr sqrt(const Expr& a) {
    if (a.is_const() && a.value() >= 0.0) return Expr(std::sqrt(a.value()));
    return Expr::raw(Op::Sqrt, {a});
}

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    return add({a, b});
}
Expr operator-(const Expr& a, const Expr& b) {
    if (b.is_zero()) return a;
    return add({a, neg(b)});
}
Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_zero() || b.is_zero()) return Expr();
    if (a.is_one()) return b;
    if (b.is_one()) return a;
    return mul({a, b});
}
Expr operator/(const Expr& a, const Expr& b) { return div(a, b); }
Expr operator-(const Expr& a) { return neg(a); }
Expr operator+(const Expr& a, double b) { return a + Expr(b); }
Expr operator+(double a, const Expr& b) { return Expr(a) + b; }
Expr operator-(const Expr& a, double b) { return a - Expr(b); }
Expr operator-(double a, const Expr& b) { return Expr(a) - b; }
Expr operator*(const Expr& a, double b) { return a * Expr(b); }
Expr operator*(double a, const Expr& b) { return Expr(a) * b; }
Expr operator/(const Expr& a, double b) { return a / Expr(b); }
Expr operator/(double a, const Expr& b) { return Expr(a) / b; }
Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

// --------------------------------------------------------- differentiation

namespace {

Expr derive(const Expr& e, int k) {
    const auto& a = e.args();
    switch (e.op()) {
        case Op::Const:
            return Expr();
        case Op::Sym:
            return Expr(e.index() == k ? 1.0 : 0.0);
        case Op::Neg:
            return neg(differentiate(a[0], k));
        case Op::Add: {
            std::vector<Expr> terms;
            for (const auto& t : a) {
                Expr d = differentiate(t, k);
                if (!d.is_zero()) terms.push_back(std::move(d));
            }
            return add(std::move(terms));
        }
        case Op::Mul: {
            std::vector<Expr> terms;
            for (std::size_t i = 0; i < a.size(); ++i) {
                Expr d = differentiate(a[i], k);
                if (d.is_zero()) continue;
                std::vector<Expr> f(a);
                f[i] = d;
                terms.push_back(mul(std::move(f)));
            }
            return add(std::move(terms));
        }
        case Op::Div: {
            Expr du = differentiate(a[0], k);
            Expr dv = differentiate(a[1], k);
            Expr r = du.is_zero() ? Expr() : div(du, a[1]);
            if (!dv.is_zero()) r = r - div(mul({a[0], dv}), pow(a[1], 2));
            return r;
        }
        case Op::Pow: {
            int n = e.exponent();
            return mul({Expr(static_cast<double>(n)), pow(a[0], n - 1), differentiate(a[0], k)});
        }
        case Op::Sin:
            return mul({cos(a[0]), differentiate(a[0], k)});
        case Op::Cos:
            return neg(mul({sin(a[0]), differentiate(a[0], k)}));
        case Op::Exp:
            return mul({e, differentiate(a[0], k)});
        case Op::Ln:
            return div(differentiate(a[0], k), a[0]);
        case Op::Sqrt:
            return div(differentiate(a[0], k), mul({Expr(2.0), e}));
    }
    return Expr();
}

}  // namespace

Expr differentiate(const Expr& e, int coord) {
    if (coord < 0) throw UnknownSymbol("#" + std::to_string(coord));
    if (coord < 64 && !(e.deps() & (std::uint64_t{1} << coord))) return Expr();
    const Node* n = e.node();
    auto k = static_cast<std::size_t>(coord);
    if (k < n->dcache.size() && n->dcache[k]) return NodeAccess::wrap(n->dcache[k]);
    Expr d = derive(e, coord);
    if (n->dcache.size() <= k) n->dcache.resize(k + 1);
    n->dcache[k] = NodeAccess::ptr(d);
    return d;
}

Expr differentiate(const Expr& e, const std::string& coord, const Chart& chart) {
    return differentiate(e, chart.index_of(coord));
}

// ---------------------------------------------------------------- simplify

namespace {

Expr simplify_rec(const Expr& e, std::unordered_map<const Node*, Expr>& memo) {
    auto it = memo.find(e.node());
    if (it != memo.end()) return it->second;
    std::vector<Expr> a;
    for (const auto& c : e.args()) a.push_back(simplify_rec(c, memo));
    Expr r;
    switch (e.op()) {
        case Op::Const:
        case Op::Sym:
            r = e;
            break;
        case Op::Neg: r = neg(a[0]); break;
        case Op::Add: r = add(std::move(a)); break;
        case Op::Mul: r = mul(std::move(a)); break;
        case Op::Div: r = div(a[0], a[1]); break;
        case Op::Pow: r = pow(a[0], e.exponent()); break;
        case Op::Sin: r = sin(a[0]); break;
        case Op::Cos: r = cos(a[0]); break;
        case Op::Exp: r = exp(a[0]); break;
        case Op::Ln: r = ln(a[0]); break;
        case Op::Sqrt: r = sqrt(a[0]); break;
    }
    memo.emplace(e.node(), r);
    return r;
}

}  // namespace

Expr simplify(const Expr& e) {
    std::unordered_map<const Node*, Expr> memo;
    return simplify_rec(e, memo);
}

// -------------------------------------------------------------- evaluation

namespace {

double apply(Op op, const Node* n, const double* v, std::size_t count, const std::vector<std::string>& names);

std::string describe(const Node* n, const std::vector<std::string>& names) {
    return to_string(NodeAccess::wrap(std::shared_ptr<const Node>(std::shared_ptr<const Node>{}, n)), names);
}

double apply(Op op, const Node* n, const double* v, std::size_t count,
             const std::vector<std::string>& names) {
    switch (op) {
        case Op::Neg: return -v[0];
        case Op::Add: {
            double s = 0.0;
            for (std::size_t i = 0; i < count; ++i) s += v[i];
            return s;
        }
        case Op::Mul: {
            double s = 1.0;
            for (std::size_t i = 0; i < count; ++i) s *= v[i];
            return s;
        }
        case Op::Div:
            if (v[1] == 0.0) throw DomainError("division by zero", describe(n, names));
            return v[0] / v[1];
        case Op::Pow: {
            int k = n->ival;
            if (k < 0 && v[0] == 0.0) throw DomainError("division by zero", describe(n, names));
            double r = 1.0;
            double b = k < 0 ? 1.0 / v[0] : v[0];
            for (int i = 0, m = k < 0 ? -k : k; i < m; ++i) r *= b;
            return r;
        }
        case Op::Sin: return std::sin(v[0]);
        case Op::Cos: return std::cos(v[0]);
        case Op::Exp: return std::exp(v[0]);
        case Op::Ln:
            if (!(v[0] > 0.0)) throw DomainError("logarithm of nonpositive value", describe(n, names));
            return std::log(v[0]);
        case Op::Sqrt:
            if (v[0] < 0.0) throw DomainError("square root of negative value", describe(n, names));
            return std::sqrt(v[0]);
        default: return 0.0;
    }
}

}  // namespace

Evaluator::Evaluator(std::span<const Expr> roots, std::vector<std::string> names)
    : names_(std::move(names)), keep_(roots.begin(), roots.end()) {
    std::unordered_map<const Node*, std::uint32_t> slot;
    // Iterative post-order traversal.
    std::vector<std::pair<const Node*, std::size_t>> stack;
    for (const auto& r : keep_) {
        const Node* root = r.node();
        if (!slot.count(root)) {
            stack.emplace_back(root, 0);
            while (!stack.empty()) {
                auto& [n, i] = stack.back();
                if (i < n->args.size()) {
                    const Node* c = n->args[i].node();
                    ++i;
                    if (!slot.count(c)) stack.emplace_back(c, 0);
                    continue;
                }
                Instr ins{n->op, 0, 0, n->ival, n->value, n};
                if (n->op == Op::Sym) {
                    ins.first = static_cast<std::uint32_t>(n->ival);
                } else {
                    ins.first = static_cast<std::uint32_t>(args_.size());
                    ins.count = static_cast<std::uint32_t>(n->args.size());
                    for (const auto& c : n->args) args_.push_back(slot.at(c.node()));
                }
                slot.emplace(n, static_cast<std::uint32_t>(tape_.size()));
                tape_.push_back(ins);
                stack.pop_back();
            }
        }
        roots_.push_back(slot.at(root));
    }
}

void Evaluator::run(std::span<const double> point, std::vector<double>& out) const {
    std::vector<double> val(tape_.size());
    double buf[2];
    std::vector<double> wide;
    for (std::size_t t = 0; t < tape_.size(); ++t) {
        const Instr& ins = tape_[t];
        switch (ins.op) {
            case Op::Const: val[t] = ins.value; break;
            case Op::Sym:
                if (ins.first >= point.size())
                    throw ChartMismatch("point has dimension " + std::to_string(point.size()));
                val[t] = point[ins.first];
                break;
            default: {
                const double* v;
                if (ins.count <= 2) {
                    for (std::uint32_t i = 0; i < ins.count; ++i) buf[i] = val[args_[ins.first + i]];
                    v = buf;
                } else {
                    wide.resize(ins.count);
                    for (std::uint32_t i = 0; i < ins.count; ++i) wide[i] = val[args_[ins.first + i]];
                    v = wide.data();
                }
                val[t] = apply(ins.op, ins.node, v, ins.count, names_);
            }
        }
    }
    out.resize(roots_.size());
    for (std::size_t i = 0; i < roots_.size(); ++i) out[i] = val[roots_[i]];
}

double evaluate(const Expr& e, std::span<const double> point) {
    Evaluator ev(std::span<const Expr>(&e, 1));
    std::vector<double> out;
    ev.run(point, out);
    return out[0];
}

std::size_t node_count(const Expr& e) {
    std::unordered_map<const Node*, bool> seen;
    std::vector<const Node*> stack{e.node()};
    while (!stack.empty()) {
        const Node* n = stack.back();
        stack.pop_back();
        if (!seen.emplace(n, true).second) continue;
        for (const auto& a : n->args) stack.push_back(a.node());
    }
    return seen.size();
}

// ---------------------------------------------------------------- printing

namespace {

int precedence(const Expr& e) {
    switch (e.op()) {
        case Op::Add: return 1;
        case Op::Mul:
        case Op::Div: return 2;
        case Op::Neg: return 3;
        case Op::Pow: return 4;
        case Op::Const: return e.value() < 0.0 || std::signbit(e.value()) ? 3 : 5;
        default: return 5;
    }
}

std::string number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    // Shortest form that still round-trips.
    for (int p = 1; p < 17; ++p) {
        std::snprintf(buf, sizeof buf, "%.*g", p, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return s;
}

void print(const Expr& e, const std::vector<std::string>& names, std::string& out);

void print_child(const Expr& c, int min_prec, const std::vector<std::string>& names, std::string& out) {
    if (precedence(c) < min_prec) {
        out += '(';
        print(c, names, out);
        out += ')';
    } else {
        print(c, names, out);
    }
}

void print(const Expr& e, const std::vector<std::string>& names, std::string& out) {
    const auto& a = e.args();
    switch (e.op()) {
        case Op::Const:
            if (std::signbit(e.value())) {
                out += "-" + number(-e.value());
            } else {
                out += number(e.value());
            }
            break;
        case Op::Sym:
            if (static_cast<std::size_t>(e.index()) < names.size())
                out += names[static_cast<std::size_t>(e.index())];
            else
                out += "x" + std::to_string(e.index() + 1);
            break;
        case Op::Neg:
            out += '-';
            print_child(a[0], 4, names, out);
            break;
        case Op::Add:
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (i) out += " + ";
                print_child(a[i], 2, names, out);
            }
            break;
        case Op::Mul:
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (i) out += "*";
                print_child(a[i], 3, names, out);
            }
            break;
        case Op::Div:
            print_child(a[0], 3, names, out);
            out += "/";
            print_child(a[1], 4, names, out);
            break;
        case Op::Pow:
            print_child(a[0], 5, names, out);
            out += "^";
            if (e.exponent() < 0)
                out += "(" + std::to_string(e.exponent()) + ")";
            else
                out += std::to_string(e.exponent());
            break;
        case Op::Sin:
        case Op::Cos:
        case Op::Exp:
        case Op::Ln:
        case Op::Sqrt: {
            static const char* fn[] = {"sin", "cos", "exp", "ln", "sqrt"};
            out += fn[static_cast<int>(e.op()) - static_cast<int>(Op::Sin)];
            out += '(';
            print(a[0], names, out);
            out += ')';
            break;
        }
    }
}

}  // namespace

std::string to_string(const Expr& e, const std::vector<std::string>& names) {
    std::string out;
    print(e, names, out);
    return out;
}

}  // namespace gencourant
