#include "gencourant/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gencourant/errors.hpp"
#include "gencourant/matrix.hpp"
#include "gencourant/sampling.hpp"

namespace gencourant {

namespace {

std::size_t ipow(int n, int k) {
    std::size_t r = 1;
    for (int i = 0; i < k; ++i) r *= static_cast<std::size_t>(n);
    return r;
}

void require_tensorial(const TensorField& t, const char* op) {
    if (!t.tensorial()) throw SlotError(std::string(op) + ": input is flagged non-tensorial");
}

void require_slot(const TensorField& t, int s) {
    if (s < 0 || s >= t.rank())
        throw SlotError("slot " + std::to_string(s) + " out of range for rank " + std::to_string(t.rank()));
}

int sign_of_permutation(std::vector<int> p) {
    int sign = 1;
    for (std::size_t i = 0; i < p.size(); ++i) {
        while (p[i] != static_cast<int>(i)) {
            std::swap(p[i], p[static_cast<std::size_t>(p[i])]);
            sign = -sign;
        }
    }
    return sign;
}

TensorField project(const TensorField& t, std::span<const int> set, bool skew) {
    require_tensorial(t, skew ? "antisymmetrize" : "symmetrize");
    std::vector<int> s(set.begin(), set.end());
    for (int k : s) require_slot(t, k);
    auto sorted = s;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw SlotError("repeated slot");
    for (int k : s)
        if (t.variance(k) != t.variance(s[0])) throw SlotError("slot set mixes variances");
    if (s.size() < 2) return t;

    std::vector<int> perm(s.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::pair<std::vector<int>, int>> perms;
    do {
        perms.emplace_back(perm, skew ? sign_of_permutation(perm) : 1);
    } while (std::next_permutation(perm.begin(), perm.end()));
    double norm = 1.0 / static_cast<double>(perms.size());

    TensorField out(t.chart(), t.slots());
    for (std::size_t f = 0; f < out.size(); ++f) {
        auto idx = out.multi_index(f);
        std::vector<Expr> terms;
        for (const auto& [p, sg] : perms) {
            auto j = idx;
            for (std::size_t a = 0; a < s.size(); ++a)
                j[static_cast<std::size_t>(s[a])] = idx[static_cast<std::size_t>(s[static_cast<std::size_t>(p[a])])];
            const Expr& c = t.at(j);
            if (c.is_zero()) continue;
            terms.push_back(sg > 0 ? c : neg(c));
        }
        out.components()[f] = norm * add(std::move(terms));
    }
    return out;
}

std::vector<int> all_slots(const TensorField& t) {
    std::vector<int> s(static_cast<std::size_t>(t.rank()));
    std::iota(s.begin(), s.end(), 0);
    return s;
}

}  // namespace

TensorField::TensorField(ChartPtr chart, std::vector<Variance> slots)
    : chart_(std::move(chart)), slots_(std::move(slots)) {
    comps_.resize(ipow(chart_->dim(), rank()));
}

TensorField::TensorField(ChartPtr chart, std::vector<Variance> slots, std::vector<Expr> comps)
    : chart_(std::move(chart)), slots_(std::move(slots)), comps_(std::move(comps)) {
    if (comps_.size() != ipow(chart_->dim(), rank()))
        throw SlotError("component count " + std::to_string(comps_.size()) + " does not match n^rank");
}

TensorField TensorField::scalar(ChartPtr chart, Expr value) {
    return TensorField(std::move(chart), {}, {std::move(value)});
}

TensorField TensorField::vector(ChartPtr chart, std::vector<Expr> comps) {
    return TensorField(std::move(chart), {Variance::Up}, std::move(comps));
}

TensorField TensorField::covector(ChartPtr chart, std::vector<Expr> comps) {
    return TensorField(std::move(chart), {Variance::Down}, std::move(comps));
}

TensorField TensorField::uniform(ChartPtr chart, int rank, Variance v) {
    return TensorField(std::move(chart), std::vector<Variance>(static_cast<std::size_t>(rank), v));
}

std::size_t TensorField::offset(std::span<const int> idx) const {
    if (static_cast<int>(idx.size()) != rank()) throw SlotError("index arity does not match rank");
    std::size_t o = 0;
    int n = dim();
    for (int i : idx) {
        if (i < 0 || i >= n) throw SlotError("index out of range");
        o = o * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
    }
    return o;
}

std::vector<int> TensorField::multi_index(std::size_t flat) const {
    std::vector<int> idx(static_cast<std::size_t>(rank()));
    auto n = static_cast<std::size_t>(dim());
    for (int s = rank() - 1; s >= 0; --s) {
        idx[static_cast<std::size_t>(s)] = static_cast<int>(flat % n);
        flat /= n;
    }
    return idx;
}

void require_same_chart(const TensorField& a, const TensorField& b) {
    if (a.chart() == b.chart()) return;
    if (!a.chart() || !b.chart() || a.chart()->names() != b.chart()->names())
        throw ChartMismatch("fields live on different charts");
}

TensorField operator+(const TensorField& a, const TensorField& b) {
    require_same_chart(a, b);
    if (a.slots() != b.slots()) throw SlotError("sum of fields with different slot variances");
    TensorField r(a.chart(), a.slots());
    for (std::size_t i = 0; i < r.size(); ++i) r.components()[i] = a.components()[i] + b.components()[i];
    r.set_tensorial(a.tensorial() && b.tensorial());
    return r;
}

TensorField operator-(const TensorField& a, const TensorField& b) {
    require_same_chart(a, b);
    if (a.slots() != b.slots()) throw SlotError("difference of fields with different slot variances");
    TensorField r(a.chart(), a.slots());
    for (std::size_t i = 0; i < r.size(); ++i) r.components()[i] = a.components()[i] - b.components()[i];
    r.set_tensorial(a.tensorial() && b.tensorial());
    return r;
}

TensorField operator*(const Expr& s, const TensorField& t) {
    TensorField r(t.chart(), t.slots());
    for (std::size_t i = 0; i < r.size(); ++i) r.components()[i] = s * t.components()[i];
    r.set_tensorial(t.tensorial());
    return r;
}

TensorField operator*(double s, const TensorField& t) { return Expr(s) * t; }

TensorField tensor_product(const TensorField& a, const TensorField& b) {
    require_same_chart(a, b);
    auto slots = a.slots();
    slots.insert(slots.end(), b.slots().begin(), b.slots().end());
    TensorField r(a.chart(), slots);
    std::size_t nb = b.size();
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < nb; ++j) r.components()[i * nb + j] = a.components()[i] * b.components()[j];
    r.set_tensorial(a.tensorial() && b.tensorial());
    return r;
}

TensorField contract(const TensorField& t, int up_slot, int down_slot) {
    require_tensorial(t, "contract");
    require_slot(t, up_slot);
    require_slot(t, down_slot);
    if (up_slot == down_slot) throw SlotError("cannot contract a slot with itself");
    if (t.variance(up_slot) != Variance::Up || t.variance(down_slot) != Variance::Down)
        throw SlotError("contract needs an up slot and a down slot");
    std::vector<Variance> slots;
    for (int s = 0; s < t.rank(); ++s)
        if (s != up_slot && s != down_slot) slots.push_back(t.variance(s));
    TensorField r(t.chart(), slots);
    int n = t.dim();
    for (std::size_t f = 0; f < r.size(); ++f) {
        auto idx = r.multi_index(f);
        std::vector<int> full(static_cast<std::size_t>(t.rank()));
        for (int s = 0, k = 0; s < t.rank(); ++s)
            if (s != up_slot && s != down_slot) full[static_cast<std::size_t>(s)] = idx[static_cast<std::size_t>(k++)];
        std::vector<Expr> terms;
        for (int i = 0; i < n; ++i) {
            full[static_cast<std::size_t>(up_slot)] = i;
            full[static_cast<std::size_t>(down_slot)] = i;
            const Expr& c = t.at(full);
            if (!c.is_zero()) terms.push_back(c);
        }
        r.components()[f] = add(std::move(terms));
    }
    return r;
}

TensorField permute(const TensorField& t, std::span<const int> perm) {
    if (static_cast<int>(perm.size()) != t.rank()) throw SlotError("permutation arity does not match rank");
    std::vector<Variance> slots;
    for (int p : perm) {
        require_slot(t, p);
        slots.push_back(t.variance(p));
    }
    TensorField r(t.chart(), slots);
    for (std::size_t f = 0; f < r.size(); ++f) {
        auto idx = r.multi_index(f);
        std::vector<int> old(idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) old[static_cast<std::size_t>(perm[k])] = idx[k];
        r.components()[f] = t.at(old);
    }
    r.set_tensorial(t.tensorial());
    return r;
}

TensorField permute(const TensorField& t, std::initializer_list<int> perm) {
    return permute(t, std::span<const int>(perm.begin(), perm.size()));
}

void check_nonsingular(const TensorField& metric) {
    if (metric.rank() != 2) throw SlotError("metric must have rank 2");
    Expr det = determinant(to_matrix(metric));
    for (const auto& p : metric.chart()->sample_points()) {
        double d = evaluate(det, p);
        if (!(std::fabs(d) >= 1e-10)) throw SingularMetric("metric determinant " + std::to_string(d) + " at a sample point");
    }
}

TensorField inverse_metric(const TensorField& g) {
    if (g.rank() != 2 || g.variance(0) != g.variance(1)) throw SlotError("metric must be (0,2) or (2,0)");
    check_nonsingular(g);
    Variance v = g.variance(0) == Variance::Down ? Variance::Up : Variance::Down;
    return to_tensor(inverse(to_matrix(g)), g.chart(), v, v);
}

namespace {

TensorField move_index(const TensorField& t, const TensorField& m, int slot, Variance from) {
    require_tensorial(t, "raise/lower");
    require_same_chart(t, m);
    require_slot(t, slot);
    if (t.variance(slot) != from) throw SlotError("slot variance does not match the operation");
    if (m.rank() != 2 || m.variance(0) != m.variance(1) || m.variance(0) == from)
        throw SlotError("metric has the wrong variance");
    check_nonsingular(m);
    auto slots = t.slots();
    slots[static_cast<std::size_t>(slot)] = from == Variance::Up ? Variance::Down : Variance::Up;
    TensorField r(t.chart(), slots);
    int n = t.dim();
    for (std::size_t f = 0; f < r.size(); ++f) {
        auto idx = r.multi_index(f);
        int a = idx[static_cast<std::size_t>(slot)];
        std::vector<Expr> terms;
        for (int b = 0; b < n; ++b) {
            idx[static_cast<std::size_t>(slot)] = b;
            Expr term = m(a, b) * t.at(idx);
            if (!term.is_zero()) terms.push_back(term);
        }
        r.components()[f] = add(std::move(terms));
    }
    return r;
}

}  // namespace

TensorField raise_index(const TensorField& t, const TensorField& metric_inverse, int slot) {
    return move_index(t, metric_inverse, slot, Variance::Down);
}

TensorField lower_index(const TensorField& t, const TensorField& metric, int slot) {
    return move_index(t, metric, slot, Variance::Up);
}

TensorField antisymmetrize(const TensorField& t, std::span<const int> slot_set) { return project(t, slot_set, true); }
TensorField symmetrize(const TensorField& t, std::span<const int> slot_set) { return project(t, slot_set, false); }
TensorField antisymmetrize(const TensorField& t) { return project(t, all_slots(t), true); }
TensorField symmetrize(const TensorField& t) { return project(t, all_slots(t), false); }

TensorField coordinate_gradient(const TensorField& t) {
    std::vector<Variance> slots{Variance::Down};
    slots.insert(slots.end(), t.slots().begin(), t.slots().end());
    TensorField r(t.chart(), slots);
    std::size_t m = t.size();
    for (int mu = 0; mu < t.dim(); ++mu)
        for (std::size_t i = 0; i < m; ++i)
            r.components()[static_cast<std::size_t>(mu) * m + i] = differentiate(t.components()[i], mu);
    r.set_tensorial(false);
    return r;
}

TensorField exterior_derivative(const TensorField& form) {
    require_tensorial(form, "exterior_derivative");
    for (auto v : form.slots())
        if (v != Variance::Down) throw SlotError("exterior derivative needs a covariant field");
    int p = form.rank();
    TensorField r = TensorField::uniform(form.chart(), p + 1, Variance::Down);
    for (std::size_t f = 0; f < r.size(); ++f) {
        auto idx = r.multi_index(f);
        auto sorted = idx;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;
        std::vector<Expr> terms;
        for (int k = 0; k <= p; ++k) {
            std::vector<int> rest;
            for (int j = 0; j <= p; ++j)
                if (j != k) rest.push_back(idx[static_cast<std::size_t>(j)]);
            Expr d = differentiate(form.at(rest), idx[static_cast<std::size_t>(k)]);
            if (d.is_zero()) continue;
            terms.push_back(k % 2 == 0 ? d : neg(d));
        }
        r.components()[f] = add(std::move(terms));
    }
    return r;
}

TensorField interior(const TensorField& v, const TensorField& form) {
    if (v.rank() != 1 || v.variance(0) != Variance::Up) throw SlotError("interior product needs a vector field");
    if (form.rank() < 1 || form.variance(0) != Variance::Down) throw SlotError("interior product needs a form");
    return contract(tensor_product(v, form), 0, 1);
}

void check_antisymmetric(const TensorField& t, std::span<const int> slot_set, double tol) {
    std::vector<Expr> res;
    for (std::size_t a = 0; a < slot_set.size(); ++a)
        for (std::size_t b = a + 1; b < slot_set.size(); ++b) {
            std::vector<int> perm(static_cast<std::size_t>(t.rank()));
            std::iota(perm.begin(), perm.end(), 0);
            std::swap(perm[static_cast<std::size_t>(slot_set[a])], perm[static_cast<std::size_t>(slot_set[b])]);
            TensorField s = permute(t, perm);
            for (std::size_t i = 0; i < t.size(); ++i) res.push_back(t.components()[i] + s.components()[i]);
        }
    Worst w = worst(res, *t.chart());
    if (w.max_abs > tol)
        throw NotAntisymmetric("field is not antisymmetric: max residual " + std::to_string(w.max_abs));
}

void check_antisymmetric(const TensorField& t, double tol) {
    auto s = all_slots(t);
    check_antisymmetric(t, s, tol);
}

void check_symmetric(const TensorField& t, double tol) {
    if (t.rank() != 2) throw SlotError("symmetry check needs rank 2");
    TensorField s = permute(t, {1, 0});
    std::vector<Expr> res;
    for (std::size_t i = 0; i < t.size(); ++i) res.push_back(t.components()[i] - s.components()[i]);
    Worst w = worst(res, *t.chart());
    if (w.max_abs > tol) throw ValidationError("field is not symmetric: max residual " + std::to_string(w.max_abs));
}

}  // namespace gencourant
