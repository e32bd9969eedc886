#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "gencourant/chart.hpp"
#include "gencourant/expr.hpp"

namespace gencourant {

enum class Variance : std::uint8_t { Up, Down };

// Dense field of Expr components, row-major in slot order.
class TensorField {
public:
    TensorField() = default;
    TensorField(ChartPtr chart, std::vector<Variance> slots);
    TensorField(ChartPtr chart, std::vector<Variance> slots, std::vector<Expr> comps);

    static TensorField scalar(ChartPtr chart, Expr value);
    static TensorField vector(ChartPtr chart, std::vector<Expr> comps);
    static TensorField covector(ChartPtr chart, std::vector<Expr> comps);
    // Rank-p field with all slots of one variance.
    static TensorField uniform(ChartPtr chart, int rank, Variance v);

    const ChartPtr& chart() const { return chart_; }
    int dim() const { return chart_->dim(); }
    int rank() const { return static_cast<int>(slots_.size()); }
    const std::vector<Variance>& slots() const { return slots_; }
    Variance variance(int s) const { return slots_[static_cast<std::size_t>(s)]; }
    bool tensorial() const { return tensorial_; }
    void set_tensorial(bool t) { tensorial_ = t; }

    std::size_t size() const { return comps_.size(); }
    const std::vector<Expr>& components() const { return comps_; }
    std::vector<Expr>& components() { return comps_; }

    std::size_t offset(std::span<const int> idx) const;
    std::vector<int> multi_index(std::size_t flat) const;

    const Expr& at(std::span<const int> idx) const { return comps_[offset(idx)]; }
    Expr& at(std::span<const int> idx) { return comps_[offset(idx)]; }
    const Expr& at(std::initializer_list<int> idx) const {
        return comps_[offset(std::span<const int>(idx.begin(), idx.size()))];
    }
    Expr& at(std::initializer_list<int> idx) {
        return comps_[offset(std::span<const int>(idx.begin(), idx.size()))];
    }
    template <typename... I>
    const Expr& operator()(I... i) const {
        return at({static_cast<int>(i)...});
    }
    template <typename... I>
    Expr& operator()(I... i) {
        return at({static_cast<int>(i)...});
    }
    // The rank-0 value.
    const Expr& value() const { return comps_.at(0); }

private:
    ChartPtr chart_;
    std::vector<Variance> slots_;
    std::vector<Expr> comps_;
    bool tensorial_ = true;
};

void require_same_chart(const TensorField& a, const TensorField& b);

TensorField operator+(const TensorField& a, const TensorField& b);
TensorField operator-(const TensorField& a, const TensorField& b);
TensorField operator*(const Expr& s, const TensorField& t);
TensorField operator*(double s, const TensorField& t);

TensorField tensor_product(const TensorField& a, const TensorField& b);
TensorField contract(const TensorField& t, int up_slot, int down_slot);
// New slot k is old slot perm[k].
TensorField permute(const TensorField& t, std::span<const int> perm);
TensorField permute(const TensorField& t, std::initializer_list<int> perm);

// Inverse of a symmetric (0,2) or (2,0) field; throws SingularMetric when
// |det| < 1e-10 at a sample point.
TensorField inverse_metric(const TensorField& g);
void check_nonsingular(const TensorField& metric);
TensorField raise_index(const TensorField& t, const TensorField& metric_inverse, int slot);
TensorField lower_index(const TensorField& t, const TensorField& metric, int slot);

TensorField antisymmetrize(const TensorField& t, std::span<const int> slot_set);
TensorField symmetrize(const TensorField& t, std::span<const int> slot_set);
TensorField antisymmetrize(const TensorField& t);  // all slots
TensorField symmetrize(const TensorField& t);

// Leading down slot holding raw partial derivatives; flagged non-tensorial.
TensorField coordinate_gradient(const TensorField& t);

// d of a fully covariant antisymmetric field.
TensorField exterior_derivative(const TensorField& form);

// Interior product with a vector field in the first slot.
TensorField interior(const TensorField& v, const TensorField& form);

// Throws NotAntisymmetric when a transposition in the slot set changes a
// sampled component by more than tol.
void check_antisymmetric(const TensorField& t, std::span<const int> slot_set, double tol = 1e-10);
void check_antisymmetric(const TensorField& t, double tol = 1e-10);
void check_symmetric(const TensorField& t, double tol = 1e-10);

}  // namespace gencourant
