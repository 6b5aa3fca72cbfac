#pragma once

#include <span>
#include <vector>

#include "dislo/lattice.hpp"

namespace dislo {

// Anti-plane displacement: one real value per site. Values outside the active
// region of an energy state are kept clamped at zero by the code that owns
// them; the reference site carries value zero for freshly built fields.
class Displacement {
public:
    Displacement() = default;
    explicit Displacement(const LatticeDomain& dom)
        : dom_(&dom), values_(dom.site_count(), 0.0) {}

    const LatticeDomain& domain() const { return *dom_; }
    double operator[](int site) const { return values_[site]; }
    double& operator[](int site) { return values_[site]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }
    int size() const { return static_cast<int>(values_.size()); }

private:
    const LatticeDomain* dom_ = nullptr;
    std::vector<double> values_;
};

// Antisymmetric bond field: one value per canonical bond, negated on reversed
// evaluation. Norms run over canonical bonds in index order.
template <typename T>
class BondForm {
public:
    BondForm() = default;
    explicit BondForm(const LatticeDomain& dom)
        : dom_(&dom), values_(dom.bond_count(), T{}) {}

    const LatticeDomain& domain() const { return *dom_; }
    T operator[](int bond) const { return values_[bond]; }
    T& operator[](int bond) { return values_[bond]; }
    int size() const { return static_cast<int>(values_.size()); }

    T on(BondRef br) const { return br.sign > 0 ? values_[br.bond] : static_cast<T>(-values_[br.bond]); }
    T on(Step st) const { return on(dom_->bond(st)); }

    double norm1() const {
        double s = 0.0;
        for (T v : values_) s += std::abs(static_cast<double>(v));
        return s;
    }
    double norm2_sq() const {
        double s = 0.0;
        for (T v : values_) s += static_cast<double>(v) * static_cast<double>(v);
        return s;
    }
    double norm_inf() const {
        double s = 0.0;
        for (T v : values_) s = std::max(s, std::abs(static_cast<double>(v)));
        return s;
    }

private:
    const LatticeDomain* dom_ = nullptr;
    std::vector<T> values_;
};

using OneForm = BondForm<double>;
using IntegerForm = BondForm<int>;

// Finite difference Du_b = u(head) - u(tail) on canonical bonds.
OneForm difference(const Displacement& u);

// Wrap a real value into (-1/2, 1/2] with the half-integer tie broken to +1/2.
double wrap_value(double w);

// Bondwise wrap of a 1-form; the result differs from the input by integers.
OneForm wrap(const OneForm& w);

// Remove adjacent core pairs carried by half-integer shared bonds: whenever
// two opposite-sign cores share a bond with |alpha_b| = 1/2, flipping that
// bond's sign removes both cores while staying inside the same wrap class.
// Idempotent.
OneForm cleanup_adjacent_cores(const OneForm& alpha);

// Sum of a 1-form over an oriented bond path; throws when a path bond is
// missing from the domain.
double integrate(const OneForm& w, std::span<const Step> path);
int integrate(const IntegerForm& w, std::span<const Step> path);

// Circulation around the positively oriented boundary of a cell.
double cell_circulation(const OneForm& w, int cell);
int cell_circulation(const IntegerForm& w, int cell);

}  // namespace dislo
