#include "dislo/elastic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dislo {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

double yhat(Vec2 x) {
    if (x.x == 0.0 && x.y == 0.0) throw std::invalid_argument("yhat: undefined at the origin");
    double t = std::atan2(x.y, x.x);
    if (t < 0.0) t += kTwoPi;
    return t / kTwoPi;
}

Vec2 grad_yhat(Vec2 x) {
    const double r2 = x.norm2();
    if (r2 == 0.0) throw std::invalid_argument("grad_yhat: undefined at the origin");
    return {-x.y / (kTwoPi * r2), x.x / (kTwoPi * r2)};
}

double alpha_hat_bond(Vec2 tail, Vec2 head, Vec2 center) {
    const Vec2 p = tail - center;
    const Vec2 q = head - center;
    return std::atan2(cross(p, q), dot(p, q)) / kTwoPi;
}

ReferenceField ReferenceField::dislocation(const LatticeDomain& dom, Vec2 center, Vec2 shear) {
    ReferenceField ref;
    ref.dom_ = &dom;
    ref.center_ = center;
    ref.shear_ = shear;
    ref.flat_ = false;
    ref.alpha_hat_ = OneForm(dom);
    ref.strain_ = OneForm(dom);
    for (int b = 0; b < dom.bond_count(); ++b) {
        const Vec2 t = dom.site_pos(dom.bond_tail(b));
        const Vec2 h = dom.site_pos(dom.bond_head(b));
        const double a = alpha_hat_bond(t, h, center);
        ref.alpha_hat_[b] = a;
        ref.strain_[b] = a + dot(shear, direction_vector(dom.bond_dir(b)));
    }
    return ref;
}

ReferenceField ReferenceField::flat(const LatticeDomain& dom) {
    ReferenceField ref;
    ref.dom_ = &dom;
    ref.flat_ = true;
    ref.alpha_hat_ = OneForm(dom);
    ref.strain_ = OneForm(dom);
    return ref;
}

const std::vector<double>& ReferenceField::force(const Potential& pot) const {
    std::ostringstream key;
    key << pot.name() << ':' << pot.mu();
    std::lock_guard<std::mutex> lock(force_cache_->mutex);
    auto it = force_cache_->fields.find(key.str());
    if (it != force_cache_->fields.end()) return it->second;

    std::vector<double> f(dom_->site_count(), 0.0);
    for (int b = 0; b < dom_->bond_count(); ++b) {
        const double v = pot.dpsi(strain_[b]);
        f[dom_->bond_tail(b)] -= v;
        f[dom_->bond_head(b)] += v;
    }
    auto [pos, ok] = force_cache_->fields.emplace(key.str(), std::move(f));
    (void)ok;
    return pos->second;
}

}  // namespace dislo
