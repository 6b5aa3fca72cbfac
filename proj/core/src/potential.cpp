#include "dislo/potential.hpp"

#include <cmath>
#include <stdexcept>

#include "dislo/forms.hpp"

namespace dislo {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

PsiLin::PsiLin(double lambda) : lambda_(lambda) {
    if (lambda <= 0.0) throw std::invalid_argument("PsiLin: lambda must be positive");
}

double PsiLin::psi(double r) const {
    const double w = wrap_value(r);
    return 0.5 * lambda_ * w * w;
}

double PsiLin::dpsi(double r) const { return lambda_ * wrap_value(r); }

double PsiLin::d2psi(double) const { return lambda_; }

double PsiCos::psi(double r) const { return (1.0 - std::cos(2.0 * kPi * r)) / (4.0 * kPi * kPi); }
double PsiCos::dpsi(double r) const { return std::sin(2.0 * kPi * r) / (2.0 * kPi); }
double PsiCos::d2psi(double r) const { return std::cos(2.0 * kPi * r); }
double PsiCos::d4psi(double r) const { return -4.0 * kPi * kPi * std::cos(2.0 * kPi * r); }

std::unique_ptr<Potential> make_potential(const std::string& name, double lambda) {
    if (name == "psi_lin") return std::make_unique<PsiLin>(lambda);
    if (name == "psi_cos") return std::make_unique<PsiCos>();
    throw std::invalid_argument("unknown potential: " + name);
}

AssumptionReport check_assumptions(const Potential& p, int grid_n) {
    if (grid_n < 100) throw std::invalid_argument("check_assumptions: grid_n must be >= 100");
    AssumptionReport rep;
    for (int k = 0; k < 5; ++k) {
        rep.pass[k] = true;
        rep.worst_gap[k] = 0.0;
        rep.worst_point[k] = 0.0;
    }
    const double tol = 1e-10;
    auto fail = [&](int slot, double x, double gap) {
        if (gap > rep.worst_gap[slot]) {
            rep.worst_gap[slot] = gap;
            rep.worst_point[slot] = x;
        }
        rep.pass[slot] = false;
    };

    const double mu = p.mu();
    for (int i = 0; i <= grid_n; ++i) {
        const double x = -0.5 + static_cast<double>(i) / grid_n;
        // (A1) periodicity
        double gap = std::abs(p.psi(x + 1.0) - p.psi(x));
        if (gap > tol) fail(0, x, gap);
        // (A2) evenness of psi and psi(1/2 + .)
        gap = std::abs(p.psi(-x) - p.psi(x));
        const double gap2 = std::abs(p.psi(0.5 + x) - p.psi(0.5 - x));
        if (gap > tol) fail(1, x, gap);
        if (gap2 > tol) fail(1, 0.5 + x, gap2);
        // (A3) zeros exactly on the integers
        const double d = std::abs(wrap_value(x));
        if (d > 0.05 && p.psi(x) <= tol) fail(2, x, tol - p.psi(x));
        if (d <= 1e-12 && std::abs(p.psi(x)) > tol) fail(2, x, std::abs(p.psi(x)));
        // (A5) quadratic lower well on [-1/2, 1/2]
        const double slack = p.psi(x) - 0.5 * mu * x * x;
        if (slack < -tol) fail(4, x, -slack);
    }
    // (A4) positive curvature at the well bottom
    if (!(mu > 0.0)) fail(3, 0.0, -mu);
    return rep;
}

}  // namespace dislo
