#pragma once

#include <array>
#include <memory>
#include <string>

namespace dislo {

// 1-periodic nearest-neighbour pair potential. The model assumptions:
//   (A1) 1-periodic, (A2) psi and psi(1/2 + .) even, (A3) zeros exactly at
//   the integers, (A4) mu = psi''(0) > 0, (A5) psi(x) >= mu x^2 / 2 on
//   [-1/2, 1/2].
class Potential {
public:
    virtual ~Potential() = default;
    virtual double psi(double r) const = 0;
    virtual double dpsi(double r) const = 0;
    virtual double d2psi(double r) const = 0;
    virtual double d4psi(double r) const = 0;
    virtual double mu() const = 0;
    virtual std::string name() const = 0;
    // true when psi'' is undefined on the half-integers (kinked wells)
    virtual bool kinked() const { return false; }
};

// Piecewise-quadratic prototype psi(r) = (lambda/2) dist(r, Z)^2. The
// derivative at half-integers is the left derivative (+lambda/2).
class PsiLin final : public Potential {
public:
    explicit PsiLin(double lambda);
    double psi(double r) const override;
    double dpsi(double r) const override;
    double d2psi(double r) const override;
    double d4psi(double) const override { return 0.0; }
    double mu() const override { return lambda_; }
    std::string name() const override { return "psi_lin"; }
    bool kinked() const override { return true; }
    double lambda() const { return lambda_; }

private:
    double lambda_;
};

// Smooth test potential psi(r) = (1 - cos 2 pi r) / (4 pi^2); mu = 1. Fails
// the quadratic lower-well assumption (A5).
class PsiCos final : public Potential {
public:
    double psi(double r) const override;
    double dpsi(double r) const override;
    double d2psi(double r) const override;
    double d4psi(double r) const override;
    double mu() const override { return 1.0; }
    std::string name() const override { return "psi_cos"; }
};

std::unique_ptr<Potential> make_potential(const std::string& name, double lambda);

struct AssumptionReport {
    // slots: periodic, even, zero-set, mu-positive, quadratic-lower-well
    std::array<bool, 5> pass{};
    std::array<double, 5> worst_point{};
    std::array<double, 5> worst_gap{};
    bool all() const { return pass[0] && pass[1] && pass[2] && pass[3] && pass[4]; }
};

// Grid-sampled verification of (A1)-(A5); grid_n >= 100.
AssumptionReport check_assumptions(const Potential& p, int grid_n);

}  // namespace dislo
