#pragma once

// The rho invariant of an element of U(E, Omega): zero on the hyperbolic
// summand, an eigen-angle sum on the elliptic summand, and minus the sum of
// even Jordan block signs on the unipotent summand.

#include <string>
#include <vector>

#include "nilpotent.hpp"
#include "spectral.hpp"

namespace toledo {

struct BlockContribution {
    int dim = 0;
    int sign = 0;
    double rho = 0.0;
};

struct RhoBreakdown {
    double total = 0.0;
    double hu = 0.0;
    double eu = 0.0;
    double u = 0.0;
    std::vector<BlockContribution> per_block;
    std::vector<std::string> condition_flags;
};

inline RhoBreakdown rho(const HermitianSpace& space, const Mat& l, const Tolerances& tol = {}) {
    SpectralSplit sp = split_heu(space, l, tol);
    RhoBreakdown r;
    r.condition_flags = sp.flags;
    if (!sp.eu.empty()) {
        HermitianSpace sub(sp.eu.omega_r);
        JordanChevalley jc = jordan_chevalley(sp.eu.l_r, tol);
        Mat b = elliptic_log(jc.s, tol);
        r.eu = sub.signature() - 2.0 * trace_omega(sub, b, tol);
    }
    if (!sp.u.empty()) {
        HermitianSpace sub(sp.u.omega_r);
        // Drop the rounding noise that leaves the Lie algebra.
        Mat n = nilpotent_log(sp.u.l_r);
        n = 0.5 * (n - sub.omega.partialPivLu().solve(Mat(n.adjoint() * sub.omega)));
        JordanBlockDecomp bd = block_decompose(sub, n);
        for (const auto& b : bd.blocks) {
            double c = (b.dim % 2 == 0) ? -static_cast<double>(b.sign) : 0.0;
            r.per_block.push_back({b.dim, b.sign, c});
            r.u += c;
        }
    }
    r.total = r.hu + r.eu + r.u;
    return r;
}

inline double rho(const GroupElement& g, const Tolerances& tol = {}) {
    if (g.family == Family::SO0) throw Error("rho is not provided for SO_0(n,2)");
    double r = rho(g.space(), g.u, tol).total;
    return g.family == Family::Sp ? 0.0 - r : r;
}

// Hermitian matrix of H_{B + i theta}(u, v) = Omega(i(B + i theta) u, v).
inline Mat h_matrix(const HermitianSpace& space, const Mat& b, double theta) {
    return hermitian_part(space.omega * (kI * (b + kI * theta * identity(b.rows()))));
}

// Independent oracle for rho(exp(2 pi B)), B nilpotent skew-adjoint:
// -sigma(0) + sigma(0+) + sign(Omega), sigma(theta) = sign(H_{B + i theta}).
// H_{B + i theta} is invertible for every theta != 0 (its determinant is a
// multiple of theta^dim), so a collision at theta_star only means the
// smallest eigenvalue fell under the cutoff; theta_star is then increased.
inline double rho_sigma_jump(const HermitianSpace& space, const Mat& b, double theta_star = -1.0) {
    require_square(b, "rho_sigma_jump");
    if (b.rows() != space.dim) throw DimensionError("rho_sigma_jump: dimension mismatch");
    if ((b.adjoint() * space.omega + space.omega * b).norm() > 1e-9 * space.omega.norm() * std::max(1.0, b.norm()))
        throw MembershipError("rho_sigma_jump: B is not skew-adjoint for Omega");
    if (theta_star <= 0.0) theta_star = 1e-4 * (1.0 + b.norm());
    int s0 = inertia(h_matrix(space, b, 0.0), 1e-10).signature();
    for (int attempt = 0; attempt < 7; ++attempt) {
        Inertia in = inertia(h_matrix(space, b, theta_star), 1e-10);
        if (in.zero == 0) return -s0 + in.signature() + space.signature();
        theta_star *= 10.0;
    }
    throw NumericalError("rho_sigma_jump: no admissible theta_star");
}

inline double rho_sp(const Mat& m, const Tolerances& tol = {}) { return rho(embed_sp(m), tol); }

inline double rho_so_star(const Mat& m, const Tolerances& tol = {}) { return rho(embed_so_star(m), tol); }

// ------------------------------------------------------- closed-form tables

// Class of L1 in SL(2,R) for L = e^{i theta} U^{-1} L1 U in U(1,1):
// hyperbolic diag(lambda, 1/lambda), elliptic R(theta1), or parabolic
// [[lambda, mu], [0, lambda]] with lambda = +-1.
struct U11Class {
    enum Kind { Hyperbolic, Elliptic, Parabolic } kind = Hyperbolic;
    double lambda = 2.0;
    double theta1 = 0.0;
    double mu = 0.0;

    static U11Class hyperbolic(double lam) { return {Hyperbolic, lam, 0.0, 0.0}; }
    static U11Class elliptic(double th1) { return {Elliptic, 0.0, th1, 0.0}; }
    static U11Class parabolic(double lam, double mu) { return {Parabolic, lam, 0.0, mu}; }

    Mat l1() const {
        Mat m(2, 2);
        switch (kind) {
            case Hyperbolic: m << lambda, 0.0, 0.0, 1.0 / lambda; break;
            case Elliptic: m << std::cos(theta1), -std::sin(theta1), std::sin(theta1), std::cos(theta1); break;
            case Parabolic: m << lambda, mu, 0.0, lambda; break;
        }
        return m;
    }
};

inline Mat u11_element(double theta, const U11Class& c) {
    Mat u = sp_cayley(1);
    return std::exp(kI * theta) * (u.inverse() * c.l1() * u);
}

inline void check_table_domain(const U11Class& c) {
    if (c.kind == U11Class::Elliptic) {
        double t = c.theta1;
        if (!(t > 0.0 && t < 2.0 * kPi) || t == kPi) throw Error("table: theta1 must lie in (0,pi) or (pi,2pi)");
    }
    if (c.kind == U11Class::Parabolic && std::abs(c.lambda) != 1.0) throw Error("table: parabolic lambda must be +-1");
    if (c.kind == U11Class::Hyperbolic && (std::abs(c.lambda) == 1.0 || c.lambda == 0.0))
        throw Error("table: hyperbolic lambda must be off the unit circle");
}

// Closed-form rho in U(1,1), theta in [0, 2 pi), sgn(0) = 0.
inline double rho_u11_table(double theta, const U11Class& c) {
    check_table_domain(c);
    switch (c.kind) {
        case U11Class::Hyperbolic: return 0.0;
        case U11Class::Elliptic:
            return sgn(theta - c.theta1) - sgn(theta + c.theta1 - 2.0 * kPi) - 2.0 + 2.0 * c.theta1 / kPi;
        case U11Class::Parabolic:
            if (c.mu == 0.0) return 0.0;
            if (c.lambda > 0.0) return c.mu > 0.0 ? 1.0 - sgn(theta) : -1.0 + sgn(theta);
            return c.mu > 0.0 ? -1.0 + std::abs(sgn(theta - kPi)) : 1.0 - std::abs(sgn(theta - kPi));
    }
    return 0.0;
}

// Closed-form rho in Sp(2,R) for L1 itself.
inline double rho_sp_table(const U11Class& c) {
    check_table_domain(c);
    switch (c.kind) {
        case U11Class::Hyperbolic: return 0.0;
        case U11Class::Elliptic: return 2.0 * (1.0 - c.theta1 / kPi);
        case U11Class::Parabolic:
            if (c.mu == 0.0 || c.lambda < 0.0) return 0.0;
            return c.mu > 0.0 ? -1.0 : 1.0;
    }
    return 0.0;
}

// True when the table formula sits on one of its sgn discontinuities.
inline bool table_boundary(double theta, const U11Class& c) {
    if (c.kind == U11Class::Elliptic) return theta == c.theta1 || theta + c.theta1 == 2.0 * kPi;
    if (c.kind == U11Class::Parabolic && c.mu != 0.0) return c.lambda > 0.0 ? theta == 0.0 : theta == kPi;
    return false;
}

}  // namespace toledo
