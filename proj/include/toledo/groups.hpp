#pragma once

// Hermitian spaces, the classical Hermitian group families, their embeddings
// into U(p,q), the Neretin factorization and the action on the bounded domain.

#include <random>
#include <string>

#include "linalg.hpp"

namespace toledo {

// Omega(X, Y) = Y^* omega X: linear in the first slot, conjugate-linear in
// the second. All signs downstream depend on this choice.
struct HermitianSpace {
    int dim = 0;
    Mat omega;
    int p = 0;
    int q = 0;

    HermitianSpace() = default;

    explicit HermitianSpace(const Mat& om, double rel_tol = 1e-10) : dim(static_cast<int>(om.rows())), omega(om) {
        require_square(om, "HermitianSpace");
        if ((om - om.adjoint()).norm() > 1e-10 * (1.0 + om.norm()))
            throw MembershipError("HermitianSpace: form is not Hermitian");
        omega = hermitian_part(om);
        Inertia in = inertia(omega, rel_tol);
        if (in.zero != 0) throw ConditioningError("HermitianSpace: form is degenerate");
        p = in.pos;
        q = in.neg;
    }

    static HermitianSpace standard(int p, int q) { return HermitianSpace(ipq(p, q)); }

    int signature() const { return p - q; }
};

// Omega(x, y) for column vectors.
inline cplx omega_of(const Mat& omega, const Vec& x, const Vec& y) { return (y.adjoint() * omega * x)(0, 0); }

inline double is_unitary_for(const HermitianSpace& space, const Mat& l) {
    require_square(l, "is_unitary_for");
    if (l.rows() != space.dim) throw DimensionError("is_unitary_for: dimension mismatch");
    return (l.adjoint() * space.omega * l - space.omega).norm();
}

inline bool is_member(const HermitianSpace& space, const Mat& l, double tol = 1e-9) {
    double scale = space.omega.norm() * std::max(1.0, l.norm());
    return is_unitary_for(space, l) < tol * scale;
}

enum class Family { U, SU, Sp, SOstar, SO0 };

inline std::string family_name(Family f) {
    switch (f) {
        case Family::U: return "u";
        case Family::SU: return "su";
        case Family::Sp: return "sp";
        case Family::SOstar: return "sostar";
        case Family::SO0: return "so";
    }
    return "?";
}

inline Family parse_family(const std::string& s) {
    if (s == "u" || s == "U_pq") return Family::U;
    if (s == "su" || s == "SU_pq") return Family::SU;
    if (s == "sp" || s == "Sp2nR") return Family::Sp;
    if (s == "sostar" || s == "SOstar2n") return Family::SOstar;
    if (s == "so" || s == "SO0_n2") return Family::SO0;
    throw Error("unknown group family: " + s);
}

// A group element in its native picture together with its image in U(p,q)
// with the standard form I_{p,q}.
struct GroupElement {
    Family family = Family::U;
    Mat native;
    Mat u;
    int p = 0;
    int q = 0;

    HermitianSpace space() const { return HermitianSpace::standard(p, q); }
};

// ------------------------------------------------------------ fixed matrices

inline Mat jn(int n) {
    Mat j = Mat::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = identity(n);
    j.bottomLeftCorner(n, n) = -identity(n);
    return j;
}

inline Mat sn(int n) {
    Mat s = Mat::Zero(2 * n, 2 * n);
    s.topRightCorner(n, n) = identity(n);
    s.bottomLeftCorner(n, n) = identity(n);
    return s;
}

inline Mat sp_cayley(int n) {
    Mat u(2 * n, 2 * n);
    u << -kI * identity(n), kI * identity(n), identity(n), identity(n);
    return u;
}

inline Mat so_star_cayley(int n) {
    Mat u(2 * n, 2 * n);
    u << identity(n), kI * identity(n), kI * identity(n), identity(n);
    return u / std::sqrt(2.0);
}

inline bool is_real(const Mat& m, double tol = 1e-12) { return m.imag().norm() <= tol * (1.0 + m.norm()); }

// --------------------------------------------------------------- embeddings

inline GroupElement embed_u(const Mat& l, int p, int q, bool special = false, double tol = 1e-9) {
    require_square(l, "embed_u");
    if (l.rows() != p + q) throw DimensionError("embed_u: dimension does not match p+q");
    if (!is_member(HermitianSpace::standard(p, q), l, tol)) throw MembershipError("element is not in U(p,q)");
    if (special && std::abs(l.determinant() - 1.0) > 1e-9) throw MembershipError("element is not in SU(p,q)");
    return {special ? Family::SU : Family::U, l, l, p, q};
}

inline GroupElement embed_sp(const Mat& m, double tol = 1e-9) {
    require_square(m, "embed_sp");
    if (m.rows() % 2 != 0) throw DimensionError("embed_sp: odd dimension");
    const int n = static_cast<int>(m.rows() / 2);
    if (!is_real(m)) throw MembershipError("embed_sp: matrix is not real");
    Mat j = jn(n);
    if ((m.transpose() * j * m - j).norm() > tol * std::max(1.0, m.squaredNorm()))
        throw MembershipError("embed_sp: matrix is not symplectic");
    Mat u = sp_cayley(n);
    Mat l = u.inverse() * m.real().cast<cplx>() * u;
    return {Family::Sp, m.real().cast<cplx>(), l, n, n};
}

inline GroupElement embed_so_star(const Mat& m, double tol = 1e-9) {
    require_square(m, "embed_so_star");
    if (m.rows() % 2 != 0) throw DimensionError("embed_so_star: odd dimension");
    const int n = static_cast<int>(m.rows() / 2);
    Mat j = jn(n);
    double scale = std::max(1.0, m.squaredNorm());
    if ((m.transpose() * m - identity(2 * n)).norm() > tol * scale)
        throw MembershipError("embed_so_star: matrix is not complex orthogonal");
    if ((m.adjoint() * j * m - j).norm() > tol * scale)
        throw MembershipError("embed_so_star: matrix does not preserve the skew-Hermitian form");
    Mat u = so_star_cayley(n);
    Mat l = u.inverse() * m * u;
    return {Family::SOstar, m, l, n, n};
}

// SO_0(n,2): real, preserves I_{n,2}, determinant one, and preserves the
// orientation of the negative plane (lower-right 2x2 block has det > 0).
inline GroupElement embed_so_n2(const Mat& m, double tol = 1e-9) {
    require_square(m, "embed_so_n2");
    if (m.rows() < 3) throw DimensionError("embed_so_n2: need n >= 1");
    const int n = static_cast<int>(m.rows()) - 2;
    if (!is_real(m)) throw MembershipError("embed_so_n2: matrix is not real");
    RMat r = m.real();
    RMat i2 = ipq(n, 2).real();
    if ((r.transpose() * i2 * r - i2).norm() > tol * std::max(1.0, r.squaredNorm()))
        throw MembershipError("embed_so_n2: form not preserved");
    if (std::abs(r.determinant() - 1.0) > 1e-8) throw MembershipError("embed_so_n2: determinant is not one");
    if (!(r.bottomRightCorner(2, 2).determinant() > 0.0)) throw MembershipError("embed_so_n2: wrong component");
    return {Family::SO0, r.cast<cplx>(), r.cast<cplx>(), n, 2};
}

// Validates a family-native matrix and returns its U(p,q) picture. For sp and
// sostar p = q = n; for so p = n, q = 2.
inline GroupElement make_element(Family f, const Mat& m, int p, int q, double tol = 1e-9) {
    switch (f) {
        case Family::U: return embed_u(m, p, q, false, tol);
        case Family::SU: return embed_u(m, p, q, true, tol);
        case Family::Sp: return embed_sp(m, tol);
        case Family::SOstar: return embed_so_star(m, tol);
        case Family::SO0: return embed_so_n2(m, tol);
    }
    throw Error("make_element: unknown family");
}

// Family-native identity of the right size.
inline Mat native_identity(Family f, int p, int q) {
    switch (f) {
        case Family::Sp:
        case Family::SOstar: return identity(2 * p);
        default: return identity(p + q);
    }
}

// Rebuild a GroupElement from a native matrix without re-validating
// (products and inverses of members).
inline GroupElement element_from_native(Family f, const Mat& m, int p, int q) {
    GroupElement g{f, m, m, p, q};
    if (f == Family::Sp) g.u = sp_cayley(p).inverse() * m * sp_cayley(p);
    else if (f == Family::SOstar) g.u = so_star_cayley(p).inverse() * m * so_star_cayley(p);
    return g;
}

inline GroupElement operator*(const GroupElement& a, const GroupElement& b) {
    if (a.family != b.family || a.p != b.p || a.q != b.q) throw DimensionError("product of mismatched elements");
    GroupElement g = a;
    g.native = a.native * b.native;
    g.u = a.u * b.u;
    return g;
}

inline GroupElement inverse(const GroupElement& a) {
    GroupElement g = a;
    g.native = a.native.inverse();
    g.u = a.u.inverse();
    return g;
}

// ---------------------------------------------------------------- Neretin

struct NeretinFactors {
    double x = 0.0;
    double y = 0.0;
    Mat u1;
    Mat u2;
    Mat w;
};

// S(W) = [[(1-WW*)^{-1/2}, (1-WW*)^{-1/2} W], [W*(1-WW*)^{-1/2}, (1-W*W)^{-1/2}]]
inline Mat s_of_w(const Mat& w) {
    const Eigen::Index p = w.rows();
    const Eigen::Index q = w.cols();
    Mat a = herm_inv_sqrt(identity(p) - w * w.adjoint());
    Mat d = herm_inv_sqrt(identity(q) - w.adjoint() * w);
    Mat s(p + q, p + q);
    s.topLeftCorner(p, p) = a;
    s.topRightCorner(p, q) = a * w;
    s.bottomLeftCorner(q, p) = w.adjoint() * a;
    s.bottomRightCorner(q, q) = d;
    return s;
}

namespace detail {
inline double reduced_phase(const Mat& k, int p) {
    if (p == 0) return 0.0;
    double period = 1.0 / p;
    double x = std::arg(k.determinant()) / (2.0 * kPi * p);
    x = std::fmod(x, period);
    if (x < 0.0) x += period;
    if (x >= period) x -= period;
    return x;
}
}  // namespace detail

inline Mat neretin_reconstruct(const NeretinFactors& f) {
    const Eigen::Index p = f.u1.rows();
    const Eigen::Index q = f.u2.rows();
    Mat k = block_diag(std::exp(2.0 * kPi * kI * f.x) * f.u1, std::exp(2.0 * kPi * kI * f.y) * f.u2);
    if (p == 0 || q == 0) return k;
    return k * s_of_w(f.w);
}

inline NeretinFactors neretin_decompose(const Mat& l, int p, int q) {
    require_square(l, "neretin_decompose");
    if (l.rows() != p + q) throw DimensionError("neretin_decompose: dimension mismatch");
    Mat a = l.topLeftCorner(p, p);
    Mat b = l.topRightCorner(p, q);
    Mat d = l.bottomRightCorner(q, q);
    NeretinFactors f;
    f.w = (p > 0) ? Mat(a.partialPivLu().solve(b)) : Mat(0, q);
    Mat k1 = a * herm_sqrt(identity(p) - f.w * f.w.adjoint());
    Mat k2 = d * herm_sqrt(identity(q) - f.w.adjoint() * f.w);
    f.x = detail::reduced_phase(k1, p);
    f.y = detail::reduced_phase(k2, q);
    f.u1 = std::exp(-2.0 * kPi * kI * f.x) * k1;
    f.u2 = std::exp(-2.0 * kPi * kI * f.y) * k2;
    double res = (neretin_reconstruct(f) - l).norm();
    if (!(res < 1e-9 * std::max(1.0, l.squaredNorm())))
        throw NumericalError("neretin_decompose: reconstruction residual too large");
    return f;
}

// ------------------------------------------------------ domain and structure

inline Mat mobius_act(const Mat& l, const Mat& w) {
    const Eigen::Index p = w.rows();
    const Eigen::Index q = w.cols();
    if (l.rows() != p + q) throw DimensionError("mobius_act: dimension mismatch");
    Mat den = l.bottomLeftCorner(q, p) * w + l.bottomRightCorner(q, q);
    Eigen::FullPivLU<Mat> lu(den);
    if (!lu.isInvertible()) throw NumericalError("mobius_act: cW + d is singular");
    return (l.topLeftCorner(p, p) * w + l.topRightCorner(p, q)) * lu.inverse();
}

inline bool in_domain(const Mat& w) {
    if (w.cols() == 0 || w.rows() == 0) return true;
    Eigen::SelfAdjointEigenSolver<Mat> es(identity(w.cols()) - w.adjoint() * w, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() > 0.0;
}

// Invariant complex structure J(W) = S(W) (i I_{p,q}) S(W)^{-1} = i S(W)^2 I_{p,q}.
inline Mat complex_structure_of(const Mat& w) {
    if (!in_domain(w)) throw MembershipError("complex_structure_of: W is not an interior point");
    const int p = static_cast<int>(w.rows());
    const int q = static_cast<int>(w.cols());
    Mat s = s_of_w(w);
    return kI * s * s * ipq(p, q);
}

// ----------------------------------------------------------------- sampling

using Rng = std::mt19937_64;

inline Mat random_complex(Rng& rng, Eigen::Index r, Eigen::Index c) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = cplx(u(rng), u(rng));
    return m;
}

inline Mat random_real(Rng& rng, Eigen::Index r, Eigen::Index c) { return random_complex(rng, r, c).real().cast<cplx>(); }

// Scale a Lie algebra sample to Frobenius norm in (0, max_norm].
inline Mat scale_sample(Rng& rng, Mat x, double max_norm) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    double n = x.norm();
    if (n > 0.0) x *= max_norm * u(rng) / n;
    return x;
}

// X with X* omega + omega X = 0.
inline Mat random_lie_u(Rng& rng, const Mat& omega, double max_norm = 2.0) {
    const Eigen::Index n = omega.rows();
    Mat x = random_complex(rng, n, n);
    x = 0.5 * (x - omega.inverse() * x.adjoint() * omega);
    return scale_sample(rng, x, max_norm);
}

inline Mat random_u(Rng& rng, const Mat& omega, double max_norm = 2.0) { return expm(random_lie_u(rng, omega, max_norm)); }

inline Mat random_su(Rng& rng, int p, int q, double max_norm = 2.0) {
    Mat x = random_lie_u(rng, ipq(p, q), max_norm);
    x -= (x.trace() / static_cast<double>(p + q)) * identity(p + q);
    return expm(x);
}

inline Mat random_sp(Rng& rng, int n, double max_norm = 2.0) {
    Mat j = jn(n);
    Mat x = random_real(rng, 2 * n, 2 * n);
    x = 0.5 * (x + j * x.transpose() * j);
    return expm(scale_sample(rng, x, max_norm)).real().cast<cplx>();
}

inline Mat random_so_star(Rng& rng, int n, double max_norm = 2.0) {
    Mat a = random_complex(rng, n, n);
    a = 0.5 * (a - a.transpose().eval());
    Mat b = random_complex(rng, n, n);
    b = 0.5 * (b + b.adjoint().eval());
    Mat x(2 * n, 2 * n);
    x << a, b, -b.conjugate(), a.conjugate();
    return expm(scale_sample(rng, x, max_norm));
}

inline Mat random_so_n2(Rng& rng, int n, double max_norm = 2.0) {
    Mat x = Mat::Zero(n + 2, n + 2);
    Mat a = random_real(rng, n, n);
    Mat d = random_real(rng, 2, 2);
    Mat b = random_real(rng, n, 2);
    x.topLeftCorner(n, n) = 0.5 * (a - a.transpose());
    x.bottomRightCorner(2, 2) = 0.5 * (d - d.transpose());
    x.topRightCorner(n, 2) = b;
    x.bottomLeftCorner(2, n) = b.transpose();
    return expm(scale_sample(rng, x, max_norm)).real().cast<cplx>();
}

// Family-native random element (identity component, generic).
inline Mat random_native(Rng& rng, Family f, int p, int q, double max_norm = 2.0) {
    switch (f) {
        case Family::U: return random_u(rng, ipq(p, q), max_norm);
        case Family::SU: return random_su(rng, p, q, max_norm);
        case Family::Sp: return random_sp(rng, p, max_norm);
        case Family::SOstar: return random_so_star(rng, p, max_norm);
        case Family::SO0: return random_so_n2(rng, p, max_norm);
    }
    throw Error("random_native: unknown family");
}

inline GroupElement random_element(Rng& rng, Family f, int p, int q, double max_norm = 2.0) {
    return element_from_native(f, random_native(rng, f, p, q, max_norm), p, q);
}

}  // namespace toledo
