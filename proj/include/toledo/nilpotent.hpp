#pragma once

// Normal form of nilpotent skew-adjoint maps: an Omega-orthogonal sum of
// single Jordan blocks, each carrying a sign.
//
// tau_j(u, v) = Omega((iN)^j u, v). For a uniform N of height m the
// complement F of NE is corrected until tau_j vanishes on F for j < m; a
// tau_m-orthogonal basis of F then generates the blocks.

#include <vector>

#include "groups.hpp"

namespace toledo {

struct JordanBlock {
    int dim = 0;
    int sign = 0;  // even dim: sign of tau_{dim-1}(e, e); odd dim: signature of Omega on the block
    Mat basis;     // columns b_1..b_dim with N b_j = b_{j-1}, N b_1 = 0
};

struct JordanBlockDecomp {
    std::vector<JordanBlock> blocks;

    Mat change_of_basis() const {
        if (blocks.empty()) return Mat(0, 0);
        Mat v(blocks.front().basis.rows(), 0);
        for (const auto& b : blocks) v = hcat(v, b.basis);
        return v;
    }

    // Sum over even blocks of -sign.
    int rho() const {
        int r = 0;
        for (const auto& b : blocks)
            if (b.dim % 2 == 0) r -= b.sign;
        return r;
    }
};

namespace detail {

// Nilpotent maps this small in norm are treated as zero.
inline constexpr double kZeroNilpotent = 1e-10;

inline Mat normalized(const Mat& n) {
    double s = n.norm();
    return s > kZeroNilpotent ? Mat(n / s) : Mat(Mat::Zero(n.rows(), n.cols()));
}

inline int height_normalized(const Mat& nh) {
    const Eigen::Index d = nh.rows();
    if (d == 0 || nh.norm() == 0.0) return 0;
    Mat pw = nh;
    int m = 0;
    while (pw.norm() > 1e-9) {
        ++m;
        if (m > d) throw MembershipError("height_of: matrix is not nilpotent");
        pw = pw * nh;
    }
    return m;
}

// Exactly k trailing right singular vectors.
inline Mat trailing_null(const Mat& a, Eigen::Index k) {
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
    return svd.matrixV().rightCols(k);
}

inline Mat tau_gram(const Mat& omega, const Mat& nh, const Mat& f, int j) {
    Mat x = f;
    for (int i = 0; i < j; ++i) x = kI * (nh * x);
    return f.adjoint() * omega * x;
}

// Complement of ker(nh^m), with nh of height m.
inline Mat top_complement(const Mat& nh, int m) {
    Mat k = identity(nh.rows());
    for (int i = 0; i < m; ++i) k = nh * k;
    return range_space(k.adjoint(), 1e-8);
}

inline Mat correct_complement(const Mat& omega, const Mat& nh, Mat f, int m) {
    for (int k = m - 1; k >= 0; --k) {
        Mat gk = tau_gram(omega, nh, f, k);
        if (gk.norm() < 1e-14) continue;
        Mat gm = tau_gram(omega, nh, f, m);
        Eigen::FullPivLU<Mat> lu(gm);
        if (!lu.isInvertible()) throw ConditioningError("canonical_complement: tau_m degenerate on F");
        Mat phi = -0.5 * lu.solve(gk);
        Mat shift = f * phi;
        for (int i = 0; i < m - k; ++i) shift = kI * (nh * shift);
        f = f + shift;
    }
    return orthonormalize(f);
}

}  // namespace detail

inline int height_of(const Mat& n) {
    require_square(n, "height_of");
    return detail::height_normalized(detail::normalized(n));
}

struct UniformSplit {
    Mat y;  // orthonormal basis of Y = sum of N^j F
    Mat z;  // orthonormal basis of the Omega-orthogonal complement
    int height = 0;
};

inline UniformSplit uniform_split(const HermitianSpace& space, const Mat& n) {
    require_square(n, "uniform_split");
    const Eigen::Index d = n.rows();
    Mat nh = detail::normalized(n);
    UniformSplit out;
    out.height = detail::height_normalized(nh);
    if (out.height == 0) {
        out.y = Mat(d, 0);
        out.z = identity(d);
        return out;
    }
    Mat f = detail::top_complement(nh, out.height);
    Mat y = f;
    Mat cur = f;
    for (int j = 0; j < out.height; ++j) {
        cur = nh * cur;
        y = hcat(y, cur);
    }
    out.y = orthonormalize(y);
    if (inertia(out.y.adjoint() * space.omega * out.y, 1e-9).zero != 0)
        throw ConditioningError("uniform_split: Omega degenerate on Y");
    Eigen::Index dz = d - out.y.cols();
    out.z = dz > 0 ? detail::trailing_null(out.y.adjoint() * space.omega, dz) : Mat(d, 0);
    return out;
}

inline Mat canonical_complement(const HermitianSpace& space, const Mat& n) {
    require_square(n, "canonical_complement");
    Mat nh = detail::normalized(n);
    int m = detail::height_normalized(nh);
    if (m == 0) return identity(n.rows());
    Mat f = detail::top_complement(nh, m);
    if (f.cols() * (m + 1) != n.rows()) throw ConditioningError("canonical_complement: N is not uniform");
    return detail::correct_complement(space.omega, nh, f, m);
}

inline int block_sign(const HermitianSpace& space, const Mat& n, const Mat& basis) {
    const int dim = static_cast<int>(basis.cols());
    if (dim % 2 != 0) throw DimensionError("block_sign: block dimension is odd");
    Vec e = basis.col(dim - 1);
    Mat nh = detail::normalized(n);
    Vec x = e;
    for (int j = 0; j < dim - 1; ++j) x = kI * (nh * x);
    cplx t = omega_of(space.omega, x, e);
    if (std::abs(t) <= 1e-10 * space.omega.norm() * e.squaredNorm()) throw ConditioningError("block_sign: degenerate block");
    return static_cast<int>(sgn(t.real()));
}

inline JordanBlockDecomp block_decompose(const HermitianSpace& space, const Mat& n) {
    require_square(n, "block_decompose");
    if (n.rows() != space.dim) throw DimensionError("block_decompose: dimension mismatch");
    const double res = (n.adjoint() * space.omega + space.omega * n).norm();
    if (res > 1e-9 * space.omega.norm() * std::max(1.0, n.norm()))
        throw MembershipError("block_decompose: N is not skew-adjoint for Omega");
    const Eigen::Index d = n.rows();
    Mat nh = detail::normalized(n);
    JordanBlockDecomp out;
    Mat x = identity(d);  // current Omega-orthogonal remainder, orthonormal columns
    while (x.cols() > 0) {
        Mat om = hermitian_part(x.adjoint() * space.omega * x);
        Mat nx = x.adjoint() * nh * x;
        int m = detail::height_normalized(nx);
        if (m == 0) {
            Eigen::SelfAdjointEigenSolver<Mat> es(om);
            for (Eigen::Index k = 0; k < om.rows(); ++k) {
                double ev = es.eigenvalues()(k);
                if (std::abs(ev) <= 1e-10) throw ConditioningError("block_decompose: degenerate form on kernel part");
                out.blocks.push_back({1, static_cast<int>(sgn(ev)), x * es.eigenvectors().col(k)});
            }
            break;
        }
        HermitianSpace sub(om, 1e-9);
        UniformSplit us = uniform_split(sub, nx);
        Mat f = detail::correct_complement(om, nx, detail::top_complement(nx, m), m);
        Mat gm = hermitian_part(detail::tau_gram(om, nx, f, m));
        Eigen::SelfAdjointEigenSolver<Mat> es(gm);
        for (Eigen::Index k = 0; k < gm.rows(); ++k) {
            double ev = es.eigenvalues()(k);
            if (std::abs(ev) <= 1e-10) throw ConditioningError("block_decompose: tau_m degenerate");
            Vec u = x * (f * es.eigenvectors().col(k));
            Mat chain(d, m + 1);
            chain.col(m) = u;
            for (int j = m - 1; j >= 0; --j) chain.col(j) = n * chain.col(j + 1);
            chain /= chain.colwise().norm().maxCoeff();
            out.blocks.push_back({m + 1, static_cast<int>(sgn(ev)), chain});
        }
        x = x * us.z;
    }
    return out;
}

// Model of a nilpotent skew-adjoint map with prescribed blocks (dim, s),
// s = +-1: N is the upper shift on each block and Omega is antidiagonal with
// alternating entries (real for odd dim, imaginary for even dim).
struct NilpotentModel {
    HermitianSpace space;
    Mat n;
};

inline NilpotentModel nilpotent_model(const std::vector<std::pair<int, int>>& blocks) {
    int d = 0;
    for (const auto& b : blocks) d += b.first;
    Mat omega = Mat::Zero(d, d), n = Mat::Zero(d, d);
    int off = 0;
    for (const auto& [dim, s] : blocks) {
        cplx base = (dim % 2 == 1) ? cplx(s, 0.0) : cplx(0.0, s);
        for (int a = 1; a <= dim; ++a) {
            int b = dim + 1 - a;
            omega(off + b - 1, off + a - 1) = ((a % 2 == 0) ? 1.0 : -1.0) * base;
            if (a > 1) n(off + a - 2, off + a - 1) = 1.0;
        }
        off += dim;
    }
    return {HermitianSpace(omega), n};
}

// The same map written in a basis where Omega = I_{p,q}.
inline NilpotentModel standardize(const NilpotentModel& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(m.space.omega);
    const Eigen::Index d = m.n.rows();
    Mat c(d, d);
    int col = 0;
    for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index i = d - 1; i >= 0; --i) {
            double mu = es.eigenvalues()(i);
            if ((pass == 0) != (mu > 0.0)) continue;
            c.col(col++) = es.eigenvectors().col(i) / std::sqrt(std::abs(mu));
        }
    Mat omega = ipq(m.space.p, m.space.q);
    return {HermitianSpace(omega), c.partialPivLu().solve(m.n * c)};
}

}  // namespace toledo
