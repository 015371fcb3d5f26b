#pragma once

// Dense complex kernel: clustering of eigenvalues into generalized
// eigenspaces, logarithms, Hermitian square roots and signatures.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace toledo {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

// Error taxonomy. The CLI maps each class onto a fixed exit code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionError : Error {
    using Error::Error;
};
struct MembershipError : Error {
    using Error::Error;
};
struct ConditioningError : Error {
    using Error::Error;
};
struct RoundingError : Error {
    using Error::Error;
};
struct RelationError : Error {
    using Error::Error;
};
struct NumericalError : Error {
    using Error::Error;
};

// Tunable tolerances. Defaults are the documented ones; override with
// parse_overrides("circle=1e-6,gate=1e-4").
struct Tolerances {
    double cluster = 1e-8;     // minimal clustering radius, relative to 1+|M|_F
    double rank = 1e-10;       // singular value cut, relative to the largest
    double circle = 1e-7;      // | |lambda| - 1 | test
    double one = 1e-7;         // | lambda - 1 | test
    double membership = 1e-9;  // group membership residual, relative to |Omega|
    double gate = 1e-3;        // rounding gate for integer outputs
    double relation = 1e-8;    // surface relation residual
    double unwrap = 0.25;      // max lifted phase step between path samples
    int max_depth = 20;        // bisection depth for path refinement

    void set(const std::string& key, double v) {
        if (!(v > 0.0) || !std::isfinite(v)) throw Error("tolerance must be positive: " + key);
        if (key == "cluster") cluster = v;
        else if (key == "rank") rank = v;
        else if (key == "circle") circle = v;
        else if (key == "one") one = v;
        else if (key == "membership") membership = v;
        else if (key == "gate") gate = v;
        else if (key == "relation") relation = v;
        else if (key == "unwrap") unwrap = v;
        else if (key == "max_depth") max_depth = static_cast<int>(v);
        else throw Error("unknown tolerance key: " + key);
    }

    // Comma separated key=value list.
    void parse_overrides(const std::string& spec) {
        std::stringstream ss(spec);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            auto eq = item.find('=');
            if (eq == std::string::npos) throw Error("bad tolerance override: " + item);
            std::string key = item.substr(0, eq);
            std::string val = item.substr(eq + 1);
            char* end = nullptr;
            double v = std::strtod(val.c_str(), &end);
            if (end == val.c_str() || *end != '\0') throw Error("bad tolerance value: " + item);
            set(key, v);
        }
    }
};

// ---------------------------------------------------------------- helpers

inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

inline Mat identity(Eigen::Index n) { return Mat::Identity(n, n); }

inline Mat ipq(int p, int q) {
    Mat m = Mat::Zero(p + q, p + q);
    for (int i = 0; i < p; ++i) m(i, i) = 1.0;
    for (int i = p; i < p + q; ++i) m(i, i) = -1.0;
    return m;
}

inline Mat block_diag(const Mat& a, const Mat& b) {
    Mat m = Mat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    m.topLeftCorner(a.rows(), a.cols()) = a;
    m.bottomRightCorner(b.rows(), b.cols()) = b;
    return m;
}

inline Mat hcat(const Mat& a, const Mat& b) {
    if (a.cols() == 0) return b;
    if (b.cols() == 0) return a;
    Mat m(a.rows(), a.cols() + b.cols());
    m << a, b;
    return m;
}

inline void require_square(const Mat& m, const char* what) {
    if (m.rows() != m.cols()) throw DimensionError(std::string(what) + ": matrix is not square");
}

inline bool all_finite(const Mat& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i)
        if (!std::isfinite(m.data()[i].real()) || !std::isfinite(m.data()[i].imag())) return false;
    return true;
}

inline Mat expm(const Mat& m) {
    if (m.rows() == 0) return m;
    return m.exp();
}

inline Mat hermitian_part(const Mat& h) { return 0.5 * (h + h.adjoint()); }

struct Inertia {
    int pos = 0;
    int neg = 0;
    int zero = 0;
    double min_abs = 0.0;  // smallest |eigenvalue|, for conditioning reports
    int signature() const { return pos - neg; }
};

// Inertia of a Hermitian matrix; eigenvalues below rel_tol * max|eig| count as zero.
inline Inertia inertia(const Mat& h, double rel_tol = 1e-10) {
    Inertia r;
    if (h.rows() == 0) return r;
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    double scale = ev.cwiseAbs().maxCoeff();
    double cut = rel_tol * scale;
    r.min_abs = ev.cwiseAbs().minCoeff();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > cut) ++r.pos;
        else if (ev(i) < -cut) ++r.neg;
        else ++r.zero;
    }
    if (scale == 0.0) r.zero = static_cast<int>(ev.size());
    return r;
}

inline int signature(const Mat& h, double rel_tol = 1e-10) { return inertia(h, rel_tol).signature(); }

// Orthonormal basis of the numerical null space of a.
inline Mat null_space(const Mat& a, double rel_tol = 1e-10) {
    const Eigen::Index n = a.cols();
    if (n == 0) return Mat(0, 0);
    if (a.rows() == 0) return identity(n);
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    double cut = rel_tol * (s.size() ? s(0) : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cut && s(i) > 0.0) ++rank;
    return svd.matrixV().rightCols(n - rank);
}

// Orthonormal basis of the numerical range of a.
inline Mat range_space(const Mat& a, double rel_tol = 1e-10) {
    if (a.cols() == 0 || a.rows() == 0) return Mat(a.rows(), 0);
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    double cut = rel_tol * s(0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cut && s(i) > 0.0) ++rank;
    return svd.matrixU().leftCols(rank);
}

// Orthonormal basis of the span of the columns, assuming full column rank.
inline Mat orthonormalize(const Mat& a) {
    if (a.cols() == 0) return a;
    Eigen::HouseholderQR<Mat> qr(a);
    return qr.householderQ() * Mat::Identity(a.rows(), a.cols());
}

// ------------------------------------------------------------ eig_clusters

struct EigenCluster {
    cplx value;
    int multiplicity = 0;
    Mat basis;
};

namespace detail {

inline std::vector<std::vector<int>> link_groups(const std::vector<cplx>& ev, const std::vector<int>& idx,
                                                 double radius) {
    const int k = static_cast<int>(idx.size());
    std::vector<int> parent(k);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b)
            if (std::abs(ev[idx[a]] - ev[idx[b]]) < radius) parent[find(a)] = find(b);
    std::vector<std::vector<int>> out;
    std::vector<int> slot(k, -1);
    for (int a = 0; a < k; ++a) {
        int r = find(a);
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(out.size());
            out.emplace_back();
        }
        out[slot[r]].push_back(idx[a]);
    }
    return out;
}

// Invariant subspace belonging to the eigenvalues in `members`: the range of
// the product over all other eigenvalues of (M - mu).
inline Mat cluster_basis(const Mat& m, const std::vector<cplx>& ev, const std::vector<int>& members,
                         double scale) {
    const Eigen::Index n = m.rows();
    const int k = static_cast<int>(members.size());
    if (k == n) return identity(n);
    std::vector<bool> in(ev.size(), false);
    for (int i : members) in[i] = true;
    if (k == 1) {
        Mat a = m - ev[members[0]] * identity(n);
        Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
        return svd.matrixV().rightCols(1);
    }
    Mat prod = identity(n);
    for (size_t j = 0; j < ev.size(); ++j) {
        if (in[j]) continue;
        prod = ((m - ev[j] * identity(n)) * prod) / scale;
        double nrm = prod.norm();
        if (nrm > 0.0) prod /= nrm;
    }
    Eigen::JacobiSVD<Mat> svd(prod, Eigen::ComputeFullU);
    return svd.matrixU().leftCols(k);
}

// A cluster is accepted when the compression of M - c onto its subspace is
// nilpotent relative to its own size.
inline bool cluster_is_single(const Mat& m, const Mat& q, cplx c, double scale) {
    const Eigen::Index k = q.cols();
    Mat a = q.adjoint() * m * q - c * identity(k);
    double na = a.norm();
    if (na <= 1e-13 * scale) return true;
    Mat pw = identity(k);
    for (Eigen::Index j = 0; j < k; ++j) pw = pw * (a / na);
    return pw.norm() < 1e-10;
}

}  // namespace detail

// Groups eigenvalues of M into numerically single eigenvalues and returns a
// basis of each generalized eigenspace. Clusters are formed by single linkage
// at a shrinking radius, never below cluster_tol * (1 + |M|_F), and accepted
// once the restricted operator minus the cluster mean is nilpotent.
inline std::vector<EigenCluster> eig_clusters(const Mat& m, double cluster_tol = 1e-8) {
    require_square(m, "eig_clusters");
    if (!(cluster_tol > 0.0)) throw Error("eig_clusters: cluster_tol must be positive");
    if (!all_finite(m)) throw NumericalError("eig_clusters: non-finite entries");
    const Eigen::Index n = m.rows();
    std::vector<EigenCluster> out;
    if (n == 0) return out;
    const double scale = 1.0 + m.norm();

    Eigen::ComplexSchur<Mat> schur(m, false);
    if (schur.info() != Eigen::Success) throw NumericalError("eig_clusters: Schur iteration did not converge");
    std::vector<cplx> ev(n);
    for (Eigen::Index i = 0; i < n; ++i) ev[i] = schur.matrixT()(i, i);

    const double r_min = cluster_tol * scale;
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);

    struct Work {
        std::vector<int> idx;
        double radius;
    };
    std::vector<Work> stack{{all, 0.05 * scale}};
    while (!stack.empty()) {
        Work w = std::move(stack.back());
        stack.pop_back();
        for (auto& g : detail::link_groups(ev, w.idx, w.radius)) {
            cplx c = 0.0;
            for (int i : g) c += ev[i];
            c /= static_cast<double>(g.size());
            Mat q = detail::cluster_basis(m, ev, g, scale);
            bool ok = g.size() == 1 || w.radius <= r_min || detail::cluster_is_single(m, q, c, scale);
            if (ok) {
                out.push_back({c, static_cast<int>(g.size()), q});
            } else {
                stack.push_back({g, std::max(w.radius / 4.0, r_min)});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const EigenCluster& a, const EigenCluster& b) {
        if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
        return a.value.imag() < b.value.imag();
    });
    return out;
}

// ------------------------------------------------------------- logarithms

// B with exp(2 pi B) = Uu for unipotent Uu. The terminating log series loses
// digits to cancellation once |Uu| is in the hundreds; the inverse scaling and
// squaring log does not.
inline Mat nilpotent_log(const Mat& uu) {
    require_square(uu, "nilpotent_log");
    const Eigen::Index n = uu.rows();
    if (n == 0) return uu;
    Mat x = uu - identity(n);
    double nx = x.norm();
    if (nx == 0.0) return Mat::Zero(n, n);
    Mat xs = x / std::max(1.0, nx);
    Mat pw = identity(n);
    for (Eigen::Index j = 0; j < n; ++j) pw = pw * xs;
    if (pw.norm() > 1e-8) throw MembershipError("nilpotent_log: input is not unipotent");
    Mat b = uu.log();
    if (!all_finite(b)) throw NumericalError("nilpotent_log: logarithm failed");
    return b / (2.0 * kPi);
}

// Skew-Hermitian X with exp(X) = K and eigen-arguments in (-pi, pi].
inline Mat principal_unitary_log(const Mat& k, double tol = 1e-9) {
    require_square(k, "principal_unitary_log");
    const Eigen::Index n = k.rows();
    if (n == 0) return k;
    if ((k.adjoint() * k - identity(n)).norm() > tol * std::sqrt(static_cast<double>(n)))
        throw MembershipError("principal_unitary_log: input is not unitary");
    Eigen::ComplexSchur<Mat> schur(k);
    if (schur.info() != Eigen::Success) throw NumericalError("principal_unitary_log: Schur failed");
    const Mat& q = schur.matrixU();
    Vec d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        cplx lam = schur.matrixT()(i, i);
        double a = std::arg(lam);
        if (std::abs(lam + 1.0) < 1e-9) a = kPi;  // branch at -1 is always +pi
        d(i) = kI * a;
    }
    Mat x = q * d.asDiagonal() * q.adjoint();
    return 0.5 * (x - x.adjoint());
}

// Hermitian eigen-decomposition helper shared by the square roots.
inline Eigen::SelfAdjointEigenSolver<Mat> positive_eigen(const Mat& p, const char* what) {
    require_square(p, what);
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(p));
    if (es.info() != Eigen::Success) throw NumericalError(std::string(what) + ": eigensolver failed");
    if (p.rows() > 0) {
        double lo = es.eigenvalues().minCoeff();
        double hi = es.eigenvalues().cwiseAbs().maxCoeff();
        if (!(lo > 1e-14 * hi)) throw ConditioningError(std::string(what) + ": matrix is not positive definite");
    }
    return es;
}

inline Mat herm_inv_sqrt(const Mat& p) {
    if (p.rows() == 0) return p;
    auto es = positive_eigen(p, "herm_inv_sqrt");
    return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal() *
           es.eigenvectors().adjoint();
}

inline Mat herm_sqrt(const Mat& p) {
    if (p.rows() == 0) return p;
    auto es = positive_eigen(p, "herm_sqrt");
    return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cast<cplx>().asDiagonal() *
           es.eigenvectors().adjoint();
}

}  // namespace toledo
