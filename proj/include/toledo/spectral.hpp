#pragma once

// Omega-orthogonal splitting of (E, Omega, L) into hyperbolic-unipotent,
// elliptic-unipotent and unipotent summands; Jordan-Chevalley factors and the
// elliptic logarithm.

#include <string>
#include <vector>

#include "groups.hpp"

namespace toledo {

struct Summand {
    Mat basis;    // orthonormal columns (standard inner product)
    Mat omega_r;  // basis^* Omega basis
    Mat l_r;      // L in the basis
    int dim() const { return static_cast<int>(basis.cols()); }
    bool empty() const { return basis.cols() == 0; }
};

enum class Bucket { Hyperbolic, Elliptic, One };

struct ClusterInfo {
    cplx value;
    int multiplicity = 0;
    Bucket bucket = Bucket::Hyperbolic;
    bool near_threshold = false;
};

struct SpectralSplit {
    Summand hu;
    Summand eu;
    Summand u;
    std::vector<ClusterInfo> clusters;
    std::vector<std::string> flags;
};

namespace detail {

inline Summand make_summand(const HermitianSpace& space, const Mat& l, const Mat& raw) {
    Summand s;
    s.basis = orthonormalize(raw);
    if (s.basis.cols() == 0) {
        s.basis = Mat(l.rows(), 0);
        s.omega_r = Mat(0, 0);
        s.l_r = Mat(0, 0);
        return s;
    }
    s.omega_r = hermitian_part(s.basis.adjoint() * space.omega * s.basis);
    s.l_r = s.basis.adjoint() * l * s.basis;
    return s;
}

// Ambiguous when the tested quantity sits within two decades of its threshold.
inline bool near(double value, double tol) { return value > tol * 1e-2 && value < tol * 1e2; }

inline std::string describe(cplx z) {
    std::ostringstream os;
    os.precision(12);
    os << "(" << z.real() << "," << z.imag() << ")";
    return os.str();
}

}  // namespace detail

inline Bucket classify(cplx lambda, const Tolerances& tol, bool* near_threshold = nullptr) {
    double dr = std::abs(std::abs(lambda) - 1.0);
    double d1 = std::abs(lambda - 1.0);
    bool on_circle = dr <= tol.circle;
    bool is_one = on_circle && d1 <= tol.one;
    if (near_threshold) *near_threshold = detail::near(dr, tol.circle) || (on_circle && detail::near(d1, tol.one));
    if (is_one) return Bucket::One;
    return on_circle ? Bucket::Elliptic : Bucket::Hyperbolic;
}

inline SpectralSplit split_heu(const HermitianSpace& space, const Mat& l, const Tolerances& tol = {}) {
    require_square(l, "split_heu");
    if (l.rows() != space.dim) throw DimensionError("split_heu: dimension mismatch");
    SpectralSplit out;
    const Eigen::Index n = l.rows();
    Mat raw[3] = {Mat(n, 0), Mat(n, 0), Mat(n, 0)};
    std::vector<std::string> where[3];
    for (const auto& c : eig_clusters(l, tol.cluster)) {
        ClusterInfo info{c.value, c.multiplicity};
        info.bucket = classify(c.value, tol, &info.near_threshold);
        int slot = static_cast<int>(info.bucket);
        raw[slot] = hcat(raw[slot], c.basis);
        where[slot].push_back(detail::describe(c.value));
        if (info.near_threshold)
            out.flags.push_back("near-threshold eigenvalue " + detail::describe(c.value));
        out.clusters.push_back(info);
    }
    out.hu = detail::make_summand(space, l, raw[0]);
    out.eu = detail::make_summand(space, l, raw[1]);
    out.u = detail::make_summand(space, l, raw[2]);

    const Summand* parts[3] = {&out.hu, &out.eu, &out.u};
    const char* names[3] = {"hu", "eu", "u"};
    double on = space.omega.norm();
    for (int a = 0; a < 3; ++a) {
        if (parts[a]->empty()) continue;
        Inertia in = inertia(parts[a]->omega_r);
        if (in.zero != 0) {
            std::string msg = std::string("split_heu: restricted form degenerate on ") + names[a] + " summand, clusters";
            for (const auto& w : where[a]) msg += " " + w;
            throw ConditioningError(msg);
        }
        for (int b = a + 1; b < 3; ++b) {
            if (parts[b]->empty()) continue;
            double cross = (parts[b]->basis.adjoint() * space.omega * parts[a]->basis).norm() / on;
            if (cross > 1e-8)
                out.flags.push_back(std::string("cross-orthogonality ") + names[a] + "/" + names[b] + " violated");
        }
    }
    return out;
}

// Generalized eigenbasis V (clusters side by side) and its inverse.
struct SpectralFrame {
    std::vector<EigenCluster> clusters;
    Mat v;
    Mat w;

    Mat projector(size_t k) const {
        Eigen::Index off = 0;
        for (size_t j = 0; j < k; ++j) off += clusters[j].multiplicity;
        Eigen::Index m = clusters[k].multiplicity;
        return v.middleCols(off, m) * w.middleRows(off, m);
    }
};

inline SpectralFrame spectral_frame(const Mat& m, const Tolerances& tol = {}) {
    SpectralFrame f;
    f.clusters = eig_clusters(m, tol.cluster);
    f.v = Mat(m.rows(), 0);
    for (const auto& c : f.clusters) f.v = hcat(f.v, c.basis);
    Eigen::FullPivLU<Mat> lu(f.v);
    if (!lu.isInvertible()) throw NumericalError("spectral frame: generalized eigenbases are dependent");
    f.w = lu.inverse();
    return f;
}

struct JordanChevalley {
    Mat s;
    Mat uu;
};

inline JordanChevalley jordan_chevalley(const Mat& l, const Tolerances& tol = {}) {
    require_square(l, "jordan_chevalley");
    const Eigen::Index n = l.rows();
    if (n == 0) return {l, l};
    Eigen::FullPivLU<Mat> llu(l);
    if (!llu.isInvertible()) throw DimensionError("jordan_chevalley: L is singular");
    SpectralFrame f = spectral_frame(l, tol);
    Mat s = Mat::Zero(n, n);
    for (size_t k = 0; k < f.clusters.size(); ++k) s += f.clusters[k].value * f.projector(k);
    Mat uu = s.partialPivLu().solve(l);
    return {s, uu};
}

// B with S = exp(2 pi i B) and spectrum in (0, 1), for S elliptic semisimple.
inline Mat elliptic_log(const Mat& s, const Tolerances& tol = {}) {
    require_square(s, "elliptic_log");
    const Eigen::Index n = s.rows();
    if (n == 0) return s;
    SpectralFrame f = spectral_frame(s, tol);
    Mat b = Mat::Zero(n, n);
    for (size_t k = 0; k < f.clusters.size(); ++k) {
        cplx lam = f.clusters[k].value;
        Bucket bk = classify(lam, tol);
        if (bk == Bucket::One) throw MembershipError("elliptic_log: eigenvalue at 1");
        if (bk == Bucket::Hyperbolic) throw MembershipError("elliptic_log: eigenvalue off the unit circle");
        double th = std::arg(lam);
        if (th <= 0.0) th += 2.0 * kPi;
        b += (th / (2.0 * kPi)) * f.projector(k);
    }
    return b;
}

// Sum over eigenvalues c of B of c * (p_c - q_c), where (p_c, q_c) is the
// inertia of Omega on the c-eigenspace.
inline double trace_omega(const HermitianSpace& space, const Mat& b, const Tolerances& tol = {}) {
    require_square(b, "trace_omega");
    if (b.rows() != space.dim) throw DimensionError("trace_omega: dimension mismatch");
    double t = 0.0;
    for (const auto& c : eig_clusters(b, tol.cluster)) {
        Inertia in = inertia(c.basis.adjoint() * space.omega * c.basis);
        if (in.zero != 0) throw ConditioningError("trace_omega: degenerate restricted form");
        t += c.value.real() * in.signature();
    }
    return t;
}

}  // namespace toledo
