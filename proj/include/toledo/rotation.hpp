#pragma once

// Rotation numbers, their continuous lift along paths from the identity, the
// defect of the lift, the integer signature cocycle and the central extension
// modelled as pairs (L, rot2).

#include <functional>
#include <utility>
#include <vector>

#include "rho.hpp"

namespace toledo {

// (1/pi) * sum over unit-circle eigenvalues e^{i theta}, theta in [0, 2pi), of
// theta * (p - q) on the generalized eigenspace, reduced mod 1.
inline double rot_frac(const HermitianSpace& space, const Mat& l, const Tolerances& tol = {}) {
    require_square(l, "rot_frac");
    if (l.rows() != space.dim) throw DimensionError("rot_frac: dimension mismatch");
    double s = 0.0;
    for (const auto& c : eig_clusters(l, tol.cluster)) {
        Bucket b = classify(c.value, tol);
        if (b == Bucket::Hyperbolic || b == Bucket::One) continue;
        Inertia in = inertia(c.basis.adjoint() * space.omega * c.basis);
        if (in.zero != 0) throw ConditioningError("rot_frac: degenerate restricted form");
        double th = std::arg(c.value);
        if (th < 0.0) th += 2.0 * kPi;
        s += th * in.signature();
    }
    s /= kPi;
    s -= std::floor(s);
    if (s >= 1.0) s -= 1.0;
    return s;
}

// Signed distance b - a on the circle R/Z, in [-1/2, 1/2).
inline double circle_step(double a, double b) {
    double d = b - a;
    d -= std::floor(d + 0.5);
    return d;
}

inline double circle_distance(double a, double b) { return std::abs(circle_step(a, b)); }

// The lift is carried by the polar phase phi(L) = (arg det A - arg det D) / pi
// of the diagonal blocks L = [[A, B], [C, D]]. Singular values of A and D are
// at least one, so phi is Lipschitz along paths and its lift can be tracked
// safely. Rot~ - phi~ is a function on the group itself (see rot_correction).

namespace detail {

inline Mat upq_inverse(const Mat& m, int p, int q) {
    Mat j = ipq(p, q);
    return j * m.adjoint() * j;
}

// Sum of principal arguments of the eigenvalues.
inline double arg_sum(const Mat& m) {
    if (m.rows() == 0) return 0.0;
    Eigen::ComplexEigenSolver<Mat> es(m, false);
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) s += std::arg(es.eigenvalues()(i));
    return s;
}

// Phase change from l0 to l1, or NaN when the step is too large to resolve.
inline double phase_step(const Mat& l0, const Mat& l1, int p, int q) {
    Mat xa = l0.topLeftCorner(p, p).partialPivLu().solve(l1.topLeftCorner(p, p));
    Mat xd = l0.bottomRightCorner(q, q).partialPivLu().solve(l1.bottomRightCorner(q, q));
    if ((xa - identity(p)).norm() > 0.5 || (xd - identity(q)).norm() > 0.5) return std::nan("");
    return (arg_sum(xa) - arg_sum(xd)) / kPi;
}

}  // namespace detail

// Principal value of phi, in (-2, 2).
inline double polar_phase(const Mat& l, int p, int q) {
    double a = p > 0 ? std::arg(l.topLeftCorner(p, p).determinant()) : 0.0;
    double d = q > 0 ? std::arg(l.bottomRightCorner(q, q).determinant()) : 0.0;
    return (a - d) / kPi;
}

// phi~(g~ h~) - phi~(g~) - phi~(h~), a continuous function of (g, h).
// The block products factor as A_g (1 + A_g^{-1} B_g C_h A_h^{-1}) A_h and
// D_g (1 + D_g^{-1} C_g B_h D_h^{-1}) D_h with middle terms of norm < 1.
inline double polar_cocycle(const Mat& g, const Mat& h, int p, int q) {
    if (p == 0 || q == 0) return 0.0;
    Mat ag = g.topLeftCorner(p, p), bg = g.topRightCorner(p, q), cg = g.bottomLeftCorner(q, p), dg = g.bottomRightCorner(q, q);
    Mat ah = h.topLeftCorner(p, p), bh = h.topRightCorner(p, q), ch = h.bottomLeftCorner(q, p), dh = h.bottomRightCorner(q, q);
    Mat xa = identity(p) + ag.partialPivLu().solve(bg) * (ch * ah.inverse());
    Mat xd = identity(q) + dg.partialPivLu().solve(cg) * (bh * dh.inverse());
    return (detail::arg_sum(xa) - detail::arg_sum(xd)) / kPi;
}

using Curve = std::function<Mat(double)>;

struct PathSample {
    double t;
    double phase;  // lifted polar phase, relative to the segment start
};

// A path from the identity, stored as consecutive segments on [0, 1]. Each
// segment starts where the previous one ends.
struct GroupPath {
    int p = 0;
    int q = 0;
    std::vector<Curve> segments;
    std::vector<std::vector<PathSample>> samples;  // filled by sample_path

    Mat endpoint() const { return segments.empty() ? identity(p + q) : segments.back()(1.0); }
    Mat at(size_t seg, double t) const { return segments[seg](t); }
};

namespace detail {

// Adaptive bisection until every step of the polar phase is resolved.
inline std::vector<PathSample> sample_segment(const Curve& f, int p, int q, const Tolerances& tol) {
    struct Node {
        double t;
        Mat m;
    };
    const int n0 = 8;
    std::vector<Node> out{{0.0, f(0.0)}};
    std::vector<std::pair<Node, int>> pending;
    for (int i = n0; i >= 1; --i) {
        double t = static_cast<double>(i) / n0;
        pending.push_back({{t, f(t)}, 0});
    }
    std::vector<PathSample> res{{0.0, 0.0}};
    double acc = 0.0;
    while (!pending.empty()) {
        auto& [right, depth] = pending.back();
        const Node& left = out.back();
        double d = phase_step(left.m, right.m, p, q);
        if (std::isfinite(d) && std::abs(d) < tol.unwrap) {
            acc += d;
            res.push_back({right.t, acc});
            out.push_back(right);
            pending.pop_back();
            continue;
        }
        if (depth >= tol.max_depth) throw NumericalError("rot_lift: path refinement exceeded the depth limit");
        int nd = ++depth;
        double tm = 0.5 * (left.t + right.t);
        pending.push_back({{tm, f(tm)}, nd});
    }
    return res;
}

inline double track_phase(const Curve& f, int p, int q, const Tolerances& tol) {
    return sample_segment(f, p, q, tol).back().phase;
}

}  // namespace detail

inline void sample_path(GroupPath& path, const Tolerances& tol = {}) {
    path.samples.resize(path.segments.size());
    for (size_t s = 0; s < path.segments.size(); ++s)
        if (path.samples[s].size() < 2) path.samples[s] = detail::sample_segment(path.segments[s], path.p, path.q, tol);
}

// Lifted polar phase at the end of the path, starting from 0 at the identity.
inline double path_phase(const GroupPath& path, const Tolerances& tol = {}) {
    double v = 0.0;
    for (size_t s = 0; s < path.segments.size(); ++s)
        v += s < path.samples.size() && path.samples[s].size() >= 2
                 ? path.samples[s].back().phase
                 : detail::track_phase(path.segments[s], path.p, path.q, tol);
    return v;
}

// ------------------------------------------------------------ path algebra

// Precomputed data for t -> diag(e^{2 pi i t x} exp(t X1), e^{2 pi i t y} exp(t X2)) S(tW).
struct NeretinCurve {
    int p = 0, q = 0;
    double x = 0.0, y = 0.0;
    Mat v1, v2;   // eigenvectors of X1, X2
    Eigen::VectorXd a1, a2;  // X_k = V_k diag(i a_k) V_k^*
    Mat pu, qv;   // W = pu diag(s) qv^*
    Eigen::VectorXd s;

    Mat operator()(double t) const {
        Mat k1 = std::exp(2.0 * kPi * kI * t * x) * (v1 * (kI * t * a1.cast<cplx>()).array().exp().matrix().asDiagonal() * v1.adjoint());
        Mat k2 = std::exp(2.0 * kPi * kI * t * y) * (v2 * (kI * t * a2.cast<cplx>()).array().exp().matrix().asDiagonal() * v2.adjoint());
        Mat k = block_diag(k1, k2);
        if (p == 0 || q == 0) return k;
        const Eigen::Index r = s.size();
        Eigen::VectorXd cp = Eigen::VectorXd::Ones(p), cq = Eigen::VectorXd::Ones(q);
        Eigen::VectorXd ts = t * s;
        for (Eigen::Index i = 0; i < r; ++i) cp(i) = cq(i) = 1.0 / std::sqrt(1.0 - ts(i) * ts(i));
        Mat a = pu * cp.cast<cplx>().asDiagonal() * pu.adjoint();
        Mat d = qv * cq.cast<cplx>().asDiagonal() * qv.adjoint();
        Mat wt = Mat::Zero(p, q);
        for (Eigen::Index i = 0; i < r; ++i) wt(i, i) = ts(i);
        wt = pu * wt * qv.adjoint();
        Mat sm(p + q, p + q);
        sm.topLeftCorner(p, p) = a;
        sm.topRightCorner(p, q) = a * wt;
        sm.bottomLeftCorner(q, p) = wt.adjoint() * a;
        sm.bottomRightCorner(q, q) = d;
        return k * sm;
    }
};

namespace detail {
inline void skew_eigen(const Mat& x, Mat& v, Eigen::VectorXd& a) {
    if (x.rows() == 0) {
        v = Mat(0, 0);
        a = Eigen::VectorXd(0);
        return;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(-kI * x));
    v = es.eigenvectors();
    a = es.eigenvalues();
}
}  // namespace detail

inline NeretinCurve neretin_curve(const Mat& l, int p, int q) {
    NeretinFactors f = neretin_decompose(l, p, q);
    NeretinCurve c;
    c.p = p;
    c.q = q;
    c.x = f.x;
    c.y = f.y;
    detail::skew_eigen(principal_unitary_log(f.u1, 1e-8), c.v1, c.a1);
    detail::skew_eigen(principal_unitary_log(f.u2, 1e-8), c.v2, c.a2);
    if (p > 0 && q > 0) {
        Eigen::JacobiSVD<Mat> svd(f.w, Eigen::ComputeFullU | Eigen::ComputeFullV);
        c.pu = svd.matrixU();
        c.qv = svd.matrixV();
        c.s = svd.singularValues();
    }
    return c;
}

inline GroupPath standard_path(const Mat& l, int p, int q, const Tolerances& tol = {}) {
    GroupPath path;
    path.p = p;
    path.q = q;
    if ((l - identity(p + q)).norm() == 0.0) {
        path.segments.push_back([n = p + q](double) { return identity(n); });
        path.samples.push_back({{0.0, 0.0}, {1.0, 0.0}});
        return path;
    }
    path.segments.push_back(neretin_curve(l, p, q));
    sample_path(path, tol);
    if ((path.endpoint() - l).norm() > 1e-9 * std::max(1.0, l.squaredNorm()))
        throw NumericalError("standard_path: endpoint residual too large");
    return path;
}

inline GroupPath standard_path(const GroupElement& g, const Tolerances& tol = {}) { return standard_path(g.u, g.p, g.q, tol); }

// Path of a followed by a(1) * b.
inline GroupPath concat(const GroupPath& a, const GroupPath& b) {
    GroupPath out = a;
    Mat end = a.endpoint();
    for (size_t s = 0; s < b.segments.size(); ++s) {
        Curve f = b.segments[s];
        out.segments.push_back([end, f](double t) { return Mat(end * f(t)); });
        out.samples.push_back({});
    }
    return out;
}

// Pointwise inverse: a path from the identity to the inverse endpoint.
inline GroupPath pointwise_inverse(const GroupPath& a) {
    GroupPath out;
    out.p = a.p;
    out.q = a.q;
    const int p = a.p, q = a.q;
    for (const auto& f : a.segments) {
        out.segments.push_back([f, p, q](double t) { return detail::upq_inverse(f(t), p, q); });
        out.samples.push_back({});
    }
    return out;
}

// ------------------------------------------------------- lifting correction

namespace detail {

// Elliptic part of L: L_e = sum u_G P_G over groups G of eigenvalue clusters
// with the same direction u_G = lambda / |lambda|, and an Omega-orthonormal
// frame g adapted to the groups, positive vectors first.
struct EllipticFrame {
    Mat le;
    Mat g;
    Vec k;  // diagonal of g^{-1} L_e g
};

inline EllipticFrame elliptic_frame(const Mat& l, int p, int q, const Tolerances& tol) {
    SpectralFrame sf = spectral_frame(l, tol);
    const Eigen::Index n = l.rows();
    std::vector<cplx> dir;
    std::vector<std::vector<size_t>> groups;
    for (size_t k = 0; k < sf.clusters.size(); ++k) {
        cplx u = sf.clusters[k].value / std::abs(sf.clusters[k].value);
        size_t gi = 0;
        while (gi < dir.size() && std::abs(dir[gi] - u) > tol.circle) ++gi;
        if (gi == dir.size()) {
            dir.push_back(u);
            groups.push_back({});
        }
        groups[gi].push_back(k);
    }
    Mat omega = ipq(p, q);
    EllipticFrame ef;
    ef.le = Mat::Zero(n, n);
    Mat pos(n, 0), neg(n, 0);
    std::vector<cplx> kpos, kneg;
    for (size_t gi = 0; gi < groups.size(); ++gi) {
        Mat v(n, 0);
        for (size_t k : groups[gi]) {
            ef.le += dir[gi] * sf.projector(k);
            v = hcat(v, sf.clusters[k].basis);
        }
        v = orthonormalize(v);
        Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(v.adjoint() * omega * v));
        for (Eigen::Index i = 0; i < v.cols(); ++i) {
            double mu = es.eigenvalues()(i);
            if (std::abs(mu) < 1e-10) throw ConditioningError("rot_lift: degenerate form on an elliptic eigenspace");
            Vec col = v * es.eigenvectors().col(i) / std::sqrt(std::abs(mu));
            if (mu > 0.0) {
                pos = hcat(pos, col);
                kpos.push_back(dir[gi]);
            } else {
                neg = hcat(neg, col);
                kneg.push_back(dir[gi]);
            }
        }
    }
    if (pos.cols() != p || neg.cols() != q) throw NumericalError("rot_lift: elliptic frame has the wrong signature");
    ef.g = hcat(pos, neg);
    ef.k.resize(n);
    for (int i = 0; i < p; ++i) ef.k(i) = kpos[i];
    for (int i = 0; i < q; ++i) ef.k(p + i) = kneg[i];
    return ef;
}

}  // namespace detail

// delta(L) = Rot~(L~) - phi~(L~), independent of the lift. Rot is constant
// along L_e (L_e^{-1} L)^{1-t} and along the conjugation g_s k g_s^{-1} down
// to the maximal compact subgroup, where Rot~ and phi~ coincide; delta is the
// phase change along that route.
inline double rot_correction(const Mat& l, int p, int q, const Tolerances& tol = {}) {
    if (p == 0 || q == 0) return 0.0;
    detail::EllipticFrame ef = detail::elliptic_frame(l, p, q, tol);
    Mat rest = ef.le.partialPivLu().solve(l);  // hyperbolic times unipotent, positive spectrum
    Mat lr = rest.log();
    Mat le = ef.le;
    double d1 = detail::track_phase([&](double t) { return Mat(le * (lr * (1.0 - t)).exp()); }, p, q, tol);
    NeretinCurve gc = neretin_curve(ef.g, p, q);
    Mat kd = ef.k.asDiagonal();
    double d2 = detail::track_phase([&](double s) {
        Mat gs = gc(s);
        return Mat(gs * kd * detail::upq_inverse(gs, p, q));
    }, p, q, tol);
    double delta = d1 - d2;
    double frac = rot_frac(HermitianSpace::standard(p, q), l, tol);
    if (circle_distance(polar_phase(l, p, q) + delta, frac) > 1e-6)
        throw NumericalError("rot_lift: lifted phase disagrees with the rotation number");
    return delta;
}

// Terminal value of the continuous lift of Rot along the path, starting at 0.
inline double rot_lift(const GroupPath& path, const Tolerances& tol = {}) {
    return path_phase(path, tol) + rot_correction(path.endpoint(), path.p, path.q, tol);
}

// Elements of the cover quotient seen by Rot~: (L, phi~).
struct Lift {
    Mat l;
    double phase = 0.0;
};

inline Lift principal_lift(const Mat& l, int p, int q) { return {l, polar_phase(l, p, q)}; }

inline Lift path_lift(const GroupPath& path, const Tolerances& tol = {}) { return {path.endpoint(), path_phase(path, tol)}; }

inline Lift lift_mul(const Lift& a, const Lift& b, int p, int q) {
    return {a.l * b.l, a.phase + b.phase + polar_cocycle(a.l, b.l, p, q)};
}

inline Lift lift_inverse(const Lift& a, int p, int q) {
    Mat inv = detail::upq_inverse(a.l, p, q);
    return {inv, -a.phase - polar_cocycle(a.l, inv, p, q)};
}

inline double rot_lift(const Lift& a, int p, int q, const Tolerances& tol = {}) {
    return a.phase + rot_correction(a.l, p, q, tol);
}

// ------------------------------------------------------------ defect, cocycle

inline double defect(const Mat& a, const Mat& b, int p, int q, const Tolerances& tol = {}) {
    return polar_cocycle(a, b, p, q) + rot_correction(Mat(a * b), p, q, tol) - rot_correction(a, p, q, tol) -
           rot_correction(b, p, q, tol);
}

struct CocycleReport {
    int sign = 0;
    double value = 0.0;
    double defect = 0.0;
    double rho_a = 0.0;
    double rho_b = 0.0;
    double rho_ab = 0.0;
    double residual = 0.0;
};

inline int round_gated(double v, double gate, const char* what) {
    double r = std::round(v);
    if (!(std::abs(v - r) < gate)) {
        std::ostringstream os;
        os << what << ": value " << v << " is not within the rounding gate of an integer";
        throw RoundingError(os.str());
    }
    return static_cast<int>(r);
}

inline CocycleReport signature_cocycle(const Mat& a, const Mat& b, int p, int q, const Tolerances& tol = {}) {
    HermitianSpace space = HermitianSpace::standard(p, q);
    CocycleReport r;
    r.defect = defect(a, b, p, q, tol);
    r.rho_a = rho(space, a, tol).total;
    r.rho_b = rho(space, b, tol).total;
    r.rho_ab = rho(space, Mat(a * b), tol).total;
    r.value = r.defect + r.rho_ab - r.rho_a - r.rho_b;
    r.sign = round_gated(r.value, tol.gate, "signature_cocycle");
    r.residual = std::abs(r.value - r.sign);
    return r;
}

// ------------------------------------------------------- central extension

struct Ext2Element {
    Mat l;
    double rot2 = 0.0;
};

inline Ext2Element ext2_mul(const Ext2Element& a, const Ext2Element& b, int p, int q, const Tolerances& tol = {}) {
    return {a.l * b.l, a.rot2 + b.rot2 + defect(a.l, b.l, p, q, tol)};
}

inline Ext2Element atiyah_sigma(const Mat& l, int p, int q, const Tolerances& tol = {}) {
    return {l, -rho(HermitianSpace::standard(p, q), l, tol).total};
}

inline double b2(const Ext2Element& e, int p, int q, const Tolerances& tol = {}) {
    return e.rot2 + rho(HermitianSpace::standard(p, q), e.l, tol).total;
}

// Coherence of the pair model: frac(rot2) agrees with rot_frac(l).
inline double ext2_coherence(const Ext2Element& e, int p, int q, const Tolerances& tol = {}) {
    return circle_distance(e.rot2, rot_frac(HermitianSpace::standard(p, q), e.l, tol));
}

}  // namespace toledo
