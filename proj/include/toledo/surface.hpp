#pragma once

// Surface group representations: validation, Toledo invariant from lifted
// rotation numbers of the boundary, flat bundle signature per family,
// Milnor-Wood checks, the improved Sp(2,R) bound and the Horn quantities.

#include <optional>
#include <string>
#include <vector>

#include "rotation.hpp"

namespace toledo {

struct SurfacePresentation {
    int genus = 0;
    int boundary = 0;
    int chi() const { return 2 - 2 * genus - boundary; }
};

// Generators a_1..a_g, b_1..b_g, c_1..c_n with prod [a_i, b_i] prod c_j = e,
// [a, b] = a b a^{-1} b^{-1}. Images are family-native matrices.
struct SurfaceRepresentation {
    SurfacePresentation pres;
    Family family = Family::U;
    int p = 0;
    int q = 0;
    std::vector<Mat> a, b, c;

    int dim() const { return family == Family::Sp || family == Family::SOstar ? 2 * p : p + q; }
};

inline Mat relator_prefix(const SurfaceRepresentation& rep, int boundary_count) {
    Mat r = native_identity(rep.family, rep.p, rep.q);
    for (int i = 0; i < rep.pres.genus; ++i)
        r = r * rep.a[i] * rep.b[i] * rep.a[i].inverse() * rep.b[i].inverse();
    for (int j = 0; j < boundary_count; ++j) r = r * rep.c[j];
    return r;
}

// Fills in c_n from the relation when only n - 1 boundary images are given.
inline void solve_last_boundary(SurfaceRepresentation& rep) {
    const int n = rep.pres.boundary;
    if (n == 0 || static_cast<int>(rep.c.size()) == n) return;
    if (static_cast<int>(rep.c.size()) != n - 1) throw DimensionError("representation: wrong number of boundary images");
    rep.c.push_back(relator_prefix(rep, n - 1).inverse());
}

inline double validate(const SurfaceRepresentation& rep, const Tolerances& tol = {}) {
    const auto& pr = rep.pres;
    if (pr.genus < 0 || pr.boundary < 0) throw DimensionError("representation: negative genus or boundary count");
    if (static_cast<int>(rep.a.size()) != pr.genus || static_cast<int>(rep.b.size()) != pr.genus ||
        static_cast<int>(rep.c.size()) != pr.boundary)
        throw DimensionError("representation: generator count does not match the presentation");
    auto check = [&](const Mat& m) {
        make_element(rep.family, m, rep.p, rep.q, tol.membership);  // throws on family mismatch
    };
    for (const auto& m : rep.a) check(m);
    for (const auto& m : rep.b) check(m);
    for (const auto& m : rep.c) check(m);
    return (relator_prefix(rep, pr.boundary) - native_identity(rep.family, rep.p, rep.q)).norm();
}

inline void require_relation(const SurfaceRepresentation& rep, const Tolerances& tol = {}) {
    double r = validate(rep, tol);
    if (!(r < tol.relation)) {
        std::ostringstream os;
        os << "relation residual " << r << " exceeds " << tol.relation;
        throw RelationError(os.str());
    }
}

// ------------------------------------------------------------------ Toledo

struct ToledoReport {
    double toledo = 0.0;    // in the family's own normalization
    double toledo_u = 0.0;  // -1/2 sum of lifted boundary rotation numbers in U(p,q)
    std::vector<double> boundary_lifts;
};

namespace detail {

struct Letter {
    const GroupPath* path;
    bool inverse;
};

inline GroupPath word_path(const std::vector<Letter>& word, int p, int q) {
    GroupPath out;
    out.p = p;
    out.q = q;
    bool first = true;
    for (const auto& l : word) {
        GroupPath piece = l.inverse ? pointwise_inverse(*l.path) : *l.path;
        out = first ? piece : concat(out, piece);
        first = false;
    }
    return out;
}

inline Mat u_picture(const SurfaceRepresentation& rep, const Mat& native) {
    return element_from_native(rep.family, native, rep.p, rep.q).u;
}

}  // namespace detail

inline ToledoReport toledo(const SurfaceRepresentation& rep, const Tolerances& tol = {}) {
    if (rep.family == Family::SO0) throw Error("toledo: no U(p,q) normalization for SO_0(n,2)");
    require_relation(rep, tol);
    const int g = rep.pres.genus, n = rep.pres.boundary;
    const int p = rep.p, q = rep.family == Family::Sp || rep.family == Family::SOstar ? rep.p : rep.q;

    auto path_of = [&](const Mat& native) { return standard_path(detail::u_picture(rep, native), p, q, tol); };
    std::vector<GroupPath> pa, pb, pc;
    for (int i = 0; i < g; ++i) {
        pa.push_back(path_of(rep.a[i]));
        pb.push_back(path_of(rep.b[i]));
    }
    const int free_c = n > 0 ? n - 1 : 0;
    for (int j = 0; j < free_c; ++j) pc.push_back(path_of(rep.c[j]));

    std::vector<detail::Letter> word;
    for (int i = 0; i < g; ++i) {
        word.push_back({&pa[i], false});
        word.push_back({&pb[i], false});
        word.push_back({&pa[i], true});
        word.push_back({&pb[i], true});
    }
    for (int j = 0; j < free_c; ++j) word.push_back({&pc[j], false});

    ToledoReport r;
    for (int j = 0; j < free_c; ++j) r.boundary_lifts.push_back(rot_lift(pc[j], tol));
    // The last boundary lift is forced by the relation: (lift of the prefix word)^{-1}.
    // For closed surfaces the relator itself plays the role of the boundary.
    double prefix = word.empty() ? 0.0 : rot_lift(detail::word_path(word, p, q), tol);
    r.boundary_lifts.push_back(n > 0 ? -prefix : prefix);
    double sum = 0.0;
    for (double v : r.boundary_lifts) sum += v;
    r.toledo_u = -0.5 * sum + 0.0;  // no negative zero in reports
    r.toledo = rep.family == Family::SOstar ? 0.5 * r.toledo_u : r.toledo_u;
    return r;
}

// Same quantity from lifts multiplied in the cover directly, with each
// generator lift shifted by 2 * shifts[k] (deck transformations). Used to
// check that T does not depend on the choice of lifts or paths.
inline double toledo_from_lifts(const SurfaceRepresentation& rep, const std::vector<int>& shifts, const Tolerances& tol = {}) {
    if (rep.family == Family::SO0) throw Error("toledo: no U(p,q) normalization for SO_0(n,2)");
    require_relation(rep, tol);
    const int g = rep.pres.genus, n = rep.pres.boundary;
    const int p = rep.p, q = rep.family == Family::Sp || rep.family == Family::SOstar ? rep.p : rep.q;
    size_t next = 0;
    auto lift_of = [&](const Mat& native) {
        Lift l = principal_lift(detail::u_picture(rep, native), p, q);
        if (next < shifts.size()) l.phase += 2.0 * shifts[next];
        ++next;
        return l;
    };
    Lift word{identity(p + q), 0.0};
    for (int i = 0; i < g; ++i) {
        Lift a = lift_of(rep.a[i]), b = lift_of(rep.b[i]);
        word = lift_mul(word, a, p, q);
        word = lift_mul(word, b, p, q);
        word = lift_mul(word, lift_inverse(a, p, q), p, q);
        word = lift_mul(word, lift_inverse(b, p, q), p, q);
    }
    double sum = 0.0;
    const int free_c = n > 0 ? n - 1 : 0;
    for (int j = 0; j < free_c; ++j) {
        Lift c = lift_of(rep.c[j]);
        sum += rot_lift(c, p, q, tol);
        word = lift_mul(word, c, p, q);
    }
    double prefix = rot_lift(word, p, q, tol);
    sum += n > 0 ? -prefix : prefix;
    double t = -0.5 * sum;
    return rep.family == Family::SOstar ? 0.5 * t : t;
}

// ---------------------------------------------------------------- signature

struct SignatureReport {
    ToledoReport toledo;
    std::vector<double> boundary_rho;  // in the family's own picture
    double rho_sum = 0.0;
    double value = 0.0;
    int signature = 0;
};

inline SignatureReport signature(const SurfaceRepresentation& rep, const Tolerances& tol = {}) {
    SignatureReport s;
    if (rep.family == Family::SO0) {
        require_relation(rep, tol);
        return s;
    }
    s.toledo = toledo(rep, tol);
    for (const auto& m : rep.c) {
        double r = rho(element_from_native(rep.family, m, rep.p, rep.q), tol);
        s.boundary_rho.push_back(r);
        s.rho_sum += r;
    }
    const double t = s.toledo.toledo;
    switch (rep.family) {
        case Family::U:
        case Family::SU: s.value = -2.0 * t + s.rho_sum; break;
        case Family::SOstar: s.value = -4.0 * t + s.rho_sum; break;
        case Family::Sp: s.value = 2.0 * t + s.rho_sum; break;
        case Family::SO0: break;
    }
    s.signature = round_gated(s.value, tol.gate, "signature");
    return s;
}

// ------------------------------------------------------------- inequalities

inline int toledo_rank(Family f, int p, int q) {
    switch (f) {
        case Family::U:
        case Family::SU: return std::min(p, q);
        case Family::Sp:
        case Family::SOstar: return p;
        case Family::SO0: return std::min(p, 2);
    }
    return 0;
}

struct MilnorWoodReport {
    bool signature_bound_ok = true;
    bool toledo_bound_ok = true;
    double signature_bound = 0.0;
    double toledo_bound = 0.0;
    double signature_slack = 0.0;
    double toledo_slack = 0.0;
};

inline MilnorWoodReport milnor_wood_report(const SurfaceRepresentation& rep, const SignatureReport& s) {
    MilnorWoodReport m;
    const double chi = std::abs(rep.pres.chi());
    m.signature_bound = rep.dim() * chi;
    m.toledo_bound = toledo_rank(rep.family, rep.p, rep.q) * chi;
    m.signature_slack = m.signature_bound - std::abs(s.signature);
    m.toledo_slack = m.toledo_bound - std::abs(s.toledo.toledo);
    m.signature_bound_ok = m.signature_slack >= 0.0;
    m.toledo_bound_ok = m.toledo_slack >= -1e-7;
    return m;
}

inline MilnorWoodReport milnor_wood_report(const SurfaceRepresentation& rep, const Tolerances& tol = {}) {
    return milnor_wood_report(rep, signature(rep, tol));
}

struct Sp2BoundReport {
    double bound = 0.0;
    double toledo = 0.0;
    double frac_sum = 0.0;
    int elliptic_count = 0;
    bool holds = true;
};

inline double frac_part(double x) { return x - std::floor(x); }

inline Sp2BoundReport sp2_improved_bound(const SurfaceRepresentation& rep, const Tolerances& tol = {}) {
    if (rep.family != Family::Sp || rep.p != 1) throw Error("sp2_improved_bound: needs Sp(2,R)");
    Sp2BoundReport r;
    r.toledo = toledo(rep, tol).toledo;
    for (const auto& c : rep.c) {
        double tr = c.trace().real();
        if (std::abs(tr) < 2.0 - 1e-12) {
            ++r.elliptic_count;
            r.frac_sum += frac_part(rho(embed_sp(c), tol) / 2.0);
        }
    }
    r.bound = std::abs(rep.pres.chi()) + 1.0 - r.frac_sum;
    r.holds = r.toledo <= r.bound + 1e-8;
    return r;
}

// ---------------------------------------------------------------------- Horn

struct HornStats {
    int m = 0;
    int nu = 0;
    double m_hat = 0.0;
};

inline HornStats horn_stats(const Mat& a, const Tolerances& tol = {}) {
    require_square(a, "horn_stats");
    const Eigen::Index p = a.rows();
    if ((a.adjoint() * a - identity(p)).norm() > 1e-9 * std::sqrt(static_cast<double>(p)))
        throw MembershipError("horn_stats: matrix is not unitary");
    if (std::abs(a.determinant() - 1.0) > 1e-9) throw MembershipError("horn_stats: determinant is not one");
    Eigen::ComplexEigenSolver<Mat> es(a, false);
    HornStats h;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
        cplx lam = es.eigenvalues()(i);
        if (std::abs(lam - 1.0) <= tol.one) {
            ++h.nu;
            continue;
        }
        double th = std::arg(lam);
        if (th < 0.0) th += 2.0 * kPi;
        sum += th;
    }
    h.m = static_cast<int>(std::lround(sum / (2.0 * kPi)));
    h.m_hat = h.m + 0.5 * h.nu;
    return h;
}

struct HornReport {
    double m_hat_defect = 0.0;  // m^(A) + m^(B) - m^(AB), in [0, p]
    double rho_sum = 0.0;       // rho(A) + rho(B) + rho((AB)^{-1}), |.| <= p
    bool first_ok = true;
    bool second_ok = true;
    bool ok() const { return first_ok && second_ok; }
};

inline HornReport horn_check(const Mat& a, const Mat& b, const Tolerances& tol = {}) {
    const int p = static_cast<int>(a.rows());
    HermitianSpace space = HermitianSpace::standard(p, 0);
    Mat ab = a * b;
    HornReport r;
    r.m_hat_defect = horn_stats(a, tol).m_hat + horn_stats(b, tol).m_hat - horn_stats(ab, tol).m_hat;
    r.first_ok = r.m_hat_defect >= 0.0 && r.m_hat_defect <= p;
    r.rho_sum = rho(space, a, tol).total + rho(space, b, tol).total + rho(space, Mat(ab.adjoint()), tol).total;
    r.second_ok = std::abs(r.rho_sum) <= p + 1e-8;
    return r;
}

// ------------------------------------------------------------------ sampling

enum class BoundaryHint { Any, Elliptic, Hyperbolic, Parabolic };

namespace detail {

inline Mat sp_rotation(const Eigen::VectorXd& th) {
    const Eigen::Index n = th.size();
    Mat r = Mat::Zero(2 * n, 2 * n);
    for (Eigen::Index k = 0; k < n; ++k) {
        r(k, k) = std::cos(th(k));
        r(k, n + k) = -std::sin(th(k));
        r(n + k, k) = std::sin(th(k));
        r(n + k, n + k) = std::cos(th(k));
    }
    return r;
}

inline Mat hinted_boundary(Rng& rng, Family f, int p, int q, BoundaryHint hint) {
    std::uniform_real_distribution<double> ang(0.05, 2.0 * kPi - 0.05);
    std::uniform_real_distribution<double> logl(0.2, 1.5);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (hint == BoundaryHint::Any) return random_native(rng, f, p, q);
    if (f == Family::Sp) {
        Mat c = random_sp(rng, p, 1.0);
        Mat core = Mat::Zero(2 * p, 2 * p);
        if (hint == BoundaryHint::Elliptic) {
            Eigen::VectorXd th(p);
            for (int k = 0; k < p; ++k) {
                do th(k) = ang(rng);
                while (std::abs(th(k) - kPi) < 0.05);
            }
            core = sp_rotation(th);
        } else if (hint == BoundaryHint::Hyperbolic) {
            for (int k = 0; k < p; ++k) {
                double l = std::exp(logl(rng)) * (coin(rng) < 0.5 ? -1.0 : 1.0);
                core(k, k) = l;
                core(p + k, p + k) = 1.0 / l;
            }
        } else {
            // Exact upper-triangular normal form, not conjugated.
            double s = coin(rng) < 0.5 ? -1.0 : 1.0;
            core = s * identity(2 * p);
            for (int k = 0; k < p; ++k) core(k, p + k) = s * (coin(rng) < 0.5 ? -1.0 : 1.0) * (0.5 + coin(rng));
            return core;
        }
        return c * core * c.inverse();
    }
    if (f == Family::U || f == Family::SU) {
        Mat c = random_u(rng, ipq(p, q), 1.0);
        if (hint == BoundaryHint::Elliptic) {
            Vec d(p + q);
            for (int k = 0; k < p + q; ++k) d(k) = std::exp(kI * ang(rng));
            if (f == Family::SU) d(p + q - 1) /= d.prod();
            return c * d.asDiagonal() * c.inverse();
        }
        if (hint == BoundaryHint::Hyperbolic && p == q && f == Family::U) {
            Mat x = Mat::Zero(2 * p, 2 * p);
            Eigen::VectorXd s(p);
            for (int k = 0; k < p; ++k) x(k, p + k) = x(p + k, k) = logl(rng);
            return c * expm(x) * c.inverse();
        }
    }
    throw Error("random_representation: boundary hint cannot be realized in this family");
}

}  // namespace detail

inline SurfaceRepresentation random_representation(Family f, int p, int q, SurfacePresentation pres,
                                                   const std::vector<BoundaryHint>& hints, std::uint64_t seed) {
    Rng rng(seed);
    SurfaceRepresentation rep;
    rep.pres = pres;
    rep.family = f;
    rep.p = p;
    rep.q = (f == Family::Sp || f == Family::SOstar) ? p : q;
    if (f == Family::SO0) rep.q = 2;
    if (pres.boundary > 0 && static_cast<int>(hints.size()) > pres.boundary - 1)
        throw Error("random_representation: the relation-determined boundary cannot carry a hint");
    for (int i = 0; i < pres.genus; ++i) {
        rep.a.push_back(random_native(rng, f, p, rep.q));
        // A closed surface needs the commutators to cancel; commuting pairs do.
        rep.b.push_back(pres.boundary == 0 ? rep.a.back() : random_native(rng, f, p, rep.q));
    }
    for (int j = 0; j + 1 < pres.boundary; ++j) {
        BoundaryHint h = j < static_cast<int>(hints.size()) ? hints[j] : BoundaryHint::Any;
        rep.c.push_back(detail::hinted_boundary(rng, f, p, rep.q, h));
    }
    solve_last_boundary(rep);
    return rep;
}

}  // namespace toledo
