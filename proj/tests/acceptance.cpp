// Acceptance run: one PASS/FAIL line per criterion. Tolerances, sample counts
// and time budgets are fixed here; the exit status is nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "toledo/toledo.hpp"

using namespace toledo;

#ifndef FIXTURE_DIR
#define FIXTURE_DIR "tests/fixtures"
#endif

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

struct Criterion {
    const char* id;
    const char* what;
    double budget_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double sgn0(double x) { return (x > 0.0) - (x < 0.0); }

// ------------------------------------------------------------ table oracles

// Transcribed separately from the library tables. Kinds: 0 hyperbolic,
// 1 elliptic (theta1), 2 parabolic (lambda = +-1, mu).
struct Row {
    int kind;
    double lambda;
    double theta1;
    double mu;
};

double table_u11(double th, const Row& r) {
    if (r.kind == 0) return 0.0;
    if (r.kind == 1) return sgn0(th - r.theta1) - 2.0 + 2.0 * r.theta1 / kPi - sgn0(th + r.theta1 - 2.0 * kPi);
    if (r.mu == 0.0) return 0.0;
    if (r.lambda == 1.0) return r.mu > 0 ? 1.0 - sgn0(th) : -1.0 + sgn0(th);
    return r.mu > 0 ? -1.0 + std::abs(sgn0(th - kPi)) : 1.0 - std::abs(sgn0(th - kPi));
}

double table_sp(const Row& r) {
    if (r.kind == 0) return 0.0;
    if (r.kind == 1) return 2.0 * (1.0 - r.theta1 / kPi);
    if (r.mu == 0.0 || r.lambda == -1.0) return 0.0;
    return r.mu > 0 ? -1.0 : 1.0;
}

Mat row_matrix(const Row& r) {
    Mat m(2, 2);
    if (r.kind == 0) m << r.lambda, 0.0, 0.0, 1.0 / r.lambda;
    else if (r.kind == 1) m << std::cos(r.theta1), -std::sin(r.theta1), std::sin(r.theta1), std::cos(r.theta1);
    else m << r.lambda, r.mu, 0.0, r.lambda;
    return m;
}

Outcome a1() {
    const double thetas[] = {0.0, kPi / 4, kPi, 3 * kPi / 2, 2 * kPi - 0.1};
    std::vector<Row> rows = {{0, 2.0, 0, 0}, {0, -2.0, 0, 0}};
    for (double t1 : {kPi / 6, kPi / 3, 2 * kPi / 3, 4 * kPi / 3}) rows.push_back({1, 0.0, t1, 0.0});
    for (double lam : {1.0, -1.0})
        for (double mu : {1.0, -1.0, 0.5, -0.5}) rows.push_back({2, lam, 0.0, mu});
    HermitianSpace s = HermitianSpace::standard(1, 1);
    double worst = 0.0;
    int n = 0;
    for (const auto& r : rows) {
        GroupElement sp = embed_sp(row_matrix(r));
        for (double th : thetas) {
            Mat l = std::exp(kI * th) * sp.u;
            worst = std::max(worst, std::abs(rho(s, l).total - table_u11(th, r)));
            ++n;
        }
        worst = std::max(worst, std::abs(rho(sp) - table_sp(r)));
        ++n;
    }
    return {worst <= 1e-9, std::to_string(n) + " table entries, max error " + fmt("%.2e", worst)};
}

// --------------------------------------------------------- rho structure

Outcome a2() {
    Rng rng(1001);
    std::uniform_int_distribution<int> pd(1, 3), qd(0, 3);
    double worst_sum = 0.0, worst_conj = 0.0, worst_inv = 0.0;
    bool hu_zero = true;
    const int n = 500;
    for (int i = 0; i < n; ++i) {
        int p = pd(rng), q = qd(rng);
        HermitianSpace s = HermitianSpace::standard(p, q);
        Mat l = random_u(rng, s.omega), g = random_u(rng, s.omega);
        RhoBreakdown r = rho(s, l);
        hu_zero = hu_zero && r.hu == 0.0;
        worst_sum = std::max(worst_sum, std::abs(r.total - (r.hu + r.eu + r.u)));
        worst_conj = std::max(worst_conj, std::abs(rho(s, Mat(g * l * g.inverse())).total - r.total));
        worst_inv = std::max(worst_inv, std::abs(rho(s, Mat(l.inverse())).total + r.total));
    }
    bool ok = hu_zero && worst_sum <= 1e-12 && worst_conj <= 1e-8 && worst_inv <= 1e-8;
    return {ok, std::to_string(n) + " elements, conj " + fmt("%.2e", worst_conj) + ", inverse " + fmt("%.2e", worst_inv) +
                    (hu_zero ? ", rho_hu = 0" : ", rho_hu nonzero")};
}

// ------------------------------------------------------- unipotent calculus

// sign(Omega * i(N + i theta)) computed directly. With require_invertible the
// smallest eigenvalue must clear the cutoff instead of being dropped.
int herm_signature(const Mat& omega, const Mat& n, double theta, bool require_invertible) {
    Mat h = omega * (kI * (n + kI * theta * identity(n.rows())));
    h = 0.5 * (h + h.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
    double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    int s = 0;
    for (Eigen::Index k = 0; k < h.rows(); ++k) {
        double e = es.eigenvalues()(k);
        if (std::abs(e) <= 1e-10 * scale) {
            if (require_invertible) throw NumericalError("oracle: H is numerically singular");
            continue;
        }
        s += e > 0 ? 1 : -1;
    }
    return s;
}

// For nilpotent N, H_{N + i theta} is invertible for every theta > 0, so its
// signature is the same at any positive theta; a large one is well conditioned.
int jump_oracle(const HermitianSpace& s, const Mat& n) {
    double th = 1.0 + n.norm();
    return -herm_signature(s.omega, n, 0.0, false) + herm_signature(s.omega, n, th, true) + s.signature();
}

Outcome a3() {
    Rng rng(1003);
    const int n = 300;
    int mismatches = 0, bound_violations = 0, max_dim = 0;
    for (int i = 0; i < n; ++i) {
        NilpotentModel m = random_nilpotent(rng, 8);
        max_dim = std::max(max_dim, static_cast<int>(m.n.rows()));
        int oracle = jump_oracle(m.space, m.n);
        int blocks = block_decompose(m.space, m.n).rho();
        double full = rho(m.space, expm(2.0 * kPi * m.n)).total;
        if (blocks != oracle || full != static_cast<double>(oracle)) ++mismatches;
        if (std::abs(oracle) > std::min(m.space.p, m.space.q)) ++bound_violations;
    }
    return {mismatches == 0 && bound_violations == 0 && max_dim <= 8,
            std::to_string(n) + " nilpotents (dim <= " + std::to_string(max_dim) + "), " + std::to_string(mismatches) +
                " mismatches, " + std::to_string(bound_violations) + " bound violations"};
}

// --------------------------------------------------------- block normal form

Outcome a4() {
    Rng rng(1004);
    const std::vector<std::vector<std::pair<int, int>>> shapes = {
        {{2, 1}}, {{2, 1}, {2, -1}}, {{3, 1}}, {{4, -1}}, {{2, -1}, {3, 1}}};
    int changed = 0, total = 0;
    double worst = 0.0;
    for (const auto& shape : shapes) {
        NilpotentModel m = standardize(nilpotent_model(shape));
        auto ref = block_multiset(block_decompose(m.space, m.n));
        std::multiset<int> dims;
        for (const auto& [d, s] : shape) dims.insert(d);
        std::multiset<int> got;
        for (const auto& [d, s] : ref) got.insert(d);
        if (got != dims) ++changed;
        for (int i = 0; i < 200; ++i) {
            Mat g = random_u(rng, m.space.omega);
            Mat n = g * m.n * g.inverse();
            JordanBlockDecomp d = block_decompose(m.space, n);
            worst = std::max(worst, reassembly_residual(n, d));
            if (block_multiset(d) != ref) ++changed;
            ++total;
        }
    }
    return {changed == 0 && worst < 1e-7, std::to_string(total) + " conjugates over 5 shapes, " + std::to_string(changed) +
                                              " changed multisets, worst residual " + fmt("%.2e", worst)};
}

// ---------------------------------------------------------- rotation, cocycle

Outcome a5() {
    Rng rng(1005);
    double worst = 0.0;
    int skipped = 0, integ = 0;
    for (auto [p, q] : {std::pair{1, 1}, std::pair{2, 1}}) {
        HermitianSpace s = HermitianSpace::standard(p, q);
        int done = 0;
        while (done < 500) {
            Mat l = random_u(rng, s.omega);
            Eigen::ComplexEigenSolver<Mat> es(l, false);
            if ((es.eigenvalues().array() - 1.0).abs().minCoeff() < 1e-6) {
                ++skipped;
                continue;
            }
            worst = std::max(worst, circle_distance(rot_frac(s, l) + rho(s, l).total, 0.0));
            ++done;
            ++integ;
        }
    }
    int pairs = 0, bad = 0;
    double worst_res = 0.0;
    for (auto [p, q] : {std::pair{1, 1}, std::pair{2, 1}}) {
        Mat omega = ipq(p, q);
        for (int i = 0; i < 200; ++i) {
            Mat a = random_u(rng, omega), b = random_u(rng, omega), c = random_u(rng, omega);
            auto ab = signature_cocycle(a, b, p, q), ba = signature_cocycle(b, a, p, q);
            auto ab_c = signature_cocycle(Mat(a * b), c, p, q), bc = signature_cocycle(b, c, p, q);
            auto a_bc = signature_cocycle(a, Mat(b * c), p, q);
            worst_res = std::max({worst_res, ab.residual, ba.residual, ab_c.residual, bc.residual, a_bc.residual});
            bool ok = ab.sign == ba.sign && ab.sign + ab_c.sign == bc.sign + a_bc.sign && std::abs(ab.sign) <= p + q;
            if (!ok) ++bad;
            ++pairs;
        }
    }
    bool ok = worst < 1e-8 && bad == 0 && worst_res < 1e-3;
    return {ok, std::to_string(integ) + " integrality samples (max " + fmt("%.2e", worst) + "), " + std::to_string(pairs) +
                    " triples, " + std::to_string(bad) + " cocycle failures, max rounding residual " + fmt("%.2e", worst_res)};
}

Outcome a6() {
    Rng rng(1006);
    int bad = 0, n = 0;
    for (auto [p, q] : {std::pair{1, 1}, std::pair{2, 1}}) {
        Mat omega = ipq(p, q);
        for (int i = 0; i < 200; ++i) {
            Mat a = random_u(rng, omega), b = random_u(rng, omega);
            int cs = signature_cocycle(a, b, p, q).sign;
            int ss = signature(sigma3_of_pair(Family::U, p, q, a, b)).signature;
            if (cs != ss) ++bad;
            ++n;
        }
    }
    return {bad == 0, std::to_string(n) + " pairs in U(1,1) and U(2,1), " + std::to_string(bad) + " disagreements"};
}

// ----------------------------------------------------------- Milnor-Wood

Outcome a7() {
    struct Fam {
        Family f;
        int p, q;
        int dim, rank;
    };
    const Fam fams[] = {{Family::U, 1, 1, 2, 1}, {Family::U, 2, 1, 3, 1}, {Family::Sp, 1, 1, 2, 1},
                        {Family::Sp, 2, 2, 4, 2}, {Family::SOstar, 2, 2, 4, 2}};
    const SurfacePresentation shapes[] = {{0, 3}, {1, 1}};
    int violations = 0, n = 0;
    std::uint64_t seed = 70000;
    for (const auto& fm : fams)
        for (const auto& pres : shapes)
            for (int i = 0; i < 500; ++i, ++seed) {
                SurfaceRepresentation rep = random_representation(fm.f, fm.p, fm.q, pres, {}, seed);
                SignatureReport s = signature(rep);
                double chi = std::abs(pres.chi());
                if (std::abs(s.signature) > fm.dim * chi || std::abs(s.toledo.toledo) > fm.rank * chi + 1e-7) ++violations;
                ++n;
            }
    SurfaceRepresentation so2 = representation_from_json(read_json_file(FIXTURE_DIR "/so2_sigma3.json"));
    int sig = signature(so2).signature;
    bool attained = sig == 2 * std::abs(so2.pres.chi());
    return {violations == 0 && attained, std::to_string(n) + " representations, " + std::to_string(violations) +
                                             " violations; SO(2) fixture signature " + std::to_string(sig)};
}

// --------------------------------------------------------- Sp(2,R) bound

Outcome a8() {
    const SurfacePresentation shapes[] = {{0, 3}, {0, 4}, {1, 2}};
    int bad = 0;
    double min_slack = 1e300;
    for (int i = 0; i < 200; ++i) {
        SurfacePresentation pres = shapes[i % 3];
        std::vector<BoundaryHint> hints(pres.boundary - 1, BoundaryHint::Elliptic);
        SurfaceRepresentation rep = random_representation(Family::Sp, 1, 1, pres, hints, 80000 + i);
        double t = toledo::toledo(rep).toledo;
        // Bound from the boundary images directly.
        double frac = 0.0;
        for (const auto& c : rep.c) {
            double tr = c.trace().real();
            if (std::abs(tr) >= 2.0 - 1e-12) continue;
            double r = rho_sp(c) / 2.0;
            frac += r - std::floor(r);
        }
        double bound = std::abs(pres.chi()) + 1.0 - frac;
        min_slack = std::min(min_slack, bound - t);
        if (t > bound + 1e-8) ++bad;
    }
    SurfaceRepresentation cyl = representation_from_json(read_json_file(FIXTURE_DIR "/sp2_cylinder.json"));
    Sp2BoundReport b = sp2_improved_bound(cyl);
    double gap = std::abs(b.bound - b.toledo);
    return {bad == 0 && gap <= 1e-8, "200 representations, " + std::to_string(bad) + " violations, min slack " +
                                         fmt("%.3f", min_slack) + "; cylinder gap " + fmt("%.2e", gap)};
}

// --------------------------------------------------------------------- Horn

Mat haar_su(Rng& rng, int p) {
    std::normal_distribution<double> g;
    Mat z(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) z(i, j) = cplx(g(rng), g(rng));
    Eigen::HouseholderQR<Mat> qr(z);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < p; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
    cplx d = q.determinant();
    return q * std::pow(d, -1.0 / p);
}

struct HornOracle {
    double m_hat;
    double rho;
};

HornOracle horn_oracle(const Mat& a) {
    Eigen::ComplexEigenSolver<Mat> es(a, false);
    double sum = 0.0, r = 0.0;
    int nu = 0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        cplx l = es.eigenvalues()(i);
        if (std::abs(l - 1.0) <= 1e-7) {
            ++nu;
            continue;
        }
        double th = std::arg(l);
        if (th < 0) th += 2 * kPi;
        sum += th;
        r += 1.0 - th / kPi;
    }
    return {std::round(sum / (2 * kPi)) + 0.5 * nu, r};
}

Outcome a9() {
    Rng rng(1009);
    int bad = 0, oracle_mismatch = 0, n = 0;
    for (int p : {2, 3, 4})
        for (int i = 0; i < 1000; ++i) {
            Mat a = haar_su(rng, p), b = haar_su(rng, p);
            Mat ab = a * b;
            HornOracle oa = horn_oracle(a), ob = horn_oracle(b), oab = horn_oracle(ab), oinv = horn_oracle(ab.adjoint());
            double defect = oa.m_hat + ob.m_hat - oab.m_hat;
            double rsum = oa.rho + ob.rho + oinv.rho;
            if (defect < 0 || defect > p || std::abs(rsum) > p + 1e-8) ++bad;
            HornReport h = horn_check(a, b);
            if (!h.ok() || std::abs(h.m_hat_defect - defect) > 1e-12 || std::abs(h.rho_sum - rsum) > 1e-8) ++oracle_mismatch;
            ++n;
        }
    return {bad == 0 && oracle_mismatch == 0, std::to_string(n) + " pairs, " + std::to_string(bad) + " violations, " +
                                                  std::to_string(oracle_mismatch) + " library/oracle mismatches"};
}

}  // namespace

int main() {
    const Criterion criteria[] = {
        {"A1", "rho against the U(1,1) and Sp(2,R) tables", 1.0, a1},
        {"A2", "rho splitting, conjugation and inverse", 30.0, a2},
        {"A3", "unipotent rho against the signature jump", 60.0, a3},
        {"A4", "block multiset under conjugation", 60.0, a4},
        {"A5", "rotation integrality and signature cocycle", 300.0, a5},
        {"A6", "three-holed sphere signature against the cocycle", 300.0, a6},
        {"A7", "Milnor-Wood inequalities", 600.0, a7},
        {"A8", "improved Sp(2,R) bound", 120.0, a8},
        {"A9", "Horn inequalities", 30.0, a9},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = secs < c.budget_s;
        bool ok = o.ok && in_time;
        if (!ok) ++failed;
        std::printf("%s %s  %s: %s [%.2f s of %.0f s%s]\n", c.id, ok ? "PASS" : "FAIL", c.what, o.detail.c_str(), secs,
                    c.budget_s, in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
