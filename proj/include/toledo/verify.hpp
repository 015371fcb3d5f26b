#pragma once

// Randomized property suites. Each returns a JSON report with a pass flag and
// the first counterexample; output depends only on the configuration.

#include <functional>
#include <map>
#include <set>
#include <string>

#include "io.hpp"

namespace toledo {

struct VerifyConfig {
    Family family = Family::U;
    int p = 1;
    int q = 1;
    int samples = 100;
    std::uint64_t seed = 0;
    Tolerances tol;
};

namespace detail {

struct SuiteState {
    int checked = 0;
    int failures = 0;
    json counterexample;

    void fail(json c) {
        if (failures++ == 0) counterexample = std::move(c);
    }
};

inline json finish(const std::string& name, const VerifyConfig& c, const SuiteState& s, json extra = json::object()) {
    json r = {{"suite", name},  {"seed", c.seed},          {"samples", c.samples},
              {"checked", s.checked}, {"failures", s.failures}, {"passed", s.failures == 0}};
    if (s.failures > 0) r["counterexample"] = s.counterexample;
    for (auto& [k, v] : extra.items()) r[k] = v;
    return r;
}

// Random block shape with total dimension at most max_dim, at least one block
// of dimension >= 2.
inline std::vector<std::pair<int, int>> random_shape(Rng& rng, int max_dim) {
    std::uniform_int_distribution<int> coin(0, 1);
    std::vector<std::pair<int, int>> blocks;
    int left = max_dim;
    while (left > 0) {
        std::uniform_int_distribution<int> pick(1, std::min(left, 5));
        int d = blocks.empty() ? std::max(2, pick(rng)) : pick(rng);
        if (d > left) break;
        blocks.push_back({d, coin(rng) ? 1 : -1});
        left -= d;
        if (coin(rng) && blocks.size() > 1) break;
    }
    return blocks;
}

}  // namespace detail

// Random nilpotent element of su(p, q) built from a random block shape and
// conjugated by a random element of U(p, q).
inline NilpotentModel random_nilpotent(Rng& rng, int max_dim) {
    NilpotentModel m = standardize(nilpotent_model(detail::random_shape(rng, max_dim)));
    Mat g = random_u(rng, m.space.omega, 1.5);
    Mat gi = detail::upq_inverse(g, m.space.p, m.space.q);
    std::uniform_real_distribution<double> scale(0.2, 2.0);
    return {m.space, Mat(scale(rng) * g * m.n * gi)};
}

inline SurfaceRepresentation sigma3_of_pair(Family f, int p, int q, const Mat& a, const Mat& b) {
    SurfaceRepresentation rep;
    rep.pres = {0, 3};
    rep.family = f;
    rep.p = p;
    rep.q = q;
    rep.c = {a.inverse(), b.inverse(), b * a};
    return rep;
}

inline json suite_rho_class_function(const VerifyConfig& c) {
    Rng rng(c.seed);
    detail::SuiteState s;
    HermitianSpace space = HermitianSpace::standard(c.p, c.q);
    for (int i = 0; i < c.samples; ++i) {
        Mat l = random_u(rng, space.omega), g = random_u(rng, space.omega);
        ++s.checked;
        try {
            double r = rho(space, l, c.tol).total;
            double rc = rho(space, Mat(g * l * g.inverse()), c.tol).total;
            double ri = rho(space, Mat(l.inverse()), c.tol).total;
            if (std::abs(r - rc) > 1e-8 || std::abs(r + ri) > 1e-8)
                s.fail({{"L", matrix_to_json(l)}, {"g", matrix_to_json(g)}, {"rho", r}, {"rho_conj", rc}, {"rho_inv", ri}});
        } catch (const std::exception& e) {
            s.fail({{"L", matrix_to_json(l)}, {"error", e.what()}});
        }
    }
    return detail::finish("rho-class-function", c, s);
}

inline json suite_unipotent_oracle(const VerifyConfig& c) {
    Rng rng(c.seed);
    detail::SuiteState s;
    for (int i = 0; i < c.samples; ++i) {
        NilpotentModel m = random_nilpotent(rng, std::max(2, c.p + c.q));
        ++s.checked;
        try {
            double r = rho(m.space, expm(2.0 * kPi * m.n), c.tol).total;
            double o = rho_sigma_jump(m.space, m.n);
            if (std::abs(r - o) > 1e-9 || std::abs(r) > std::min(m.space.p, m.space.q) + 1e-9)
                s.fail({{"N", matrix_to_json(m.n)}, {"p", m.space.p}, {"q", m.space.q}, {"rho", r}, {"oracle", o}});
        } catch (const std::exception& e) {
            s.fail({{"N", matrix_to_json(m.n)}, {"error", e.what()}});
        }
    }
    return detail::finish("unipotent-oracle", c, s);
}

inline std::multiset<std::pair<int, int>> block_multiset(const JordanBlockDecomp& d) {
    std::multiset<std::pair<int, int>> m;
    for (const auto& b : d.blocks) m.insert({b.dim, b.dim % 2 == 0 ? b.sign : 0});
    return m;
}

// Residual of N V = V J, J the block shift, relative to |N|.
inline double reassembly_residual(const Mat& n, const JordanBlockDecomp& d) {
    Mat v = d.change_of_basis();
    Mat j = Mat::Zero(v.cols(), v.cols());
    Eigen::Index off = 0;
    for (const auto& b : d.blocks) {
        for (int k = 1; k < b.dim; ++k) j(off + k - 1, off + k) = 1.0;
        off += b.dim;
    }
    Mat nv = n * v;
    return (nv - v * j).norm() / std::max(1.0, n.norm() * v.norm());
}

inline json suite_normal_form_conjugacy(const VerifyConfig& c) {
    Rng rng(c.seed);
    detail::SuiteState s;
    const std::vector<std::vector<std::pair<int, int>>> shapes = {
        {{2, 1}}, {{2, 1}, {2, -1}}, {{3, 1}}, {{4, -1}}, {{2, -1}, {3, 1}}};
    double worst = 0.0;
    for (const auto& shape : shapes) {
        NilpotentModel m = standardize(nilpotent_model(shape));
        auto ref = block_multiset(block_decompose(m.space, m.n));
        for (int i = 0; i < c.samples; ++i) {
            Mat g = random_u(rng, m.space.omega);
            Mat n = g * m.n * detail::upq_inverse(g, m.space.p, m.space.q);
            ++s.checked;
            try {
                JordanBlockDecomp d = block_decompose(m.space, n);
                double res = reassembly_residual(n, d);
                worst = std::max(worst, res);
                if (block_multiset(d) != ref || res > 1e-7) s.fail({{"N", matrix_to_json(n)}, {"residual", res}});
            } catch (const std::exception& e) {
                s.fail({{"N", matrix_to_json(n)}, {"error", e.what()}});
            }
        }
    }
    return detail::finish("normal-form-conjugacy", c, s, {{"worst_residual", worst}});
}

inline json suite_rot_rho_integrality(const VerifyConfig& c) {
    Rng rng(c.seed);
    detail::SuiteState s;
    HermitianSpace space = HermitianSpace::standard(c.p, c.q);
    double worst = 0.0;
    for (int i = 0; i < c.samples; ++i) {
        Mat l = random_u(rng, space.omega);
        ++s.checked;
        try {
            double v = rot_frac(space, l, c.tol) + rho(space, l, c.tol).total;
            double d = circle_distance(v, 0.0);
            worst = std::max(worst, d);
            if (d > 1e-8) s.fail({{"L", matrix_to_json(l)}, {"distance", d}});
        } catch (const std::exception& e) {
            s.fail({{"L", matrix_to_json(l)}, {"error", e.what()}});
        }
    }
    return detail::finish("rot-rho-integrality", c, s, {{"worst_distance", worst}});
}

inline json suite_cocycle_identity(const VerifyConfig& c) {
    Rng rng(c.seed);
    detail::SuiteState s;
    Mat omega = ipq(c.p, c.q);
    double worst = 0.0;
    for (int i = 0; i < c.samples; ++i) {
        Mat a = random_u(rng, omega), b = random_u(rng, omega), d = random_u(rng, omega);
        ++s.checked;
        try {
            auto ab = signature_cocycle(a, b, c.p, c.q, c.tol);
            auto ba = signature_cocycle(b, a, c.p, c.q, c.tol);
            auto ab_c = signature_cocycle(Mat(a * b), d, c.p, c.q, c.tol);
            auto bc = signature_cocycle(b, d, c.p, c.q, c.tol);
            auto a_bc = signature_cocycle(a, Mat(b * d), c.p, c.q, c.tol);
            worst = std::max({worst, ab.residual, ba.residual, ab_c.residual, bc.residual, a_bc.residual});
            bool ok = ab.sign == ba.sign && ab.sign + ab_c.sign == bc.sign + a_bc.sign &&
                      std::abs(ab.sign) <= c.p + c.q && ab.residual < 1e-6;
            if (!ok)
                s.fail({{"A", matrix_to_json(a)}, {"B", matrix_to_json(b)}, {"C", matrix_to_json(d)},
                        {"sign_ab", ab.sign}, {"sign_ba", ba.sign}, {"sign_ab_c", ab_c.sign}, {"sign_bc", bc.sign},
                        {"sign_a_bc", a_bc.sign}});
        } catch (const std::exception& e) {
            s.fail({{"A", matrix_to_json(a)}, {"B", matrix_to_json(b)}, {"error", e.what()}});
        }
    }
    return detail::finish("cocycle-identity", c, s, {{"worst_residual", worst}});
}

inline json suite_sigma3_consistency(const VerifyConfig& c) {
    Rng rng(c.seed);
    detail::SuiteState s;
    Mat omega = ipq(c.p, c.q);
    for (int i = 0; i < c.samples; ++i) {
        Mat a = random_u(rng, omega), b = random_u(rng, omega);
        ++s.checked;
        try {
            int cs = signature_cocycle(a, b, c.p, c.q, c.tol).sign;
            int ss = signature(sigma3_of_pair(Family::U, c.p, c.q, a, b), c.tol).signature;
            if (cs != ss) s.fail({{"A", matrix_to_json(a)}, {"B", matrix_to_json(b)}, {"cocycle", cs}, {"signature", ss}});
        } catch (const std::exception& e) {
            s.fail({{"A", matrix_to_json(a)}, {"B", matrix_to_json(b)}, {"error", e.what()}});
        }
    }
    return detail::finish("sigma3-consistency", c, s);
}

inline json suite_milnor_wood(const VerifyConfig& c) {
    detail::SuiteState s;
    double min_sig_slack = 1e300, min_tol_slack = 1e300;
    const SurfacePresentation shapes[] = {{0, 3}, {1, 1}, {1, 2}};
    std::uint64_t seed = c.seed;
    for (const auto& pres : shapes) {
        for (int i = 0; i < c.samples; ++i, ++seed) {
            SurfaceRepresentation rep = random_representation(c.family, c.p, c.q, pres, {}, seed);
            ++s.checked;
            try {
                SignatureReport sr = signature(rep, c.tol);
                MilnorWoodReport mw = milnor_wood_report(rep, sr);
                min_sig_slack = std::min(min_sig_slack, mw.signature_slack);
                if (rep.family != Family::SO0) min_tol_slack = std::min(min_tol_slack, mw.toledo_slack);
                if (!mw.signature_bound_ok || !mw.toledo_bound_ok)
                    s.fail({{"representation", representation_to_json(rep)}, {"signature", sr.signature},
                            {"toledo", sr.toledo.toledo}});
            } catch (const std::exception& e) {
                s.fail({{"representation", representation_to_json(rep)}, {"error", e.what()}});
            }
        }
    }
    json extra = {{"min_signature_slack", min_sig_slack}};
    if (c.family != Family::SO0) extra["min_toledo_slack"] = min_tol_slack;
    return detail::finish("milnor-wood", c, s, extra);
}

inline json suite_sp2_bound(const VerifyConfig& c) {
    detail::SuiteState s;
    const SurfacePresentation shapes[] = {{0, 3}, {0, 4}, {1, 2}};
    std::uint64_t seed = c.seed;
    for (int i = 0; i < c.samples; ++i, ++seed) {
        SurfacePresentation pres = shapes[i % 3];
        std::vector<BoundaryHint> hints(pres.boundary - 1, BoundaryHint::Elliptic);
        SurfaceRepresentation rep = random_representation(Family::Sp, 1, 1, pres, hints, seed);
        ++s.checked;
        try {
            Sp2BoundReport b = sp2_improved_bound(rep, c.tol);
            if (!b.holds) s.fail({{"representation", representation_to_json(rep)}, {"toledo", b.toledo}, {"bound", b.bound}});
        } catch (const std::exception& e) {
            s.fail({{"representation", representation_to_json(rep)}, {"error", e.what()}});
        }
    }
    return detail::finish("sp2-bound", c, s);
}

inline json suite_horn(const VerifyConfig& c) {
    Rng rng(c.seed);
    detail::SuiteState s;
    for (int i = 0; i < c.samples; ++i) {
        Mat a = random_su(rng, c.p, 0, 4.0 * kPi), b = random_su(rng, c.p, 0, 4.0 * kPi);
        ++s.checked;
        try {
            HornReport h = horn_check(a, b, c.tol);
            if (!h.ok())
                s.fail({{"A", matrix_to_json(a)}, {"B", matrix_to_json(b)}, {"m_hat_defect", h.m_hat_defect},
                        {"rho_sum", h.rho_sum}});
        } catch (const std::exception& e) {
            s.fail({{"A", matrix_to_json(a)}, {"B", matrix_to_json(b)}, {"error", e.what()}});
        }
    }
    return detail::finish("horn", c, s);
}

// T from word paths against T from shifted lifts multiplied in the cover, and
// invariance under conjugating the whole representation.
inline json suite_lift_independence(const VerifyConfig& c) {
    Rng rng(c.seed);
    detail::SuiteState s;
    double worst = 0.0;
    std::uniform_int_distribution<int> shift(-3, 3);
    for (int i = 0; i < c.samples; ++i) {
        SurfacePresentation pres = (i % 2 == 0) ? SurfacePresentation{0, 3} : SurfacePresentation{1, 2};
        SurfaceRepresentation rep = random_representation(c.family, c.p, c.q, pres, {}, c.seed + i);
        std::vector<int> shifts(2 * pres.genus + pres.boundary);
        for (auto& v : shifts) v = shift(rng);
        SurfaceRepresentation conj = rep;
        Mat g = random_native(rng, rep.family, rep.p, rep.q);
        Mat gi = g.inverse();
        for (auto* list : {&conj.a, &conj.b, &conj.c})
            for (auto& m : *list) m = g * m * gi;
        ++s.checked;
        try {
            double t = toledo(rep, c.tol).toledo;
            double tl = toledo_from_lifts(rep, shifts, c.tol);
            double tc = toledo(conj, c.tol).toledo;
            double d = std::max(std::abs(t - tl), std::abs(t - tc));
            worst = std::max(worst, d);
            if (d > 1e-7) s.fail({{"representation", representation_to_json(rep)}, {"toledo", t}, {"from_lifts", tl}, {"conjugated", tc}});
        } catch (const std::exception& e) {
            s.fail({{"representation", representation_to_json(rep)}, {"error", e.what()}});
        }
    }
    return detail::finish("lift-independence", c, s, {{"worst_difference", worst}});
}

// sigma(A) sigma(B) sigma(AB)^{-1} sits over the identity at height sign(A, B),
// and b2 vanishes on the section.
inline json suite_atiyah_section(const VerifyConfig& c) {
    Rng rng(c.seed);
    detail::SuiteState s;
    Mat omega = ipq(c.p, c.q);
    for (int i = 0; i < c.samples; ++i) {
        Mat a = random_u(rng, omega), b = random_u(rng, omega);
        ++s.checked;
        try {
            Ext2Element sa = atiyah_sigma(a, c.p, c.q, c.tol), sb = atiyah_sigma(b, c.p, c.q, c.tol);
            Ext2Element sab = atiyah_sigma(Mat(a * b), c.p, c.q, c.tol);
            Ext2Element prod = ext2_mul(sa, sb, c.p, c.q, c.tol);
            // prod = sab * (I, n) with n = prod.rot2 - sab.rot2 since the second factors agree.
            double n = prod.rot2 - sab.rot2;
            int sign = signature_cocycle(a, b, c.p, c.q, c.tol).sign;
            double b2a = b2(sa, c.p, c.q, c.tol);
            if (std::abs(n - sign) > 1e-6 || std::abs(b2a) > 1e-8)
                s.fail({{"A", matrix_to_json(a)}, {"B", matrix_to_json(b)}, {"height", n}, {"sign", sign}, {"b2", b2a}});
        } catch (const std::exception& e) {
            s.fail({{"A", matrix_to_json(a)}, {"B", matrix_to_json(b)}, {"error", e.what()}});
        }
    }
    return detail::finish("atiyah-section", c, s);
}

inline const std::map<std::string, std::function<json(const VerifyConfig&)>>& verify_suites() {
    static const std::map<std::string, std::function<json(const VerifyConfig&)>> suites = {
        {"rho-class-function", suite_rho_class_function},
        {"unipotent-oracle", suite_unipotent_oracle},
        {"normal-form-conjugacy", suite_normal_form_conjugacy},
        {"rot-rho-integrality", suite_rot_rho_integrality},
        {"cocycle-identity", suite_cocycle_identity},
        {"sigma3-consistency", suite_sigma3_consistency},
        {"milnor-wood", suite_milnor_wood},
        {"sp2-bound", suite_sp2_bound},
        {"horn", suite_horn},
        {"lift-independence", suite_lift_independence},
        {"atiyah-section", suite_atiyah_section},
    };
    return suites;
}

}  // namespace toledo
