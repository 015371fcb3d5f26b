#include <gtest/gtest.h>

#include "toledo/toledo.hpp"

using namespace toledo;

#ifndef FIXTURE_DIR
#define FIXTURE_DIR "tests/fixtures"
#endif

namespace {

SurfaceRepresentation fixture(const char* name) {
    return representation_from_json(read_json_file(std::string(FIXTURE_DIR) + "/" + name));
}

// Hyperbolic pair of pants in SL(2,R): two hyperbolic boundaries with
// crossed axes, the third forced by the relation.
SurfaceRepresentation pants(double t) {
    SurfaceRepresentation rep;
    rep.pres = {0, 3};
    rep.family = Family::Sp;
    rep.p = rep.q = 1;
    Mat a = Mat::Zero(2, 2), c(2, 2), d = Mat::Zero(2, 2);
    a(0, 0) = std::exp(t);
    a(1, 1) = std::exp(-t);
    c << 2.0, 1.0, 1.0, 1.0;
    d(0, 0) = std::exp(-t);
    d(1, 1) = std::exp(t);
    rep.c = {a, Mat(c * d * c.inverse())};
    solve_last_boundary(rep);
    return rep;
}

SurfaceRepresentation conjugate_rep(SurfaceRepresentation rep) {
    for (auto* list : {&rep.a, &rep.b, &rep.c})
        for (auto& m : *list) m = m.conjugate().eval();
    return rep;
}

}  // namespace

TEST(Validate, CountsAndRelation) {
    SurfaceRepresentation rep = fixture("sp2_pants.json");
    EXPECT_LT(validate(rep), 1e-10);
    EXPECT_NO_THROW(require_relation(rep));
    SurfaceRepresentation broken = rep;
    broken.c[2] = broken.c[1];
    EXPECT_THROW(require_relation(broken), RelationError);
    SurfaceRepresentation short_rep = rep;
    short_rep.c.pop_back();
    EXPECT_THROW(validate(short_rep), DimensionError);
    SurfaceRepresentation wrong_family = rep;
    wrong_family.c[0](0, 0) *= 1.1;  // leaves SL(2,R)
    EXPECT_THROW(validate(wrong_family), MembershipError);
}

TEST(Sampler, DeterministicAndSatisfiesRelation) {
    for (Family f : {Family::U, Family::Sp, Family::SOstar, Family::SO0}) {
        int p = f == Family::SO0 ? 3 : (f == Family::SOstar ? 2 : 1);
        auto r1 = random_representation(f, p, 1, {1, 2}, {}, 77);
        auto r2 = random_representation(f, p, 1, {1, 2}, {}, 77);
        EXPECT_EQ((r1.c[1] - r2.c[1]).norm(), 0.0);
        EXPECT_LT(validate(r1), 1e-8);
    }
}

TEST(Sampler, Hints) {
    using H = BoundaryHint;
    auto ell = random_representation(Family::Sp, 1, 1, {0, 3}, {H::Elliptic, H::Elliptic}, 5);
    EXPECT_LT(std::abs(ell.c[0].trace().real()), 2.0);
    EXPECT_LT(std::abs(ell.c[1].trace().real()), 2.0);
    auto hyp = random_representation(Family::Sp, 1, 1, {0, 3}, {H::Hyperbolic}, 5);
    EXPECT_GT(std::abs(hyp.c[0].trace().real()), 2.0);
    auto par = random_representation(Family::Sp, 1, 1, {0, 3}, {H::Parabolic}, 5);
    EXPECT_NEAR(std::abs(par.c[0].trace().real()), 2.0, 1e-12);
    EXPECT_THROW(random_representation(Family::Sp, 1, 1, {0, 2}, {H::Elliptic, H::Elliptic}, 5), Error);
    EXPECT_THROW(random_representation(Family::U, 2, 1, {0, 3}, {H::Hyperbolic}, 5), Error);
    EXPECT_NO_THROW(random_representation(Family::U, 1, 1, {0, 3}, {H::Hyperbolic}, 5));
}

TEST(Toledo, Fixtures) {
    SignatureReport s = signature(fixture("so2_sigma3.json"));
    EXPECT_EQ(s.signature, 2);
    EXPECT_EQ(milnor_wood_report(fixture("so2_sigma3.json")).signature_slack, 0.0);

    SignatureReport pt = signature(fixture("sp2_pants.json"));
    EXPECT_NEAR(pt.toledo.toledo, 1.0, 1e-8);
    EXPECT_EQ(pt.signature, 2);

    SurfaceRepresentation cyl = fixture("sp2_cylinder.json");
    EXPECT_NEAR(toledo::toledo(cyl).toledo, 0.0, 1e-8);

    SignatureReport blk = signature(fixture("u11_block_sigma3.json"));
    EXPECT_NEAR(blk.toledo.toledo, 0.0, 1e-8);
    EXPECT_EQ(blk.signature, 2);

    EXPECT_NEAR(toledo::toledo(fixture("u11_trivial_torus.json")).toledo, 0.0, 1e-12);
}

TEST(Toledo, HyperbolicPantsIsMaximal) {
    for (double t : {1.0, 2.0, 3.0}) {
        SurfaceRepresentation rep = pants(t);
        EXPECT_NEAR(toledo::toledo(rep).toledo, 1.0, 1e-8) << "t " << t;
        EXPECT_EQ(signature(rep).signature, 2) << "t " << t;
        EXPECT_NEAR(toledo::toledo(conjugate_rep(rep)).toledo, 1.0, 1e-8);  // real, so unchanged
    }
}

TEST(Toledo, ComplexConjugationFlipsSign) {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        auto rep = random_representation(Family::U, 2, 1, {0, 3}, {}, seed);
        SignatureReport s = signature(rep), sc = signature(conjugate_rep(rep));
        EXPECT_NEAR(sc.toledo.toledo, -s.toledo.toledo, 1e-7);
        EXPECT_EQ(sc.signature, -s.signature);
    }
}

TEST(Toledo, LiftAndConjugationIndependence) {
    for (auto [f, p, q] : {std::tuple{Family::U, 1, 1}, std::tuple{Family::U, 2, 1}, std::tuple{Family::Sp, 2, 2}}) {
        VerifyConfig c{f, p, q, 6, 11, {}};
        json r = suite_lift_independence(c);
        EXPECT_TRUE(r["passed"].get<bool>()) << r.dump();
    }
}

TEST(Toledo, AdditiveUnderGluing) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto rep = random_representation(Family::U, 1, 1, {0, 4}, {}, seed);
        const auto& c = rep.c;
        SurfaceRepresentation left = rep, right = rep;
        left.pres = right.pres = {0, 3};
        left.c = {c[0], c[1], Mat((c[0] * c[1]).inverse())};
        right.c = {Mat(c[0] * c[1]), c[2], c[3]};
        double whole = toledo::toledo(rep).toledo;
        EXPECT_NEAR(whole, toledo::toledo(left).toledo + toledo::toledo(right).toledo, 1e-7) << "seed " << seed;
    }
}

TEST(Toledo, ClosedAndSo) {
    auto closed = random_representation(Family::U, 2, 1, {2, 0}, {}, 9);
    SignatureReport s = signature(closed);
    EXPECT_NEAR(s.toledo.toledo, 0.0, 1e-8);
    EXPECT_EQ(s.signature, 0);
    auto so = random_representation(Family::SO0, 3, 2, {0, 3}, {}, 9);
    EXPECT_EQ(signature(so).signature, 0);
    EXPECT_THROW(toledo::toledo(so), Error);
}

TEST(Toledo, FamilyNormalizations) {
    auto sp = random_representation(Family::Sp, 2, 2, {0, 3}, {}, 4);
    ToledoReport t = toledo::toledo(sp);
    EXPECT_EQ(t.toledo, t.toledo_u);
    auto ss = random_representation(Family::SOstar, 2, 2, {0, 3}, {}, 4);
    ToledoReport u = toledo::toledo(ss);
    EXPECT_NEAR(u.toledo, 0.5 * u.toledo_u, 1e-15);
    EXPECT_EQ(toledo_rank(Family::U, 3, 2), 2);
    EXPECT_EQ(toledo_rank(Family::SOstar, 4, 4), 4);
    EXPECT_EQ(toledo_rank(Family::SO0, 5, 2), 2);
}

TEST(MilnorWood, SmallSweeps) {
    for (auto [f, p, q] : {std::tuple{Family::U, 1, 1}, std::tuple{Family::Sp, 1, 1}, std::tuple{Family::SOstar, 2, 2}}) {
        VerifyConfig c{f, p, q, 5, 21, {}};
        json r = suite_milnor_wood(c);
        EXPECT_TRUE(r["passed"].get<bool>()) << r.dump();
    }
}

TEST(Sp2Bound, CylinderEqualityAndSweep) {
    Sp2BoundReport b = sp2_improved_bound(fixture("sp2_cylinder.json"));
    EXPECT_EQ(b.elliptic_count, 2);
    EXPECT_NEAR(b.toledo, b.bound, 1e-8);
    EXPECT_TRUE(b.holds);
    VerifyConfig c{Family::Sp, 1, 1, 9, 3, {}};
    json r = suite_sp2_bound(c);
    EXPECT_TRUE(r["passed"].get<bool>()) << r.dump();
    EXPECT_THROW(sp2_improved_bound(random_representation(Family::U, 1, 1, {0, 3}, {}, 1)), Error);
}

TEST(Horn, Stats) {
    Mat a = Mat::Zero(2, 2);
    a(0, 0) = std::exp(kI * 1.0);
    a(1, 1) = std::exp(-kI * 1.0);
    HornStats h = horn_stats(a);
    EXPECT_EQ(h.m, 1);
    EXPECT_EQ(h.nu, 0);
    HornStats hi = horn_stats(identity(3));
    EXPECT_EQ(hi.m, 0);
    EXPECT_EQ(hi.nu, 3);
    EXPECT_DOUBLE_EQ(hi.m_hat, 1.5);
    HornReport r = horn_check(a, Mat(a.adjoint()));
    EXPECT_DOUBLE_EQ(r.m_hat_defect, 1.0);
    EXPECT_TRUE(r.ok());
    EXPECT_THROW(horn_stats(Mat(2.0 * a)), MembershipError);
    EXPECT_THROW(horn_stats(Mat(std::exp(kI * 0.3) * a)), MembershipError);
}

TEST(Horn, RandomPairs) {
    for (int p : {2, 3}) {
        VerifyConfig c{Family::SU, p, 0, 50, 6, {}};
        json r = suite_horn(c);
        EXPECT_TRUE(r["passed"].get<bool>()) << r.dump();
    }
}
