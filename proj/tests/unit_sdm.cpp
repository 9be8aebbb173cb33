#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "breuil/sdm.hpp"

using namespace breuil;

namespace {

SdmParams base_params(PadicCtxP R, SdmVariant v) {
    SdmParams P;
    P.variant = v;
    P.R = R;
    return P;
}

bool all_pass(const SdmReport& r) { return r.all_pass; }

void dump(const SdmReport& r) {
    for (auto& a : r.axioms)
        if (!a.pass) MESSAGE("axiom ", a.axiom, " FAIL: ", a.note);
}

} // namespace

TEST_CASE("character modules pass all twelve axioms") {
    auto R = make_padic_ctx(5, 6, 1, 1);
    auto P = base_params(R, SdmVariant::char_F1);
    P.a = OE::from_int(R, 2);
    P.chr_exp = 3;
    auto M = build_sdm(P);
    auto rep = verify_sdm(M);
    dump(rep);
    CHECK(all_pass(rep));

    auto R2 = make_padic_ctx(5, 10, 1, 2);
    auto P2 = base_params(R2, SdmVariant::char_F2_niv1);
    P2.a = OE::from_int(R2, 3);
    P2.chr_exp = 2;
    auto M2 = build_sdm(P2);
    auto rep2 = verify_sdm(M2);
    dump(rep2);
    CHECK(all_pass(rep2));

    auto P3 = base_params(R2, SdmVariant::char_F2_niv2);
    P3.a = OE::from_int(R2, 3);
    P3.chr_exp = 7;
    auto M3 = build_sdm(P3);
    auto rep3 = verify_sdm(M3);
    dump(rep3);
    CHECK(all_pass(rep3));
}

TEST_CASE("reduction of the character module is the standard Breuil module") {
    auto R = make_padic_ctx(5, 6, 1, 1);
    auto P = base_params(R, SdmVariant::char_F1);
    P.a = OE::from_int(R, 2);
    P.chr_exp = 3;
    auto M = build_sdm(P);
    auto Mp = reduce_T0(M);
    // Fil^1 = u^{e1} M', phi_1(u^{e1} e) = abar^{-1} e, descent omega^j
    CHECK(Mp.gens.empty());
    CHECK(is_maximal_model(Mp));
    auto ref = standard_rank1(Mp.B, R->kE->inv(2), 3);
    CHECK(Mp == ref);
    auto chi = character_of_rank1(Mp);
    CHECK(chi.lambda == 2);
    CHECK(chi.exponent == 4 % 4);
}

TEST_CASE("prin_case1 passes the axiom suite and its proof identity") {
    for (long p : {3L, 5L}) {
        auto R = make_padic_ctx(p, 6, 1, 1);
        for (long x1 = 1; x1 < p; ++x1)
            for (long w = 1; w < p; ++w)
                for (long j = 1; j <= p - 2; ++j) {
                    auto P = base_params(R, SdmVariant::prin_case1);
                    P.x1 = OE::from_int(R, x1);
                    P.w = OE::from_int(R, w);
                    P.x2 = OE::from_int(R, p) * P.w * P.x1.inv_unit();
                    P.j = j;
                    if (j == 1 && (x1 * x1) % p == w % p) {
                        CHECK_THROWS_AS(build_sdm(P), degenerate_case);
                        continue;
                    }
                    auto M = build_sdm(P);
                    auto rep = verify_sdm(M);
                    dump(rep);
                    CHECK(all_pass(rep));
                    // proof identity: phi(-u^j g1 + x1 g2) = p (w g2 + x1 u^{pj-e1} V g1)
                    auto S = M.S;
                    auto lhs = sdm_apply_phi(M, M.fil_gens[0]);
                    auto V = solve_V(S, RElem::from_OE(S->F, P.x1), RElem::from_OE(S->F, P.w), (int)j);
                    DPSeries rhs0 = V.series.shift_u((int)(p * j) - S->fd.e).mul_OE(P.x1).mul_int(p);
                    DPSeries rhs1 = DPSeries::constant_OE(S, OE::from_int(R, p) * P.w);
                    CHECK((lhs[0] - rhs0).is_zero());
                    CHECK((lhs[1] - rhs1).is_zero());
                }
    }
}

TEST_CASE("prin_case2 passes and mirrors") {
    auto R = make_padic_ctx(5, 6, 1, 1);
    auto P = base_params(R, SdmVariant::prin_case2);
    P.x2 = OE::from_int(R, 2);
    P.w = OE::from_int(R, 3);
    P.x1 = OE::from_int(R, 5) * P.w * P.x2.inv_unit();
    P.j = 2;
    auto M = build_sdm(P);
    auto rep = verify_sdm(M);
    dump(rep);
    CHECK(all_pass(rep));
    // phi(x2 g1 + w u^{e1-j} g2) = p(w g1 - w x2 u^{p(e1-j)-e1} U g2)
    auto S = M.S;
    auto lhs = sdm_apply_phi(M, M.fil_gens[0]);
    auto U = solve_U(S, RElem::from_OE(S->F, P.x2), RElem::from_OE(S->F, P.w), 2);
    DPSeries rhs0 = DPSeries::constant_OE(S, OE::from_int(R, 5) * P.w);
    DPSeries rhs1 = -(U.series.shift_u((int)(5 * (4 - 2)) - 4).mul_OE(P.x2 * P.w).mul_int(5));
    CHECK((lhs[0] - rhs0).is_zero());
    CHECK((lhs[1] - rhs1).is_zero());
}

TEST_CASE("corrupted modules fail the targeted checks") {
    auto R = make_padic_ctx(5, 6, 1, 1);
    auto P = base_params(R, SdmVariant::prin_case1);
    P.x1 = OE::from_int(R, 2);
    P.w = OE::from_int(R, 1);
    P.x2 = OE::from_int(R, 5) * P.x1.inv_unit();
    P.j = 2;
    // the honest module passes everything including the embedding check
    auto M0 = build_sdm(P);
    std::string why;
    CHECK(sdm_embedding_consistent(M0, &why));
    // re-deriving phi from the embedding reproduces the stored matrix
    auto Phi2 = sdm_phi_from_embedding(M0);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK((Phi2[i][j] - M0.phi_mat[i][j]).is_zero());

    // corruption A: replace V by 1 inside the embedding of g2.  The abstract
    // module data still satisfies the twelve axioms (the divided-power
    // factorial supplies the p in phi(Fil) regardless of V), but the lattice
    // no longer sits inside the filtered module: the embedding check fails.
    {
        auto M = build_sdm(P);
        auto S = M.S;
        DPSeries mid = DPSeries::monomial_OE(S, (int)(5 * P.j), OE::one(R).shift_p(-1)) +
                       DPSeries::monomial_OE(S, (int)(5 * P.j) - S->fd.e, OE::one(R));
        M.embed[1][0] = mid.mul_OE(P.x1 * P.x1 * P.w.inv_unit()); // V -> 1
        CHECK(!sdm_embedding_consistent(M, &why));
        CHECK(why == "phi does not match the filtered module");
    }

    // corruption B: shift x2 by a unit in phi(g2): phi(Fil gen) is no longer
    // divisible by p
    {
        auto M = build_sdm(P);
        M.phi_mat[1][1] = M.phi_mat[1][1] + DPSeries::one(M.S);
        auto rep = verify_sdm(M);
        bool ax4 = true;
        for (auto& a : rep.axioms)
            if (a.axiom == 4) ax4 = a.pass;
        CHECK(!ax4);
    }

    // corruption C: break the descent character on g2: the group law still
    // holds but phi no longer commutes with the descent action
    {
        auto M = build_sdm(P);
        auto S = M.S;
        TC t = TC::scalar(S->F, 1, RElem::from_OE(S->F, S->theta_pow(P.j + 1)));
        M.g0_mat[1][1] = DPSeries::constant(S, t);
        auto rep = verify_sdm(M);
        bool ax12 = true;
        for (auto& a : rep.axioms)
            if (a.axiom == 12) ax12 = a.pass;
        CHECK(!ax12);
    }
}

TEST_CASE("prin_case3 with fractional valuations") {
    auto R = make_padic_ctx(3, 10, 2, 2);
    OE pi = OE::pi(R);
    auto P = base_params(R, SdmVariant::prin_case3);
    P.w = OE::from_int(R, 2);
    P.x1 = pi;
    P.x2 = OE::from_int(R, 3) * P.w * pi.inv_field(); // val 1/2
    P.j = 1;
    CHECK((P.x1 * P.x2 - OE::from_int(R, 3) * P.w).is_zero());
    auto M = build_sdm(P);
    auto rep = verify_sdm(M);
    dump(rep);
    CHECK(all_pass(rep));
}

TEST_CASE("super_general passes for all regimes") {
    long p = 3;
    auto R = make_padic_ctx(p, 6, 1, 2);
    for (long m : {1L, 2L, 3L, 5L, 7L}) {
        long i = m % (p + 1);
        if (i == 0) continue;
        for (long b : {1L, 2L, 3L, 6L}) {
            if (i == 1 && b % 3 == 0) continue; // needs the X-shaped lattice
            auto P = base_params(R, SdmVariant::super_general);
            P.m = m;
            P.b = OE::from_int(R, b);
            P.w = OE::from_int(R, 1);
            if (i == p && b % p != 0) {
                // 1 + 4wb^2 must be a square in E; b=1,w=1: 5; b=2,w=1: 17
                // p=3: 5 = 2 mod 3 nonsquare in F_3 but fE=2 so F_9: all of F_3
                // is square in F_9
            }
            SDModule M;
            try {
                M = build_sdm(P);
            } catch (const no_root_in_E&) {
                continue;
            }
            auto rep = verify_sdm(M);
            dump(rep);
            CHECK(all_pass(rep));
            // proof identity: phi(fil gen) = p w W^{-1} g2
            auto S = M.S;
            auto lhs = sdm_apply_phi(M, M.fil_gens[0]);
            auto W = solve_W(S, RElem::from_OE(S->F, P.b), RElem::from_OE(S->F, P.w), (int)i, P.branch);
            DPSeries rhs1 = W.series.inv_unit().mul_OE(P.w).mul_int(p);
            CHECK(lhs[0].is_zero());
            CHECK((lhs[1] - rhs1).is_zero());
        }
    }
}

TEST_CASE("super_i1 passes and satisfies phi1(h) = w X^{-1} g1") {
    long p = 5;
    auto R = make_padic_ctx(p, 6, 1, 2);
    auto P = base_params(R, SdmVariant::super_i1);
    P.m = 1 + (p + 1) * 2; // i = 1, j = 2
    P.b = OE::from_int(R, 5);
    P.w = OE::from_int(R, 4);
    auto M = build_sdm(P);
    auto rep = verify_sdm(M);
    dump(rep);
    CHECK(all_pass(rep));
    auto S = M.S;
    auto phi1h = sdm_phi1_fil_gen(M, 0);
    auto X = solve_X(S, RElem::from_OE(S->F, P.b), RElem::from_OE(S->F, P.w), P.branch);
    DPSeries rhs0 = X.series.inv_unit().mul_OE(P.w);
    CHECK((phi1h[0] - rhs0).is_zero());
    CHECK(phi1h[1].is_zero());
}

TEST_CASE("family modules pass their axiom suites") {
    long p = 3;
    auto R = make_padic_ctx(p, 6, 1, 2);
    // Y1
    {
        auto P = base_params(R, SdmVariant::family_Y1);
        P.x1 = OE::from_int(R, 2); // Teichmuller point
        P.w = OE::from_int(R, 2);
        P.j = 1;
        auto M = build_sdm(P);
        auto rep = verify_sdm(M);
        dump(rep);
        CHECK(all_pass(rep));
        // specialization at Y = 0 equals the scalar module
        auto M0 = specialize_sdm(M, {OE::zero(R)});
        auto Ps = base_params(R, SdmVariant::prin_case1);
        Ps.x1 = OE::teichmuller(R, R->kE->from_int(2));
        Ps.w = P.w;
        Ps.x2 = OE::from_int(R, p) * Ps.w * Ps.x1.inv_unit();
        Ps.j = 1;
        auto Ms = build_sdm(Ps);
        for (size_t l = 0; l < Ms.fil_gens.size(); ++l)
            for (int i = 0; i < 2; ++i) CHECK(dps_equal(M0.fil_gens[l][i], Ms.fil_gens[l][i]));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(dps_equal(M0.phi_mat[i][j], Ms.phi_mat[i][j]));
    }
    // X1X2
    {
        auto P = base_params(R, SdmVariant::family_X1X2);
        P.w = OE::from_int(R, 1);
        P.j = 1;
        auto M = build_sdm(P);
        auto rep = verify_sdm(M);
        dump(rep);
        CHECK(all_pass(rep));
    }
    // B (i > 1, val b > 0)
    {
        auto P = base_params(R, SdmVariant::family_B);
        P.m = 2; // i = 2, j = 0
        P.w = OE::from_int(R, 1);
        auto M = build_sdm(P);
        auto rep = verify_sdm(M);
        dump(rep);
        CHECK(all_pass(rep));
    }
    // B' (val b = 0)
    {
        auto P = base_params(R, SdmVariant::family_Bprime);
        P.m = 2;
        P.b = OE::from_int(R, 1);
        P.w = OE::from_int(R, 1);
        auto M = build_sdm(P);
        auto rep = verify_sdm(M);
        dump(rep);
        CHECK(all_pass(rep));
    }
    // X (i = 1)
    {
        auto P = base_params(R, SdmVariant::family_X);
        P.m = 1 + (p + 1);
        P.w = OE::from_int(R, 1);
        auto M = build_sdm(P);
        auto rep = verify_sdm(M);
        dump(rep);
        CHECK(all_pass(rep));
    }
}

TEST_CASE("reduction naturality: reduce(specialize) = specialize(reduce)") {
    long p = 3;
    auto R = make_padic_ctx(p, 6, 1, 2);
    auto P = base_params(R, SdmVariant::family_Y1);
    P.x1 = OE::from_int(R, 2);
    P.w = OE::from_int(R, 2);
    P.j = 1;
    auto M = build_sdm(P);
    // route 1: specialize at Y = 0 then reduce over k_E
    auto M0 = specialize_sdm(M, {OE::zero(R)});
    auto r1 = reduce_T0(M0);
    // route 2: reduce the family, then kill the nilpotent (Y -> 0)
    auto rf = reduce_T0(M);
    auto r2 = kill_nilpotents(rf);
    CHECK(r1 == r2);

    // and at a nonzero specialization point Y = p: the scalar reduction only
    // sees the residue, so routes agree as well
    auto Mp2 = specialize_sdm(M, {OE::from_int(R, p)});
    auto r3 = reduce_T0(Mp2);
    CHECK(r3 == r2);
}
