#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "breuil/reduction.hpp"

using namespace breuil;

namespace {

SmallField::elt res_inv(FFp k, long n) { return k->inv(k->from_int(n)); }

} // namespace

TEST_CASE("theorem table, principal case 1: val(x1) = 0") {
    long p = 5;
    auto R = make_padic_ctx(p, 10, 1, 2);
    auto kE = R->kE;
    for (long x : {1L, 2L, 3L}) {
        for (long w : {1L, 2L}) {
            for (long j : {1L, 2L, 3L}) {
                if (j == 1 && (x * x) % p == w % p) continue;
                OE x1 = OE::from_int(R, x);
                OE ww = OE::from_int(R, w);
                auto rep = reduce_principal(R, x1, OE::from_int(R, p) * ww * x1.inv_unit(), ww, j);
                REQUIRE(rep.shape == ReductionShape::triangular_nonsplit);
                // sub = lambda_{x1^-1} omega ; quot = lambda_{x1 w^-1} omega^j
                CHECK(rep.sub_character.lambda == res_inv(kE, x));
                CHECK(rep.sub_character.exponent == 1 % (p - 1));
                CHECK(rep.quotient_character.lambda == kE->mul(kE->from_int(x), res_inv(kE, w)));
                CHECK(rep.quotient_character.exponent == j % (p - 1));
                CHECK(rep.extension_nonzero);
            }
        }
    }
    // depends only on x1 mod m_E: same outcome for x1 and x1 + p
    OE w1 = OE::from_int(R, 1);
    auto a = reduce_principal(R, OE::from_int(R, 2), OE::from_int(R, p) * w1 * OE::from_int(R, 2).inv_unit(), w1, 2);
    auto b = reduce_principal(R, OE::from_int(R, 7), OE::from_int(R, p) * w1 * OE::from_int(R, 7).inv_unit(), w1, 2);
    CHECK(a.same_outcome(b));
}

TEST_CASE("theorem table, principal case 2: val(x2) = 0") {
    long p = 5;
    auto R = make_padic_ctx(p, 10, 1, 2);
    auto kE = R->kE;
    for (long x : {1L, 2L}) {
        for (long w : {1L, 3L}) {
            long j = 2;
            OE x2 = OE::from_int(R, x);
            OE ww = OE::from_int(R, w);
            auto rep = reduce_principal(R, OE::from_int(R, p) * ww * x2.inv_unit(), x2, ww, j);
            REQUIRE(rep.shape == ReductionShape::triangular_nonsplit);
            // sub = lambda_{x2^-1} omega^{1+j} ; quot = lambda_{x2 w^-1}
            CHECK(rep.sub_character.lambda == res_inv(kE, x));
            CHECK(rep.sub_character.exponent == (1 + j) % (p - 1));
            CHECK(rep.quotient_character.lambda == kE->mul(kE->from_int(x), res_inv(kE, w)));
            CHECK(rep.quotient_character.exponent == 0);
            CHECK(rep.extension_nonzero);
        }
    }
}

TEST_CASE("theorem table, principal case 3: fractional valuations") {
    long p = 3;
    auto R = make_padic_ctx(p, 10, 2, 2);
    OE pi = OE::pi(R);
    long j = 1;
    std::vector<ReductionReport> reps;
    for (long u : {1L, 2L}) {
        for (long w : {1L, 2L}) {
            OE x1 = OE::from_int(R, u) * pi;
            OE ww = OE::from_int(R, w);
            OE x2 = OE::from_int(R, p) * ww * x1.inv_field();
            auto rep = reduce_principal(R, x1, x2, ww, j);
            REQUIRE(rep.shape == ReductionShape::niveau2_irreducible);
            // exponents {1+j, p(1+j)} mod p^2-1
            long e2 = p * p - 1;
            long z = (1 + j) % e2, pz = (p * (1 + j)) % e2;
            bool match = (rep.niveau2_exponents[0] == z && rep.niveau2_exponents[1] == pz) ||
                         (rep.niveau2_exponents[0] == pz && rep.niveau2_exponents[1] == z);
            CHECK(match);
            reps.push_back(rep);
        }
    }
    // independence of x1, x2 (same w-class or not: the inertial data agree)
    for (size_t i = 1; i < reps.size(); ++i) {
        CHECK(reps[0].niveau2_exponents == reps[i].niveau2_exponents);
    }
}

TEST_CASE("theorem table, supercuspidal cases at p=3") {
    long p = 3;
    auto R = make_padic_ctx(p, 10, 1, 2);
    auto kE = R->kE;
    long e2 = p * p - 1;

    SUBCASE("case 1: 1 < i < p is empty at p=3; use p=5") {
        long q = 5;
        auto R5 = make_padic_ctx(q, 10, 1, 2);
        auto k5 = R5->kE;
        long m = 2 + (q + 1) * 1; // i = 2, j = 1
        for (long b : {1L, 2L}) {
            auto reps = reduce_supercuspidal(R5, m, OE::from_int(R5, b), OE::from_int(R5, 1));
            REQUIRE(reps.size() == 1);
            auto& rep = reps[0];
            REQUIRE(rep.shape == ReductionShape::triangular_nonsplit);
            // sub = lambda_{(bw)^-1} omega^{i+j}, quot = lambda_{-b} omega^{1+j}
            CHECK(rep.sub_character.lambda == k5->inv(k5->from_int(b)));
            CHECK(rep.sub_character.exponent == 3); // i+j = 3
            CHECK(rep.quotient_character.lambda == k5->neg(k5->from_int(b)));
            CHECK(rep.quotient_character.exponent == 2); // 1+j
            CHECK(rep.extension_nonzero);
            REQUIRE(rep.peu_ramifie.has_value());
            CHECK(*rep.peu_ramifie); // i = 2
        }
    }

    SUBCASE("case 2: i = 1, val(b) = 0") {
        long m = 1; // i = 1, j = 0
        // roots of c^2 + b c - w^{-1}: distinct for generic b
        auto reps = reduce_supercuspidal(R, m, OE::from_int(R, 1), OE::from_int(R, 1));
        REQUIRE(reps.size() == 1);
        CHECK((reps[0].shape == ReductionShape::split ||
               reps[0].shape == ReductionShape::not_trivial_endomorphisms));
    }

    SUBCASE("case 3: i = p, val(b) = 0, two branches") {
        long m = p; // i = p, j = 0
        // need 1 + 4wb^2 nonzero mod p and square: b=1, w=1: 5 = 2 mod 3,
        // square in F_9-coefficients? sqrt(5) in Z_9... 2 is a nonsquare in F_3
        // but a square in F_9; the square root lives in W(F_9) = O_E. fine.
        auto reps = reduce_supercuspidal(R, m, OE::from_int(R, 1), OE::from_int(R, 1));
        REQUIRE(reps.size() == 2);
        for (auto& rep : reps) {
            REQUIRE(rep.shape == ReductionShape::triangular_nonsplit);
            CHECK(rep.extension_nonzero);
            CHECK(rep.sub_character.exponent == 1); // omega^{1+j}, j = 0
            CHECK(rep.quotient_character.exponent == 1);
        }
        CHECK(reps[0].sub_character == reps[1].quotient_character);
        CHECK(reps[1].sub_character == reps[0].quotient_character);
        // sub = lambda_{b w_-/w}, quot = lambda_{b w_+/w} with w_+- the roots
        // of z^2 - z - 1 = 0 over F_9
        auto roots = kE->quadratic_roots(kE->from_int(-1), kE->from_int(-1));
        REQUIRE(roots.size() == 2);
        bool found = (reps[0].sub_character.lambda == roots[0] && reps[0].quotient_character.lambda == roots[1]) ||
                     (reps[0].sub_character.lambda == roots[1] && reps[0].quotient_character.lambda == roots[0]);
        CHECK(found);
    }

    SUBCASE("case 3 degenerate: 1 + 4wb^2 = 0 mod p") {
        // p=3: 1+4wb^2 = 0 mod 3 iff wb^2 = 2 mod 3: b=1, w=2: 9 = 0 mod 3,
        // and 9 is a square in Z: fine
        auto reps = reduce_supercuspidal(R, p, OE::from_int(R, 1), OE::from_int(R, 2));
        REQUIRE(reps.size() == 1);
        CHECK(reps[0].shape == ReductionShape::not_trivial_endomorphisms);
    }

    SUBCASE("case 4: i > 1, val(b) > 0") {
        long m = 2; // i = 2, j = 0
        std::vector<ReductionReport> all;
        for (long b : {3L, 6L, 9L}) {
            auto reps = reduce_supercuspidal(R, m, OE::from_int(R, b), OE::from_int(R, 1));
            REQUIRE(reps.size() == 1);
            auto& rep = reps[0];
            REQUIRE(rep.shape == ReductionShape::niveau2_irreducible);
            long z1 = (m + p) % e2, z2 = (p * m + 1) % e2;
            bool match = (rep.niveau2_exponents[0] == z1 && rep.niveau2_exponents[1] == z2) ||
                         (rep.niveau2_exponents[0] == z2 && rep.niveau2_exponents[1] == z1);
            CHECK(match);
            all.push_back(rep);
        }
        // independence of b
        for (size_t i2 = 1; i2 < all.size(); ++i2) CHECK(all[0].same_outcome(all[i2]));
    }

    SUBCASE("case 5: i = 1, val(b) > 0") {
        long m = 1 + (p + 1) * 1; // i = 1, j = 1
        std::vector<ReductionReport> all;
        for (long b : {3L, 6L}) {
            // w must be a square: w = 1
            auto reps = reduce_supercuspidal(R, m, OE::from_int(R, b), OE::from_int(R, 1));
            REQUIRE(reps.size() == 1);
            auto& rep = reps[0];
            REQUIRE(rep.shape == ReductionShape::triangular_nonsplit);
            CHECK(rep.extension_nonzero);
            // sub = lambda_{-c^-1} omega^{1+j}, quot = lambda_{c^-1} omega^{1+j}, c^2 = w
            CHECK(rep.sub_character.exponent == (1 + 1) % (p - 1));
            CHECK(rep.quotient_character.exponent == (1 + 1) % (p - 1));
            auto c = kE->inv(rep.quotient_character.lambda);
            CHECK(kE->mul(c, c) == kE->from_int(1));
            CHECK(rep.sub_character.lambda == kE->neg(rep.quotient_character.lambda));
            all.push_back(rep);
        }
        CHECK(all[0].same_outcome(all[1]));
    }
}

TEST_CASE("classification lists at p=3") {
    long p = 3;
    auto R = make_padic_ctx(p, 10, 1, 2);
    SUBCASE("principal") {
        TameType tau{1, 0, 1, 0, p};
        auto forms = classify(R, tau);
        // expected: (omega^{1+i}, omega^j), (omega^{1+j}, omega^i),
        // niveau-2 with z = 1 + {j-i} + (p+1)i = 2
        REQUIRE(forms.size() == 3);
        InertialForm f1{true, 1, 1, std::nullopt, 0};
        InertialForm f2{true, (1 + 1) % (p - 1), 0, std::nullopt, 0}; // omega^{1+j}, omega^i
        InertialForm f3{false, 0, 0, std::nullopt, 0};
        long e2 = p * p - 1;
        long z = 2 % e2;
        f3.niveau2_exp = std::min(z, (z * p) % e2);
        bool has1 = false, has2 = false, has3 = false;
        for (auto& f : forms) {
            if (f == f1) has1 = true;
            if (f == f2) has2 = true;
            if (f == f3) has3 = true;
        }
        CHECK(has1);
        CHECK(has2);
        CHECK(has3);
    }
    SUBCASE("supercuspidal m = 1") {
        TameType tau{2, 0, 0, 1, p};
        auto forms = classify(R, tau);
        // m = 1: i = 1, j = 0: the two reducible forms coincide at
        // (omega^{1+j}, omega^{i+j}) = (omega, omega); the form
        // omega_2^{p+m} (+) omega_2^{1+pm} = {4, 4} is niveau ONE here (p+1
        // divides p+m when i = 1) and its lattice reduction is split, so it
        // does not enter the trivial-endomorphism list; only {1+m, p(1+m)} =
        // {2, 6} survives as a genuine niveau-2 form.
        long e2 = p * p - 1;
        bool has_red = false, has_n4 = false, has_n2 = false;
        for (auto& f : forms) {
            if (f.reducible && f.sub_exp == 1 && f.quot_exp == 1) has_red = true;
            if (!f.reducible && f.niveau2_exp == std::min(4L, 4L * p % e2)) has_n4 = true;
            if (!f.reducible && f.niveau2_exp == std::min(2L, 2L * p % e2)) has_n2 = true;
        }
        CHECK(has_red);
        CHECK(!has_n4);
        CHECK(has_n2);
    }
}

TEST_CASE("no-subalgebra-descent for the Y1 family at p=3") {
    long p = 3;
    auto R = make_padic_ctx(p, 10, 1, 2);
    SdmParams P;
    P.variant = SdmVariant::family_Y1;
    P.R = R;
    P.x1 = OE::from_int(R, 2);
    P.w = OE::from_int(R, 2);
    P.j = 1;
    auto srep = check_no_subalgebra_descent(P);
    for (auto& l : srep.lines) MESSAGE(l);
    CHECK(srep.pass);
    CHECK(srep.hom_dim_total > 0); // maps exist, but all nilpotent-valued
}

TEST_CASE("no-subalgebra-descent for the X1X2 family at p=3") {
    long p = 3;
    auto R = make_padic_ctx(p, 10, 1, 2);
    SdmParams P;
    P.variant = SdmVariant::family_X1X2;
    P.R = R;
    P.w = OE::from_int(R, 1);
    P.j = 1;
    auto srep = check_no_subalgebra_descent(P);
    for (auto& l : srep.lines) MESSAGE(l);
    CHECK(srep.pass);
}

TEST_CASE("corrupted family fails the surjectivity check") {
    long p = 3;
    auto R = make_padic_ctx(p, 10, 1, 2);
    SdmParams P;
    P.variant = SdmVariant::family_X1X2;
    P.R = R;
    P.w = OE::from_int(R, 1);
    P.j = 1;
    auto M = build_sdm(P);
    // corruption: drop the X2 term from the second Fil generator
    auto S = M.S;
    M.fil_gens[1][0] = DPSeries::zero(S);
    auto R2 = make_padic_ctx(p, R->N, 2, 2);
    OE pi = OE::pi(R2);
    OE w2 = OE::from_int(R2, 1);
    auto scalar = reduce_principal(R2, pi, OE::from_int(R2, p) * w2 * pi.inv_field(), w2, P.j);
    auto srep = check_no_subalgebra_descent(M, scalar);
    for (auto& l : srep.lines) MESSAGE(l);
    CHECK(!srep.pass);
}

TEST_CASE("deformation ring answers") {
    long p = 3;
    auto R = make_padic_ctx(p, 10, 1, 2);
    TameType prin{1, 0, 1, 0, p};
    auto a1 = deformation_ring_answer(R, prin, "niveau2");
    CHECK(a1.ring == DefRing::X1X2_quadric);
    CHECK(a1.mu_gal == 2);
    CHECK(a1.surjectivity_pass);
    auto a2 = deformation_ring_answer(R, prin, "other");
    CHECK(a2.ring == DefRing::zero);
    CHECK(a2.mu_gal == 0);
    auto a3 = deformation_ring_answer(R, prin, "red1");
    CHECK(a3.ring == DefRing::power_series_1var);
    CHECK(a3.mu_gal == 1);
    CHECK(a3.surjectivity_pass);
}

TEST_CASE("modular forms dispatch at p=5") {
    long p = 5;
    // slope 0: ordinary shape with unramified quotient lambda_{a_p}
    auto R = make_padic_ctx(p, 10, 1, 2);
    auto kE = R->kE;
    {
        auto rep = modular_form_reduction(R, 1, OE::from_int(R, 2), OE::one(R));
        REQUIRE(rep.shape == ReductionShape::triangular_nonsplit);
        CHECK(rep.quotient_character.lambda == kE->from_int(2));
        CHECK(rep.quotient_character.exponent == 0);
        CHECK(rep.sub_character.exponent == 2); // omega^{j+1}
        CHECK(rep.sub_character.lambda == kE->inv(kE->from_int(2))); // chi_N(p)/a_p = 1/2
    }
    // slope 1
    {
        auto rep = modular_form_reduction(R, 1, OE::from_int(R, 2 * p), OE::one(R));
        REQUIRE(rep.shape == ReductionShape::triangular_nonsplit);
        // sub = lambda_{a_p/p} omega, quot = lambda_{chi_N(p) p/a_p} omega^j
        CHECK(rep.sub_character.exponent == 1);
        CHECK(rep.sub_character.lambda == kE->from_int(2));
        CHECK(rep.quotient_character.exponent == 1);
        CHECK(rep.quotient_character.lambda == kE->inv(kE->from_int(2)));
    }
    // fractional slope: niveau 2
    {
        auto R2 = make_padic_ctx(p, 10, 2, 2);
        auto rep = modular_form_reduction(R2, 1, OE::pi(R2), OE::one(R2));
        REQUIRE(rep.shape == ReductionShape::niveau2_irreducible);
        long e2 = p * p - 1;
        long z = 2, pz = 2 * p % e2;
        bool match = (rep.niveau2_exponents[0] == z && rep.niveau2_exponents[1] == pz) ||
                     (rep.niveau2_exponents[0] == pz && rep.niveau2_exponents[1] == z);
        CHECK(match);
    }
}
