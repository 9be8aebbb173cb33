#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "breuil/breuil_mod.hpp"

using namespace breuil;

namespace {

BCtxP mkB(long p, int which, int nnil = 0, int fk = -1) {
    FieldDatum fd = which == 1 ? FieldDatum::F1_over_Qp(p)
                  : which == 2 ? FieldDatum::F2_over_Qp(p)
                               : FieldDatum::F2_over_Qp2(p);
    if (fk < 0) fk = fd.f == 2 ? 2 : 1;
    auto A = make_actx(make_field(p, fk), nnil);
    return make_bctx(fd, A, nullptr);
}

} // namespace

TEST_CASE("standard and minimal rank-1 models") {
    auto B = mkB(5, 1);
    auto M = standard_rank1(B, 2, 3);
    CHECK(is_maximal_model(M));
    CHECK(!is_minimal_model(M));
    auto chi = character_of_rank1(M);
    CHECK(chi.niveau == 1);
    CHECK(chi.exponent == (3 + 1) % 4);       // j + 1 mod (p-1)
    CHECK(chi.lambda == B->A->kE->inv(2));    // lambda_{a} with a^{-1} = 2

    // minimal model of the same character round-trips
    auto Mn = minimal_rank1(B, 2, chi.exponent); // descent exponent = char exponent
    CHECK(is_minimal_model(Mn));
    CHECK(!is_maximal_model(Mn));
    auto chi2 = character_of_rank1(Mn);
    CHECK(chi2 == chi);
    // and a nonzero morphism min -> max exists (maximality)
    CHECK(!find_morphisms(Mn, M).empty());
    CHECK(find_morphisms(M, Mn).empty()); // no nonzero map max -> min here
}

TEST_CASE("a_bar = 1, j = 0 gives the cyclotomic character") {
    auto B = mkB(5, 1);
    auto M = standard_rank1(B, 1, 0);
    auto chi = character_of_rank1(M);
    CHECK(chi.lambda == 1);
    CHECK(chi.exponent == 1);
    // j = p-2, a = 1: character = omega^{p-1} = trivial exponent
    auto M2 = standard_rank1(B, 1, 3);
    auto chi3 = character_of_rank1(M2);
    CHECK(chi3.exponent % 4 == 0);
}

TEST_CASE("F2 standard models") {
    auto B = mkB(5, 2);
    // niveau-1 over F2/Qp with omega-exponent j: theta-exponent (p+1) j
    auto M = standard_rank1(B, 3, 6 * 2);
    auto chi = character_of_rank1(M);
    CHECK(!chi.over_Qp2);
    CHECK(chi.niveau == 1);
    CHECK(chi.exponent == 3); // j + 1 with j = 2
    auto B2 = mkB(5, 3);
    auto M2 = standard_rank1(B2, 3, 7);
    auto chi2 = character_of_rank1(M2);
    CHECK(chi2.over_Qp2);
    CHECK(chi2.niveau == 2);
    CHECK(chi2.exponent == (7 + 5 + 1) % 24);
}

TEST_CASE("hom spaces contain scalars and match brute force") {
    auto B = mkB(3, 1);
    for (long ai : {1L, 2L}) {
        for (long j : {0L, 1L}) {
            auto M = standard_rank1(B, (SmallField::elt)ai, j);
            auto homs = find_morphisms(M, M);
            // endomorphisms: k_E-scalars at least
            CHECK(homs.size() >= 1);
            auto bf = find_morphisms_bruteforce(M, M);
            CHECK(bf.size() >= 1);
            // spans agree: brute force finds q^dim - 1 nonzero multiples? it
            // enumerates all matrices; compare dimensions by counting
            // brute-force solutions = q^dim (including 0)
            size_t qdim = 1;
            for (size_t k = 0; k < homs.size(); ++k) qdim *= 3;
            CHECK(bf.size() == qdim);
        }
    }
}

TEST_CASE("restriction of descent data") {
    auto B = mkB(5, 2);
    auto M = standard_rank1(B, 2, 12); // omega-exp 2 over F2/Qp
    auto Mr = restrict_descent(M);
    CHECK(!Mr.B->fd.has_gphi);
    auto chi = character_of_rank1(Mr);
    CHECK(chi.over_Qp2);
    // restriction of lambda_a omega^{j+1}: omega_2-exponent (p+1)(j+1)
    CHECK(chi.exponent == (6 * 3) % 24);
    CHECK(chi.niveau == 1);
}

TEST_CASE("brute force agrees on min -> max pairs") {
    auto B = mkB(3, 1);
    auto Mx = standard_rank1(B, 2, 1);
    auto Mn = minimal_rank1(B, 2, 2); // same character: exp 2 = 1 + 1
    auto fast = find_morphisms(Mn, Mx);
    auto bf = find_morphisms_bruteforce(Mn, Mx);
    size_t qdim = 1;
    for (size_t k = 0; k < fast.size(); ++k) qdim *= 3;
    CHECK(bf.size() == qdim);
    CHECK(fast.size() == 1);
    // Fil-degree bookkeeping: the map is e |-> lambda u^{p(e-c)/(p-1)} = u^3
    CHECK(fast[0][0][0].u_order() == 3);
}

TEST_CASE("morphisms with nilpotent coefficients") {
    auto B = mkB(3, 1, 1); // A = k_E[X]/(X^2)
    auto M = standard_rank1(B, 1, 1);
    auto homs = find_morphisms(M, M);
    // A-module endomorphisms: dimension 2 over k_E (1 and X)
    CHECK(homs.size() == 2);
    auto bf = find_morphisms_bruteforce(M, M);
    size_t qdim = 1;
    for (size_t k = 0; k < homs.size(); ++k) qdim *= 3;
    CHECK(bf.size() == qdim);
}
