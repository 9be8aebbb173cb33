#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "breuil/dp_series.hpp"

using namespace breuil;

namespace {

struct Rng {
    uint64_t s = 0x2545f4914f6cdd1dull;
    uint64_t next() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return s;
    }
    long uniform(long lo, long hi) { return lo + (long)(next() % (uint64_t)(hi - lo + 1)); }
};

SCtxP mk(long p, int which /*1: F1/Qp, 2: F2/Qp, 3: F2/Qp2*/, int N = 6) {
    FieldDatum fd = which == 1 ? FieldDatum::F1_over_Qp(p)
                  : which == 2 ? FieldDatum::F2_over_Qp(p)
                               : FieldDatum::F2_over_Qp2(p);
    auto R = make_padic_ctx(p, N, 1, fd.f == 2 ? 2 : 1);
    return make_sctx(fd, make_scalar_family(R));
}

DPSeries random_series(SCtxP S, Rng& rng, int terms, int maxdeg) {
    DPSeries s(S);
    for (int i = 0; i < terms; ++i) {
        int j = (int)rng.uniform(0, maxdeg);
        TC c = TC::scalar(S->F, S->fd.f, RElem::from_OE(S->F, OE::from_int(S->R, rng.uniform(-20, 20))));
        if (S->fd.f == 2) c.z[1] = RElem::from_OE(S->F, OE::from_int(S->R, rng.uniform(-20, 20)));
        s.set_coord(j, s.coord(j) + c);
    }
    return s;
}

} // namespace

TEST_CASE("dp multiplication bookkeeping") {
    auto S = mk(5, 1);
    // 1 * s = s
    Rng rng;
    DPSeries s = random_series(S, rng, 8, S->umax / 2);
    CHECK(((DPSeries::one(S) * s) - s).is_zero());
    // (u^e/1!)*(u^e/1!) = 2 * (u^{2e}/2!)
    int e = S->fd.e;
    DPSeries ue = DPSeries::dp_monomial(S, e, TC::scalar(S->F, 1, RElem::one(S->F)));
    DPSeries sq = ue * ue;
    CHECK(sq.coords().size() == 1);
    OE two = OE::from_int(S->R, 2);
    CHECK((sq.coord(2 * e).z[0] - RElem::from_OE(S->F, two)).is_zero());
}

TEST_CASE("E(u)^2 expand oracle") {
    auto S = mk(5, 1);
    // oracle: (u^e + p)^2 = u^{2e} + 2p u^e + p^2, and u^{2e} = 2 (u^{2e}/2!)
    DPSeries E = DPSeries::E(S);
    DPSeries E2 = E * E;
    int e = S->fd.e;
    CHECK((E2.coord(0).z[0].constant() - OE::from_int(S->R, 25)).is_zero());
    CHECK((E2.coord(e).z[0].constant() - OE::from_int(S->R, 10)).is_zero());
    CHECK((E2.coord(2 * e).z[0].constant() - OE::from_int(S->R, 2)).is_zero());
    // expand_by_E: E^2 = 2 * E^2/2!, so q_0 = q_1 = 0, q_2 = 2
    auto q = E2.expand_by_E();
    CHECK(q[0].is_zero());
    CHECK(q[1].is_zero());
    CHECK((q[2].coord(0).z[0].constant() - OE::from_int(S->R, 2)).is_zero());
}

TEST_CASE("expand_by_E examples and reassembly") {
    auto S = mk(3, 1);
    int e = S->fd.e;
    // E -> r0 = 0, r1 = 1
    auto qE = DPSeries::E(S).expand_by_E();
    CHECK(qE[0].is_zero());
    CHECK((qE[1].coord(0).z[0].constant() - OE::one(S->R)).is_zero());
    // u^e = E - p -> q0 = -p, q1 = 1
    DPSeries ue = DPSeries::monomial_OE(S, e, OE::one(S->R));
    auto q = ue.expand_by_E();
    CHECK((q[0].coord(0).z[0].constant() + OE::from_int(S->R, 3)).is_zero());
    CHECK((q[1].coord(0).z[0].constant() - OE::one(S->R)).is_zero());
    // u^{2e}: q0 = p^2, q1 = -2p, q2 = 2  [oracle: expand (E-p)^2 with DP coord 2!]
    DPSeries u2e = DPSeries::monomial_OE(S, 2 * e, OE::one(S->R));
    auto q2 = u2e.expand_by_E();
    CHECK((q2[0].coord(0).z[0].constant() - OE::from_int(S->R, 9)).is_zero());
    CHECK((q2[1].coord(0).z[0].constant() + OE::from_int(S->R, 6)).is_zero());
    CHECK((q2[2].coord(0).z[0].constant() - OE::from_int(S->R, 2)).is_zero());
    // reassembly is the identity, on random series
    Rng rng;
    for (int it = 0; it < 10; ++it) {
        DPSeries s = random_series(S, rng, 12, S->umax);
        auto qq = s.expand_by_E();
        DPSeries back = DPSeries::assemble_by_E(S, qq);
        CHECK((back - s).is_zero());
    }
}

TEST_CASE("fil1 membership") {
    auto S = mk(5, 1);
    CHECK(DPSeries::E(S).fil1_membership());
    CHECK(!DPSeries::one(S).fil1_membership());
    int e = S->fd.e;
    OE p = OE::from_int(S->R, 5);
    DPSeries uep = DPSeries::monomial_OE(S, e, OE::one(S->R)) + DPSeries::constant_OE(S, p);
    DPSeries uem = DPSeries::monomial_OE(S, e, OE::one(S->R)) - DPSeries::constant_OE(S, p);
    CHECK(uep.fil1_membership());
    CHECK(!uem.fil1_membership());
    // ideal property: s in Fil^1 => s*t in Fil^1
    Rng rng;
    for (int it = 0; it < 10; ++it) {
        DPSeries t = random_series(S, rng, 6, S->umax / 2);
        DPSeries st = uep * t;
        CHECK(st.fil1_membership());
    }
}

TEST_CASE("phi and phi1") {
    auto S = mk(5, 1);
    // phi(u) = u^p
    DPSeries u = DPSeries::monomial_OE(S, 1, OE::one(S->R));
    DPSeries up = u.phi();
    CHECK((up - DPSeries::monomial_OE(S, 5, OE::one(S->R))).is_zero());
    // phi(1) = 1
    CHECK((DPSeries::one(S).phi() - DPSeries::one(S)).is_zero());
    // phi1(E) = c = 1 + u^{ep}/p
    DPSeries c = DPSeries::E(S).phi1();
    CHECK((c - DPSeries::c_phi1E(S)).is_zero());
    // phi1(p) = 1
    DPSeries pp = DPSeries::constant_OE(S, OE::from_int(S->R, 5));
    CHECK((pp.phi1() - DPSeries::one(S)).is_zero());
    // multiply-back: p * phi1(s) = phi(s) for s in Fil1
    Rng rng;
    for (int it = 0; it < 6; ++it) {
        DPSeries t = random_series(S, rng, 5, S->umax / 6);
        DPSeries s = DPSeries::E(S) * t;
        CHECK((s.phi1().mul_int(5) - s.phi()).is_zero());
    }
    // phi1(s*t) = phi1(s)*phi(t)
    for (int it = 0; it < 6; ++it) {
        DPSeries t = random_series(S, rng, 4, S->umax / 6);
        DPSeries s = DPSeries::E(S) * random_series(S, rng, 3, S->umax / 6);
        CHECK(((s * t).phi1() - s.phi1() * t.phi()).is_zero());
    }
}

TEST_CASE("monodromy") {
    auto S = mk(5, 1);
    CHECK(DPSeries::one(S).monodromy().is_zero());
    DPSeries u = DPSeries::monomial_OE(S, 1, OE::one(S->R));
    CHECK((u.monodromy() + u).is_zero());
    // N(phi(s)) = p phi(N(s)) on random series
    Rng rng;
    for (int it = 0; it < 10; ++it) {
        DPSeries s = random_series(S, rng, 8, S->umax / 5);
        CHECK((s.phi().monodromy() - s.monodromy().phi().mul_int(5)).is_zero());
    }
    // Leibniz
    for (int it = 0; it < 6; ++it) {
        DPSeries s = random_series(S, rng, 5, S->umax / 2);
        DPSeries t = random_series(S, rng, 5, S->umax / 2);
        CHECK(((s * t).monodromy() - (s.monodromy() * t + s * t.monodromy())).is_zero());
    }
}

TEST_CASE("descent action") {
    for (int which : {1, 2, 3}) {
        auto S = mk(5, which);
        Rng rng;
        DPSeries s = random_series(S, rng, 8, S->umax / 2);
        // identity acts trivially
        CHECK((s.descent(DescentElement::identity()) - s).is_zero());
        // ghat(E) = E for every generator
        CHECK((DPSeries::E(S).descent(DescentElement::g0()) - DPSeries::E(S)).is_zero());
        if (S->fd.has_gphi)
            CHECK((DPSeries::E(S).descent(DescentElement::gphi()) - DPSeries::E(S)).is_zero());
        // u^e fixed by g0
        DPSeries ue = DPSeries::monomial_OE(S, S->fd.e, OE::one(S->R));
        CHECK((ue.descent(DescentElement::g0()) - ue).is_zero());
        // group action: compose on random pairs, including g_phi
        std::vector<DescentElement> gens = {DescentElement::g0(), DescentElement::g0(2)};
        if (S->fd.has_gphi) gens.push_back(DescentElement::gphi());
        for (auto& g1 : gens)
            for (auto& g2 : gens) {
                DPSeries lhs = s.descent(g2).descent(g1);
                DPSeries rhs = s.descent(g1.compose(g2, S->fd));
                CHECK((lhs - rhs).is_zero());
            }
        // g0^e = id, gphi^2 = id, gphi g0 gphi = g0^p
        DescentElement g0e{S->fd.e, 0};
        CHECK((s.descent(g0e) - s).is_zero());
        if (S->fd.has_gphi) {
            auto gphi = DescentElement::gphi();
            auto lhs = s.descent(gphi).descent(DescentElement::g0()).descent(gphi);
            DescentElement g0p{S->fd.p, 0};
            CHECK((lhs - s.descent(g0p)).is_zero());
        }
        // descent commutes with phi and N
        for (auto& g : gens) {
            CHECK((s.phi().descent(g) - s.descent(g).phi()).is_zero());
            CHECK((s.monodromy().descent(g) - s.descent(g).monodromy()).is_zero());
        }
    }
}

TEST_CASE("series inverse") {
    auto S = mk(3, 2);
    Rng rng;
    for (int it = 0; it < 5; ++it) {
        DPSeries s = DPSeries::one(S) + random_series(S, rng, 5, S->umax / 3).shift_u(1);
        DPSeries si = s.inv_unit();
        CHECK(((s * si) - DPSeries::one(S)).is_zero());
    }
}
