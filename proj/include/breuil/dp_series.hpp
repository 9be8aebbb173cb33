#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "breuil/coeff.hpp"

namespace breuil {

// The tamely ramified fields of the constructions.  F1 = Q_p(pi) with
// pi^(p-1) = -p over Q_p; F2 = Q_{p^2}(w) with w^(p^2-1) = -p over Q_p or
// over Q_{p^2}.  e is the ramification index, f the residue degree, and
// has_gphi records whether the descent group contains the Frobenius element
// g_phi (true exactly for F2/Q_p, where Gal(F2/Q_p) = <g0> x| <g_phi> with
// g_phi g g_phi = g^p).
struct FieldDatum {
    long p = 0;
    int e = 0;
    int f = 1;
    bool has_gphi = false;

    static FieldDatum F1_over_Qp(long p) { return {p, (int)(p - 1), 1, false}; }
    static FieldDatum F2_over_Qp(long p) { return {p, (int)(p * p - 1), 2, true}; }
    static FieldDatum F2_over_Qp2(long p) { return {p, (int)(p * p - 1), 2, false}; }

    bool operator==(const FieldDatum& o) const {
        return p == o.p && e == o.e && f == o.f && has_gphi == o.has_gphi;
    }
    std::string name() const;
};

// g = g0^twist * gphi^frob, where g0 generates Gal(F/F'(unramified part)) of
// order e with hat(g0)(u) = theta*u, theta the fixed Teichmuller generator.
struct DescentElement {
    long twist = 0;
    int frob = 0;

    static DescentElement identity() { return {0, 0}; }
    static DescentElement g0(long a = 1) { return {a, 0}; }
    static DescentElement gphi() { return {0, 1}; }

    // group law: (a,s)(b,t) = (a + b p^s mod e, s+t mod 2)
    DescentElement compose(const DescentElement& o, const FieldDatum& fd) const;
};

// Coefficient of a DP series: an element of W(k_F) (x) R in split
// (embedding-indexed) coordinates, one R-component per embedding of k_F
// into k_E.  Frobenius on W(k_F) is the cyclic shift of components.
struct TC {
    int f = 1;
    std::array<RElem, 2> z;

    static TC scalar(FamilyCtxP F, int f, const RElem& a);
    static TC from_components(const RElem& a, const RElem& b);
    bool is_zero() const;
    int min_abs_prec() const;
    TC operator+(const TC& o) const;
    TC operator-(const TC& o) const;
    TC operator-() const;
    TC operator*(const TC& o) const;
    TC mul_relem(const RElem& a) const;
    TC mul_OE(const OE& a) const;
    TC mul_int(long n) const;
    TC frob_shift(int s) const; // Frobenius^s on the W(k_F)-side
    TC divide_exact_p(int k) const;
    TC inv_unit() const;
    bool is_unit() const;
};

// Ambient data for S_{F,R}: field datum, coefficient family ring, working
// truncation (coordinates of u^j/floor(j/e)! kept for j <= umax), and the
// Teichmuller generator theta of exact order e used by the descent action.
struct SCtx {
    FieldDatum fd;
    FamilyCtxP F;
    PadicCtxP R;
    int umax;
    OE theta;

    std::vector<long> fact_val;   // vp(k!) for k <= umax/e + p + 2
    std::vector<OE> fact_unit;    // unit part of k!

    SCtx(FieldDatum fd, FamilyCtxP F, int umax);
    // k1!/k2! as an exact OE (k1 >= k2)
    OE fact_ratio(long k1, long k2) const;
    // n!/(a! b!) with a + b <= n: the integral DP product factor
    OE dp_factor(long n, long a, long b) const;
    OE theta_pow(long k) const; // theta^(k mod e)

    std::vector<std::vector<OE>> binom; // Pascal table up to umax/e + p + 2
};

using SCtxP = std::shared_ptr<const SCtx>;
SCtxP make_sctx(FieldDatum fd, FamilyCtxP F, int umax = -1);

// Element of S_{F,R} in canonical divided-power coordinates: the stored
// value r_j is the coordinate of u^j / floor(j/e)!.  Absent keys are exact
// (structural) zeros; present keys carry their own certified precision.
class DPSeries {
  public:
    DPSeries() = default;
    explicit DPSeries(SCtxP S) : S_(std::move(S)) {}

    static DPSeries zero(SCtxP S) { return DPSeries(S); }
    static DPSeries one(SCtxP S);
    static DPSeries constant(SCtxP S, const TC& c);
    static DPSeries constant_relem(SCtxP S, const RElem& c);
    static DPSeries constant_OE(SCtxP S, const OE& c);
    // c * u^k (plain monomial)
    static DPSeries monomial(SCtxP S, int k, const TC& c);
    static DPSeries monomial_OE(SCtxP S, int k, const OE& c);
    // c * u^k / floor(k/e)! (DP basis monomial)
    static DPSeries dp_monomial(SCtxP S, int k, const TC& c);
    // E(u) = u^e + p
    static DPSeries E(SCtxP S);
    // c = phi1(E(u)) = 1 + u^{ep}/p
    static DPSeries c_phi1E(SCtxP S);

    SCtxP sctx() const { return S_; }
    bool defined() const { return S_ != nullptr; }
    const std::map<int, TC>& coords() const { return r_; }
    // canonical coordinate r_j (exact zero if absent)
    TC coord(int j) const;
    void set_coord(int j, const TC& c);
    // plain u^j-coefficient r_j / floor(j/e)! (may acquire a negative p-shift)
    TC plain_coeff(int j) const;

    bool is_zero() const;
    // min over stored coordinates of certified absolute p-precision
    int cert_prec() const;

    DPSeries operator+(const DPSeries& o) const;
    DPSeries operator-(const DPSeries& o) const;
    DPSeries operator-() const;
    DPSeries operator*(const DPSeries& o) const;
    DPSeries mul(const DPSeries& o, bool demand_exact) const;
    DPSeries mul_tc(const TC& c) const;
    DPSeries mul_relem(const RElem& c) const;
    DPSeries mul_OE(const OE& c) const;
    DPSeries mul_int(long n) const;
    // multiply by plain u^k
    DPSeries shift_u(int k) const;

    DPSeries phi() const;
    DPSeries phi1() const;       // throws not_in_fil1
    DPSeries monodromy() const;  // N
    DPSeries descent(const DescentElement& g) const;
    DPSeries divide_exact_p(int k) const;
    DPSeries inv_unit() const;

    // unique rewriting sum q_i(u) E^i/i!; returns q_i as polynomial series
    // (degrees < e), index i from 0 upward
    std::vector<DPSeries> expand_by_E() const;
    static DPSeries assemble_by_E(SCtxP S, const std::vector<DPSeries>& q);
    bool fil1_membership() const;

    // reduce the series modulo p into (k_F (x) A)[u]/u^{ep}; declared in
    // breuil_mod.hpp (needs the mod-p containers)

    std::string to_string() const;

  private:
    SCtxP S_;
    std::map<int, TC> r_;
    void add_coord(int j, const TC& c);
};

} // namespace breuil
