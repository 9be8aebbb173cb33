#pragma once

#include <memory>
#include <string>
#include <vector>

#include "breuil/padic.hpp"

namespace breuil {

// Coefficient rings R for strongly divisible R-modules: O_E itself and the
// truncated family rings of the lattice families,
//   O_E[Y]/(Y^r), O_E[B]/(B^r),
//   O_E[[X1,X2]]/(X1 X2 - pw) modulo (X1,X2)^r.
//
// The two-variable ring is not a polynomial quotient: X1^a X2^b rewrites to
// (pw)^min(a,b) X^(a-b), so p-powers and variable degrees mix.  Truncation at
// total degree r is handled as precision: dropped monomials are recorded by
// a tail flag, and retained coordinates of products with unknown tails are
// capped at the p-precision r - deg forced by the rewrite rule.
enum class FamilyKind { scalar, Y, B, X1X2 };

struct FamilyCtx {
    FamilyKind kind;
    int r; // variable truncation degree (monomials of degree < r are kept)
    PadicCtxP R;
    OE pw; // X1*X2 = pw (X1X2 kind only)

    int ncoords() const;
    std::string var_name(int which) const;
};

using FamilyCtxP = std::shared_ptr<const FamilyCtx>;
FamilyCtxP make_scalar_family(PadicCtxP R);
FamilyCtxP make_family(FamilyKind kind, int r, PadicCtxP R, const OE& pw = OE());

class RElem {
  public:
    RElem() = default;
    explicit RElem(FamilyCtxP F);
    static RElem from_OE(FamilyCtxP F, const OE& c);
    static RElem zero(FamilyCtxP F) { return RElem(F); }
    static RElem one(FamilyCtxP F) { return from_OE(F, OE::one(F->R)); }
    static RElem variable(FamilyCtxP F, int which); // 0 = Y/B/X1, 1 = X2

    FamilyCtxP ctx() const { return F_; }
    bool valid() const { return F_ != nullptr; }

    const OE& coord(int i) const { return c_[i]; }
    OE& coord(int i) { return c_[i]; }
    int ncoords() const { return (int)c_.size(); }
    bool tail_zero() const { return tail_zero_; }
    // certified variable degree: coordinates of degree >= rcert carry no
    // information (divisions may lower this below the ring truncation)
    int rcert() const { return rcert_; }

    bool is_zero() const;
    bool is_unit() const; // constant coordinate a unit

    RElem operator+(const RElem& o) const;
    RElem operator-(const RElem& o) const;
    RElem operator-() const;
    RElem operator*(const RElem& o) const;
    RElem mul_int(long n) const;
    RElem mul_OE(const OE& a) const;

    RElem divide_exact_p(int k) const;
    RElem shift_p(int k) const;
    RElem inv_unit() const;
    RElem pow(long n) const;
    // square root with unit constant term (Newton from the O_E root);
    // sign convention follows OE::sqrt on the constant
    RElem sqrt_unit() const;
    // throws error if any coordinate has negative valuation
    void assert_integral(const std::string& what) const;
    // lower rcert past positive-degree coordinates whose integrality can no
    // longer be certified (zero at nonpositive precision); genuinely
    // non-integral coordinates still throw
    RElem degrade_uncertified(const std::string& what) const;

    // evaluation of family variables at O_E points (vals[i] substituted for
    // variable i); for X1X2 requires vals[0]*vals[1] = pw
    OE evaluate(const std::vector<OE>& vals) const;

    // the constant-term O_E element (image under vars -> 0); for X1X2 this is
    // only the coordinate, not a ring map
    const OE& constant() const { return c_[0]; }

    int min_prec() const;
    std::string to_string() const;

  private:
    FamilyCtxP F_;
    std::vector<OE> c_;
    bool tail_zero_ = true;
    int rcert_ = 1 << 20;

    // degree of the i-th basis monomial
    int coord_degree(int i) const;
    void cap_precision_from_tail();
    friend RElem relem_raw(FamilyCtxP F, std::vector<OE> c, bool tail_zero, int rcert);
};

RElem relem_raw(FamilyCtxP F, std::vector<OE> c, bool tail_zero, int rcert = 1 << 20);

} // namespace breuil
