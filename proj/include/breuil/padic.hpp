#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "breuil/errors.hpp"
#include "breuil/smallfield.hpp"

namespace breuil {

// Exact arithmetic in O_E = W(k_E)[pi]/(pi^eE + p) with per-element precision
// tracking, where W(k_E) = Z_p[t]/(t^2 - d) for k_E = GF(p^2) (d the least
// quadratic nonresidue mod p, lifted), or Z_p itself for k_E = GF(p).
//
// An element is p^shift * I where I has Witt coordinates known modulo
// p^prec.  Absolute knowledge: the value is pinned modulo p^{shift+prec} O_E.
// Division by p adjusts shift, so relative precision survives divisions and
// the absolute precision drops by exactly the number of divided digits.
struct PadicCtx {
    long p;
    int N;    // default relative precision in p-digits
    int eE;   // Eisenstein degree of O_E over W(k_E): pi^eE = -p (eE in {1,2})
    int fE;   // residue degree of k_E over F_p (fE in {1,2})
    long d;   // lifted quadratic nonresidue for W(k_E), fE = 2
    FFp kE;

    PadicCtx(long p_, int N_, int eE_, int fE_);

    uint64_t ppow(int k) const; // p^k as uint64, k <= pmax_
    int pmax() const { return pmax_; }

  private:
    std::array<uint64_t, 64> pw_;
    int pmax_;
};

using PadicCtxP = std::shared_ptr<const PadicCtx>;
PadicCtxP make_padic_ctx(long p, int N, int eE, int fE);

class OE {
  public:
    OE() : R_(nullptr), shift_(0), prec_(0) { c_.fill(0); }
    // zero at context precision
    explicit OE(PadicCtxP R);
    static OE from_int(PadicCtxP R, long n);
    static OE zero(PadicCtxP R) { return OE(R); }
    static OE one(PadicCtxP R) { return from_int(R, 1); }
    static OE pi(PadicCtxP R); // the Eisenstein uniformizer (eE = 2), else -p... eE=1: pi = p? see impl
    static OE witt_t(PadicCtxP R); // the Witt generator t (fE = 2)
    // p^(num/den) * unit with den | eE; num/den is the valuation of the result
    static OE with_valuation(PadicCtxP R, long num, long den, const OE& unit);

    PadicCtxP ctx() const { return R_; }
    bool valid() const { return R_ != nullptr; }

    int shift() const { return shift_; }
    int prec() const { return prec_; } // relative digits of the integral part
    int abs_prec() const { return shift_ + prec_; }

    // true when every coordinate vanishes at current precision (value is
    // indistinguishable from zero modulo p^{abs_prec})
    bool is_zero() const;
    // exact valuation as (num, den) with den = eE; requires a visible nonzero
    // digit, otherwise nullopt (valuation >= abs_prec only known as bound)
    std::optional<std::pair<long, long>> valuation() const;
    bool is_unit() const;

    OE operator+(const OE& o) const;
    OE operator-(const OE& o) const;
    OE operator-() const;
    OE operator*(const OE& o) const;
    OE& operator+=(const OE& o) { return *this = *this + o; }
    OE& operator-=(const OE& o) { return *this = *this - o; }
    OE& operator*=(const OE& o) { return *this = *this * o; }

    OE mul_int(long n) const;
    OE pow(long n) const;

    // x / p^k; throws not_divisible / precision_exhausted
    OE divide_exact_p(int k) const;
    // x * p^k as a field element (k may be negative); exact, no divisibility check
    OE shift_p(int k) const;
    // x / pi; throws as above
    OE divide_exact_pi() const;
    // multiplicative inverse; requires unit
    OE inv_unit() const;
    // field inverse of any nonzero element (possibly fractional valuation)
    OE inv_field() const;
    // square root; throws no_root_in_E
    OE sqrt() const;

    // W(k_E)-Frobenius t -> -t (extended pi-linearly)
    OE witt_frobenius() const;

    // Teichmuller lift of a residue-field element
    static OE teichmuller(PadicCtxP R, SmallField::elt a);

    // reduction modulo m_E into k_E
    SmallField::elt residue() const;

    // reduce the relative precision to n digits (n <= prec)
    OE truncated_to(int n) const;

    // compare at the shared certified precision
    bool equal_at_shared_prec(const OE& o) const { return (*this - o).is_zero(); }

    std::string to_string() const;

    // raw access (normalized representative), used by serialization
    uint64_t coord(int i, int j) const { return c_[idx(i, j)]; }

  private:
    PadicCtxP R_;
    int shift_;
    int prec_;
    std::array<uint64_t, 4> c_; // c_[i*2+j] = coefficient of pi^i t^j

    static int idx(int i, int j) { return i * 2 + j; }
    void reduce_mod_prec();
    // strip common p factors from coordinates into shift
    void normalize();
    friend OE raw_make(PadicCtxP R, int shift, int prec, const std::array<uint64_t, 4>& c);
};

OE raw_make(PadicCtxP R, int shift, int prec, const std::array<uint64_t, 4>& c);

// vp of an integer (n != 0)
int int_valp(long n, long p);

// n1! / n2! as an OE (integral; n1 >= n2)
OE factorial_ratio(PadicCtxP R, long n1, long n2);
// vp(n!)
long factorial_valp(long n, long p);

} // namespace breuil
