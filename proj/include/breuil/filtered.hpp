#pragma once

#include <string>
#include <vector>

#include "breuil/dp_series.hpp"

namespace breuil {

// Rank-2 weakly admissible filtered (phi, N, F/F', E)-modules with N = 0:
//   diagonal:      phi(e1) = x1 e1, phi(e2) = x2 e2  (principal series type)
//   anti-diagonal: phi(e1) = e2,    phi(e2) = x e1   (supercuspidal type)
// Fil^1 (F (x) D) is a free rank-1 line recorded by its generator
// coordinates in F (x) E.

// element of F (x)_{Q_p} E in split coordinates: component mu < f, then
// polynomial of degree < e in the uniformizer, entries in E
struct FE {
    int f = 1;
    int e = 1;
    std::vector<OE> c; // index mu*e + k: coefficient of pi^k in component mu

    static FE zero(PadicCtxP R, int f, int e);
    // (pi^m (x) a) with m arbitrary (wraps via pi^e = -p)
    static FE pi_pow(PadicCtxP R, int f, int e, long m, const OE& a);
    bool is_zero() const;
    FE operator+(const FE& o) const;
    FE operator-(const FE& o) const;
    FE operator*(const FE& o) const; // componentwise, pi^e = -p
    FE mul_OE(const OE& a) const;
    FE mul_pi() const;
    FE project(int mu) const; // idempotent for component mu
};

struct TameType {
    int niveau = 1;
    long i = 0, j = 0; // principal: omega-tilde^i (+) omega-tilde^j (mod p-1)
    long m = 0;        // supercuspidal: omega_2-tilde^m (+) ^pm (mod p^2-1)
    long p = 0;

    bool operator==(const TameType& o) const;
    std::string to_string() const;
};

struct FilteredModule {
    FieldDatum fd; // F1/Qp or F2/Qp
    PadicCtxP R;
    bool antidiag = false;
    OE x1, x2; // diagonal entries; anti-diagonal: phi(e2) = x2 e1 and x1 unused
    // descent characters on e1, e2 as powers of the Teichmuller generator of
    // order e (for F1: omega-tilde exponent; for F2: omega_2-tilde exponent)
    long chi1 = 0, chi2 = 0;
    int niveau = 1;
    long type_i = 0, type_j = 0, type_m = 0;
    // Fil^1 generator: fil1 e1-coordinate, fil2 e2-coordinate in F (x) E
    FE fil1, fil2;
};

FilteredModule build_D_principal(PadicCtxP R, const OE& x1, const OE& x2, long i, long j, bool over_F2);
FilteredModule build_D_supercuspidal(PadicCtxP R, long m, const OE& a, const OE& b, const OE& x);

struct WadmCandidate {
    std::string label;
    long tH_num = 0, tH_den = 1;
    long tN_num = 0, tN_den = 1;
    bool ok = false;
};

struct WadmReport {
    bool admissible = false;
    long tH_num = 0, tH_den = 1; // on D itself
    long tN_num = 0, tN_den = 1;
    std::vector<WadmCandidate> candidates;
};

WadmReport check_weak_admissibility(const FilteredModule& D);

TameType galois_type(const FilteredModule& D);

// Lemma "reducible cases": true iff (val x1 = 0, j = 1, x1^2 = w mod m_E)
// or (val x2 = 0, j = p-2, x2^2 = w mod m_E)
bool is_reducible_degenerate(PadicCtxP R, const OE& x1, const OE& x2, const OE& w, long j);

// rank of a matrix over the fraction field E, precision-aware
int oe_matrix_rank(std::vector<std::vector<OE>> rows);

} // namespace breuil
