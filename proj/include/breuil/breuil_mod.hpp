#pragma once

#include <optional>

#include "breuil/dp_series.hpp"
#include "breuil/linalg_fp.hpp"

namespace breuil {

// Finite local coefficient algebras A = k_E (+) V with V^2 = 0: covers k_E,
// k_E[Y]/(Y^2), k_E[B]/(B^2), k_E[X1,X2]/(X1^2, X1X2, X2^2) and quotients by
// a linear form.
struct ACtx {
    FFp kE;
    int nnil = 0;
    std::array<std::string, 2> nil_names{"", ""};
};
using ACtxP = std::shared_ptr<const ACtx>;
ACtxP make_actx(FFp kE, int nnil = 0, const std::string& n0 = "X", const std::string& n1 = "");

struct AElt {
    SmallField::elt c0 = 0;
    std::array<SmallField::elt, 2> nil{0, 0};
};

// base ring B = (k_F (x) A)[u]/u^{ep} in split coordinates
struct BCtx {
    FieldDatum fd;
    ACtxP A;
    int ep;
    SmallField::elt thetabar; // reduction of the Teichmuller generator, order e

    AElt a_add(const AElt& x, const AElt& y) const;
    AElt a_sub(const AElt& x, const AElt& y) const;
    AElt a_mul(const AElt& x, const AElt& y) const;
    AElt a_scale(SmallField::elt c, const AElt& x) const;
    AElt a_one() const { return AElt{1, {0, 0}}; }
    bool a_zero(const AElt& x) const { return x.c0 == 0 && x.nil[0] == 0 && x.nil[1] == 0; }
    bool a_unit(const AElt& x) const { return x.c0 != 0; }
    AElt a_inv(const AElt& x) const;
    bool a_nilpotent(const AElt& x) const { return x.c0 == 0; }
};
using BCtxP = std::shared_ptr<const BCtx>;
BCtxP make_bctx(FieldDatum fd, ACtxP A, PadicCtxP R_for_theta);

// element of B, flat index mu*ep + d
struct BElt {
    BCtxP B;
    std::vector<AElt> c;

    static BElt zero(BCtxP B);
    static BElt one(BCtxP B);
    static BElt monomial(BCtxP B, int deg, const AElt& a); // a u^deg on all components
    static BElt scalar(BCtxP B, const AElt& a) { return monomial(B, 0, a); }
    // distinct values per component
    static BElt component_scalar(BCtxP B, const std::vector<AElt>& per_mu);

    bool is_zero() const;
    bool is_unit() const; // constant coefficient a unit in every component
    BElt operator+(const BElt& o) const;
    BElt operator-(const BElt& o) const;
    BElt operator-() const;
    BElt operator*(const BElt& o) const;
    BElt scale(SmallField::elt c) const;
    BElt shift_u(int k) const;           // multiply by u^k
    BElt twist() const;                  // h -> h^(p): Frobenius on k_F, u -> u^p, A-linear
    BElt descent(const DescentElement& g) const;
    bool nilpotent_valued() const; // all coefficients in the nilradical
    int u_order() const;           // min degree with nonzero coefficient (ep if zero)
    std::string to_string() const;
};

// A Breuil module with descent data and A-action.
//   Fil^1 M' = sum_l B gen_l + u^e M'
// phi1 is recorded on the generators and on the distinguished elements
// u^e m_i (rows of phibar); the expression machinery certifies that these
// choices glue to a well-defined phi1 on Fil^1.
struct BreuilModule {
    BCtxP B;
    int rank = 0;
    std::vector<std::vector<BElt>> gens;      // gens[l][i]: coordinate of gen_l on m_i
    std::vector<std::vector<BElt>> phi1_gens; // phi1(gen_l) coordinates
    std::vector<std::vector<BElt>> phibar;    // phibar[i][j]: phi1(u^e m_i) coordinates
    std::vector<std::vector<BElt>> g0_mat;    // ghat0(m_i) = sum_j g0_mat[i][j] m_j
    std::vector<std::vector<BElt>> gphi_mat;  // only when fd.has_gphi
    // niveau-1 descent twist for the character catalogue (informational)
    std::string label;

    bool operator==(const BreuilModule& o) const;
};

// precomputed linear data: mod-u^e row reduction of the generator matrix,
// syzygy certificates, and phi1 as an explicit k_E-linear operation
class BreuilOps {
  public:
    explicit BreuilOps(const BreuilModule& M);

    const BreuilModule& mod() const { return *M_; }
    // full k_E-dimension of the ambient module M' (rank * dim B)
    int ambient_dim() const;
    // membership of x (coords) in Fil^1
    bool in_fil1(const std::vector<BElt>& x) const;
    // phi1 of x in Fil^1 (throws not_in_fil1)
    std::vector<BElt> phi1(const std::vector<BElt>& x) const;
    // the same as a linear extension: pivot-based quasi-solution, valid on
    // Fil^1 and linear everywhere (for constraint assembly)
    std::vector<BElt> phi1_linear(const std::vector<BElt>& x) const;
    // well-definedness certificate: all syzygy routes agree
    bool phi1_well_defined() const { return well_defined_; }
    // phi1(Fil^1) generates M' (per-component Nakayama)
    bool phi1_generates() const;
    // residual rows of the mod-u^e membership system (zero iff in Fil^1)
    std::vector<SmallField::elt> membership_residual(const std::vector<BElt>& x) const;
    // apply descent generator to a coordinate vector
    std::vector<BElt> descent(const std::vector<BElt>& x, bool use_gphi) const;
    std::vector<BElt> apply_matrix_semilinear(const std::vector<std::vector<BElt>>& mat,
                                              const std::vector<BElt>& x, const DescentElement& g) const;

  private:
    const BreuilModule* M_;
    bool well_defined_ = true;
    int e_ = 0, f_ = 0, dimA_ = 0, blk_ = 0;
    int ncols_ = 0, nrows_ = 0;
    std::shared_ptr<const Echelon> ech_;

    std::vector<SmallField::elt> flatten_mod_ue(const std::vector<BElt>& x) const;
    std::optional<std::vector<SmallField::elt>> solve0(const std::vector<BElt>& x) const;
    std::vector<BElt> phi1_with_beta(const std::vector<BElt>& x, const std::vector<SmallField::elt>& beta) const;
};

// morphisms of Breuil modules with descent data and A-action: returns a
// k_E-basis of Hom(M, N) as matrices C with f(m_i) = sum_j C[i][j] n_j;
// precomputed BreuilOps may be supplied to amortize repeated searches
std::vector<std::vector<std::vector<BElt>>> find_morphisms(const BreuilModule& M, const BreuilModule& N,
                                                           const BreuilOps* opsM = nullptr,
                                                           const BreuilOps* opsN = nullptr);

// direct re-verification of a candidate morphism (independent of the solver)
bool morphism_check(const BreuilModule& M, const BreuilModule& N, const std::vector<std::vector<BElt>>& C);
bool morphism_check_with(const BreuilModule& M, const BreuilModule& N, const std::vector<std::vector<BElt>>& C,
                         const BreuilOps& opsN);

// brute-force enumeration (oracle); search space must be <= 2^20
std::vector<std::vector<std::vector<BElt>>> find_morphisms_bruteforce(const BreuilModule& M, const BreuilModule& N);
long morphism_search_space_log2(const BreuilModule& M, const BreuilModule& N);

// the standard rank-1 modules of the character catalogue
enum class Rank1Variant { F1_Qp, F2_Qp, F2_Qp2 };
BreuilModule standard_rank1(BCtxP B, SmallField::elt abar_inv, long exponent);
BreuilModule minimal_rank1(BCtxP B, SmallField::elt abar_inv, long exponent);

struct CharacterDescriptor {
    bool over_Qp2 = false; // base group
    int niveau = 1;
    long exponent = 0; // omega- or omega_2-exponent of the character
    // unramified parameter: the value of the character on arithmetic
    // Frobenius of the base field.  Over Q_{p^2} this is the square of the
    // phi_1-parameter (Frob_{p^2} = Frob_p^2), which is exactly the invariant
    // of the isomorphism class: the modules for a and -a are isomorphic there.
    SmallField::elt lambda = 1;
    long p = 0;

    bool operator==(const CharacterDescriptor& o) const;
    std::string to_string(const SmallField& kE) const;
};

// identify the character of a rank-1 module with Fil^1 = u^c M'
CharacterDescriptor character_of_rank1(const BreuilModule& M);

bool is_maximal_model(const BreuilModule& M);
bool is_minimal_model(const BreuilModule& M);

BreuilModule restrict_descent(const BreuilModule& M);

// base change along A -> A' (quotient by a linear form in the nilpotents,
// or nil-variable renaming/extension)
BreuilModule quotient_by_linear_form(const BreuilModule& M, SmallField::elt c0, SmallField::elt c1);
// extend scalars from A = k_E to A' (k_E-algebra map)
BreuilModule extend_coefficients(const BreuilModule& M, ACtxP Anew);
// quotient by the whole nilradical: A -> k_E
BreuilModule kill_nilpotents(const BreuilModule& M);

} // namespace breuil
