#pragma once

#include "breuil/breuil_mod.hpp"
#include "breuil/filtered.hpp"
#include "breuil/special_elements.hpp"

namespace breuil {

// Strongly divisible R-modules with tame descent data (weight 2): the
// rank-1 character modules, the rank-2 lattices inside the principal and
// supercuspidal filtered modules, and their one- and two-parameter families.
enum class SdmVariant {
    char_F1,
    char_F2_niv1,
    char_F2_niv2,
    prin_case1,
    prin_case2,
    prin_case3,
    super_general,
    super_i1,
    family_Y1,
    family_Y2,
    family_X1X2,
    family_B,
    family_Bprime,
    family_X,
};

std::string variant_name(SdmVariant v);

struct SdmParams {
    SdmVariant variant{};
    PadicCtxP R;
    int umax = -1;
    int family_r = 0; // 0: per-kind default
    int branch = 1;

    OE x1, x2, w; // principal data (x1 x2 = p w)
    long j = 0;
    long m = 0; // supercuspidal type exponent; i = m mod (p+1) in {1..p}
    OE b;
    OE a; // character unramified parameter
    long chr_exp = 0;
};

struct SDModule {
    SCtxP S;
    int rank = 0;
    std::vector<std::vector<DPSeries>> fil_gens; // [l][i]
    std::vector<std::vector<DPSeries>> phi_mat;  // phi(m_i) = sum_j phi_mat[i][j] m_j
    std::vector<std::vector<DPSeries>> g0_mat;
    std::vector<std::vector<DPSeries>> gphi_mat;
    SdmParams params;

    bool has_embedding = false;
    FilteredModule D;
    std::vector<std::vector<DPSeries>> embed; // m_i = sum_a embed[i][a] e_a
};

SDModule build_sdm(const SdmParams& P);

// matrix application helpers (row convention as above)
std::vector<DPSeries> sdm_apply_phi(const SDModule& M, const std::vector<DPSeries>& coords);
std::vector<DPSeries> sdm_apply_matrix(const SDModule& M, const std::vector<std::vector<DPSeries>>& mat,
                                       const std::vector<DPSeries>& coords, const DescentElement& g,
                                       bool frobenius_twist);
// phi(h)/p for the l-th Fil^1 generator
std::vector<DPSeries> sdm_phi1_fil_gen(const SDModule& M, size_t l);

struct AxiomResult {
    int axiom = 0;
    bool pass = false;
    std::string note;
};

struct SdmReport {
    bool all_pass = false;
    std::vector<AxiomResult> axioms;
    int certified_p_digits = 0;
    int certified_u_degree = 0;
    int monodromy_depth = 0; // u-degree at which the canonical N stabilized
};

SdmReport verify_sdm(const SDModule& M);

// the canonical monodromy matrix nu with N(m_i) = sum nu[i][j] m_j
// (solves N_S(Phi) + Phi nu = p phi(nu) Phi); throws if the defining
// divisions fail
std::vector<std::vector<DPSeries>> sdm_canonical_N(const SDModule& M);

// Fil^1 membership of a coordinate vector (certified at working precision)
bool sdm_in_fil1(const SDModule& M, const std::vector<DPSeries>& coords);

// family specialization at O_E-points of the family variables
SDModule specialize_sdm(const SDModule& M, const std::vector<OE>& values);

// recompute the phi matrix from the embedding data (phi of D on the e-basis
// coordinates, pushed back through the basis matrix); scalar modules only
std::vector<std::vector<DPSeries>> sdm_phi_from_embedding(const SDModule& M);

// embedding consistency (Lemma-style check): phi and descent on the e-basis
// reproduce the attached filtered module, and Fil^1 generators evaluate into
// its Fil^1 line at u = pi
bool sdm_embedding_consistent(const SDModule& M, std::string* why = nullptr);

// structural equality for scalar-coefficient series living in equivalent but
// distinct contexts (same PadicCtx)
bool dps_equal(const DPSeries& a, const DPSeries& b);

// T_0 reduction modulo (m_E + nilpotent-squares): scalar modules land over
// A = k_E, family modules over A = R/(m_R^2, m_E)
BreuilModule reduce_T0(const SDModule& M);

} // namespace breuil
