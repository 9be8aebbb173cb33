#pragma once

#include "breuil/sdm.hpp"

namespace breuil {

// Reduction reports for the rank-2 lattices: the shape of the mod-m_E
// reduction together with the witnessing morphisms.
enum class ReductionShape {
    triangular_nonsplit,
    split,
    niveau2_irreducible,
    not_trivial_endomorphisms,
};

std::string shape_name(ReductionShape s);

struct ReductionReport {
    long p = 0;
    std::string input_desc;
    ReductionShape shape{};
    CharacterDescriptor sub_character, quotient_character; // reducible shapes
    std::array<long, 2> niveau2_exponents{0, 0};           // mod p^2-1
    SmallField::elt niveau2_unramified = 1;
    bool extension_nonzero = false;
    std::optional<bool> peu_ramifie; // sourced from the theorem statements
    std::string peu_source;
    std::vector<std::string> witnesses;
    std::vector<std::string> field_extensions_used;
    int certified_p_digits = 0;
    int certified_u_degree = 0;

    // equality of the mathematical content (for independence checks)
    bool same_outcome(const ReductionReport& o) const;
};

// principal-series reduction (type 1 (+) omega~^j after the i-twist
// normalization); dispatches on the valuation pattern of (x1, x2)
ReductionReport reduce_principal(PadicCtxP R, const OE& x1, const OE& x2, const OE& w, long j);

// supercuspidal reduction, normalized a = 1, val(b) >= 0; returns one report
// per W-branch (two in the i = p, val(b) = 0, 1+4wb^2 != 0 case)
std::vector<ReductionReport> reduce_supercuspidal(PadicCtxP R, long m, const OE& b, const OE& w);

// an inertial form of Cor-style classification output
struct InertialForm {
    bool reducible = true;
    long sub_exp = 0, quot_exp = 0; // omega-exponents mod p-1
    std::optional<bool> peu;
    long niveau2_exp = 0; // omega_2-exponent z (form z, pz) mod p^2-1

    bool operator==(const InertialForm& o) const;
    std::string to_string(long p) const;
};

// sweep the parameter regimes of the reduction theorems and collect the
// distinct inertial forms of the reductions with trivial endomorphisms
std::vector<InertialForm> classify(PadicCtxP R, const TameType& tau);

struct SurjectivityReport {
    SdmVariant family{};
    bool pass = false;
    std::vector<std::string> lines; // per linear form: hom dimension + nilpotency
    std::string subcharacter;
    int hom_dim_total = 0;
};

// the computational core of the deformation-ring surjectivity: every map
// from the minimal model of the subcharacter into the reduced family module
// lands in the nilpotent part
SurjectivityReport check_no_subalgebra_descent(const SDModule& family_module, const ReductionReport& scalar_report);

// convenience: build the family for a variant and run the check
SurjectivityReport check_no_subalgebra_descent(const SdmParams& family_params);

enum class DefRing { zero, power_series_1var, X1X2_quadric };

struct DefRingAnswer {
    TameType tau;
    std::string rhobar_class; // "red1", "red2", "niveau2", "other"
    DefRing ring{};
    int mu_gal = 0;
    SdmVariant family{};
    bool surjectivity_pass = false;
    std::string surjectivity_note;
};

DefRingAnswer deformation_ring_answer(PadicCtxP R, const TameType& tau, const std::string& rhobar_class,
                                      bool run_surjectivity = true);

// the weight-2 modular-form dispatch: x1 = p/a_p, x2 = a_p/chi_N(p)
ReductionReport modular_form_reduction(PadicCtxP R, long j, const OE& a_p, const OE& chiN_p);

} // namespace breuil
