#pragma once

#include <stdexcept>
#include <string>

namespace breuil {

// Error taxonomy shared across the library.  Each class corresponds to a
// named failure mode of the exact-arithmetic layer or of a construction
// whose hypotheses are violated.
struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// x not divisible by the requested power of p at current precision.
struct not_divisible : error {
    explicit not_divisible(const std::string& w = "element not divisible by requested power of p") : error(w) {}
};

// an operation would return an element with no certified digits left.
struct precision_exhausted : error {
    explicit precision_exhausted(const std::string& w = "p-adic precision exhausted") : error(w) {}
};

// phi1 applied to an element outside Fil^1.
struct not_in_fil1 : error {
    explicit not_in_fil1(const std::string& w = "element is not in Fil^1") : error(w) {}
};

// exact arithmetic would need a u-degree beyond the working truncation.
struct truncation_overflow : error {
    explicit truncation_overflow(const std::string& w = "required u-degree exceeds working truncation") : error(w) {}
};

// parameters violate the hypotheses of the construction being requested.
struct inadmissible_parameters : error {
    explicit inadmissible_parameters(const std::string& w = "inadmissible parameters") : error(w) {}
};

// a required square root (or quadratic root) does not exist in O_E.
struct no_root_in_E : error {
    explicit no_root_in_E(const std::string& w = "required root does not exist in O_E") : error(w) {}
};

// the two reducible configurations excluded before the rank-2 constructions.
struct degenerate_case : inadmissible_parameters {
    explicit degenerate_case(const std::string& w = "degenerate reducible case") : inadmissible_parameters(w) {}
};

// coefficient map not among the supported specializations.
struct unsupported_map : error {
    explicit unsupported_map(const std::string& w = "unsupported coefficient map") : error(w) {}
};

// rank-1 module shape outside the catalogue.
struct not_recognized : error {
    explicit not_recognized(const std::string& w = "module shape not recognized") : error(w) {}
};

// scalar (non-)type where a nonscalar tame type is required.
struct scalar_type : inadmissible_parameters {
    explicit scalar_type(const std::string& w = "tame type is scalar") : inadmissible_parameters(w) {}
};

// valuation constraints on filtered-module parameters violated.
struct bad_valuation : inadmissible_parameters {
    explicit bad_valuation(const std::string& w = "parameter valuation constraint violated") : inadmissible_parameters(w) {}
};

} // namespace breuil
