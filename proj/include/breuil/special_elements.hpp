#pragma once

#include "breuil/dp_series.hpp"

namespace breuil {

// The fixed-point elements of S_{F1,R} and S_{F2,R} used by the rank-2
// lattice constructions:
//
//   V_x = 1 + (x^2/w) u^{p(p-1)(j-1)} (u^{e1 p}/p + 1) phi(V_x)
//   U_x = 1 + (x^2/w) u^{p(p-1)(p-2-j)} (u^{e1 p}/p + 1) phi(U_x)
//   V'_x, U'_x: the same over F2 with u replaced by u^{p+1}
//   W   = -(1(x)w) + (1 + u^{p e2}/p) (1(x)b^2) W phi(W) u^{p e2 (p-i)}
//   X (1(x)wb) = 1(x)w - (1 + u^{p e2}/p) X phi(X)
//
// Solvers run a coefficient recursion with exact denominators and return the
// result in integral canonical DP coordinates, together with the precision
// and truncation at which the defining equation was re-verified.
enum class ElementKind { V, U, Vprime, Uprime, W, X };

std::string kind_name(ElementKind k);

struct SpecialElementSpec {
    ElementKind kind;
    FieldDatum fd;
    RElem x_or_b;
    RElem w;
    int j = 0;      // V/U family exponent parameter
    int i = 0;      // W exponent parameter (1..p)
    int branch = 1; // +1/-1: root branch for W (i=p, val b=0) and X constant
};

struct SpecialElement {
    SpecialElementSpec spec;
    DPSeries series;
    int certified_truncation = 0;
    int certified_p_digits = 0;
};

SpecialElement solve_V(SCtxP S, const RElem& x, const RElem& w, int j);
SpecialElement solve_U(SCtxP S, const RElem& x, const RElem& w, int j);
SpecialElement solve_Vprime(SCtxP S, const RElem& x, const RElem& w, int j);
SpecialElement solve_Uprime(SCtxP S, const RElem& x, const RElem& w, int j);
SpecialElement solve_W(SCtxP S, const RElem& b, const RElem& w, int i, int branch = 1);
SpecialElement solve_X(SCtxP S, const RElem& b, const RElem& w, int branch = 1);

// residual of the defining functional equation (zero iff solved), usable as
// an independent check of any candidate series
DPSeries residual_of(const SpecialElementSpec& spec, const DPSeries& s);

// roots of the constant-term quadratic b^2 z^2 - z - w = 0 in R.
// For val(b) > 0 only the Hensel branch z = -w - ... exists as a power
// series; for val(b) = 0 both branches exist when 1 + 4wb^2 is a square.
RElem w_constant_root(const RElem& b, const RElem& w, int branch);
// roots of x0^2 + w b x0 - w = 0 (constant term of X); requires w square
RElem x_constant_root(const RElem& b, const RElem& w, int branch);

} // namespace breuil
