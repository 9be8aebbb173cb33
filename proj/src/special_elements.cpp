#include "breuil/special_elements.hpp"

namespace breuil {

namespace {

// V/U recursion: v_n = gamma (v_k + v_{k-e}/p) with k p + tau = n,
// constant term v_0 = 1 unless tau = 0, where v_0 = (1 - gamma)^{-1}.
std::vector<RElem> vu_recursion(SCtxP S, const RElem& gamma, long tau, bool check_denominator_bound) {
    const long p = S->fd.p;
    const int e = S->fd.e;
    const int umax = S->umax;
    auto F = S->F;
    std::vector<RElem> v(umax + 1, RElem::zero(F));
    if (tau == 0) {
        RElem den = RElem::one(F) - gamma;
        if (!den.is_unit())
            throw inadmissible_parameters("x^2 = w (mod m_E): constant term of the fixed-point equation has no solution");
        v[0] = den.inv_unit();
    } else {
        v[0] = RElem::one(F);
    }
    for (long n = 1; n <= umax; ++n) {
        long m = n - tau;
        if (m < 0 || m % p != 0) continue;
        long k = m / p;
        RElem acc = v[k];
        if (k - e >= 0) acc = acc + v[k - e].shift_p(-1);
        v[n] = gamma * acc;
        if (check_denominator_bound && !v[n].is_zero()) {
            // Denominator bound: vp(denom v_n) >= Nd forces n >= e p (p^Nd - 1)/(p-1)
            int worst = 0;
            for (int ci = 0; ci < v[n].ncoords(); ++ci) {
                auto& a = v[n].coord(ci);
                if (a.is_zero()) continue;
                auto val = a.valuation().value();
                long num = val.first; // denominator exponent is -floor(val)
                if (num < 0) worst = std::max(worst, (int)((-num + val.second - 1) / val.second));
            }
            if (worst > 0) {
                long pN = 1;
                for (int t = 0; t < worst; ++t) pN *= p;
                long bound = (long)e * p * (pN - 1) / (p - 1);
                if (n < bound) throw error("denominator bound of the V/U recursion violated");
            }
        }
    }
    return v;
}

DPSeries series_from_plain(SCtxP S, const std::vector<RElem>& v, const std::string& what) {
    DPSeries s(S);
    const int e = S->fd.e;
    for (int n = 0; n <= S->umax; ++n) {
        if (!v[n].valid()) continue;
        // keep computed zeros of reduced precision so certificates stay honest
        if (v[n].is_zero() && v[n].min_prec() >= S->R->N) continue;
        OE fact = S->fact_unit[n / e].shift_p((int)S->fact_val[n / e]);
        RElem r = v[n].mul_OE(fact);
        r.assert_integral(what);
        s.set_coord(n, TC::scalar(S->F, S->fd.f, r));
    }
    return s;
}

SpecialElement finish(SpecialElementSpec spec, SCtxP S, const std::vector<RElem>& v, const std::string& what) {
    SpecialElement el;
    el.spec = spec;
    el.series = series_from_plain(S, v, what);
    DPSeries res = residual_of(spec, el.series);
    if (!res.is_zero()) throw error(what + ": functional-equation residual is nonzero");
    el.certified_truncation = S->umax;
    int c = res.cert_prec();
    for (auto& [j, tc] : el.series.coords()) {
        (void)j;
        c = std::min(c, tc.min_abs_prec());
    }
    el.certified_p_digits = c;
    return el;
}

long vu_tau(const FieldDatum& fd, ElementKind kind, int j) {
    const long p = fd.p;
    bool vkind = kind == ElementKind::V || kind == ElementKind::Vprime;
    long base = fd.f == 1 ? p * (p - 1) : p * (long)fd.e;
    return vkind ? base * (j - 1) : base * (p - 2 - j);
}

SpecialElement solve_vu(SCtxP S, ElementKind kind, const RElem& x, const RElem& w, int j) {
    const long p = S->fd.p;
    bool primed = kind == ElementKind::Vprime || kind == ElementKind::Uprime;
    if (primed != (S->fd.f == 2)) throw inadmissible_parameters("element kind does not match the field datum");
    bool vkind = kind == ElementKind::V || kind == ElementKind::Vprime;
    if (vkind && j < 1) throw inadmissible_parameters("V requires j >= 1");
    if (!vkind && j > p - 2) throw inadmissible_parameters("U requires j <= p-2");
    SpecialElementSpec spec{kind, S->fd, x, w, j, 0, 1};
    RElem gamma = x * x * w.inv_unit();
    long tau = vu_tau(S->fd, kind, j);
    auto v = vu_recursion(S, gamma, tau, S->fd.f == 1);
    return finish(spec, S, v, kind_name(kind));
}

// incremental convolution C(m) = sum_{a + p b = m} s_a s_b for the W/X loops
struct SelfConv {
    const std::vector<RElem>* v;
    long p;
    FamilyCtxP F;
    RElem at(long m) const {
        RElem acc = RElem::zero(F);
        for (long b = 0; b * p <= m; ++b) {
            long a = m - b * p;
            if (!(*v)[a].valid() || (*v)[a].is_zero()) continue;
            if (!(*v)[b].valid() || (*v)[b].is_zero()) continue;
            acc = acc + (*v)[a] * (*v)[b];
        }
        return acc;
    }
    // same sum but excluding the (a=m, b=0) self term
    RElem at_excluding_self(long m) const {
        RElem acc = RElem::zero(F);
        for (long b = 1; b * p <= m; ++b) {
            long a = m - b * p;
            if (!(*v)[a].valid() || (*v)[a].is_zero()) continue;
            if (!(*v)[b].valid() || (*v)[b].is_zero()) continue;
            acc = acc + (*v)[a] * (*v)[b];
        }
        return acc;
    }
};

} // namespace

std::string kind_name(ElementKind k) {
    switch (k) {
        case ElementKind::V: return "V";
        case ElementKind::U: return "U";
        case ElementKind::Vprime: return "Vprime";
        case ElementKind::Uprime: return "Uprime";
        case ElementKind::W: return "W";
        case ElementKind::X: return "X";
    }
    return "?";
}

SpecialElement solve_V(SCtxP S, const RElem& x, const RElem& w, int j) {
    if (S->fd.f != 1) throw inadmissible_parameters("V lives in S_{F1,R}");
    return solve_vu(S, ElementKind::V, x, w, j);
}

SpecialElement solve_U(SCtxP S, const RElem& x, const RElem& w, int j) {
    if (S->fd.f != 1) throw inadmissible_parameters("U lives in S_{F1,R}");
    return solve_vu(S, ElementKind::U, x, w, j);
}

SpecialElement solve_Vprime(SCtxP S, const RElem& x, const RElem& w, int j) {
    if (S->fd.f != 2) throw inadmissible_parameters("V' lives in S_{F2,R}");
    return solve_vu(S, ElementKind::Vprime, x, w, j);
}

SpecialElement solve_Uprime(SCtxP S, const RElem& x, const RElem& w, int j) {
    if (S->fd.f != 2) throw inadmissible_parameters("U' lives in S_{F2,R}");
    return solve_vu(S, ElementKind::Uprime, x, w, j);
}

RElem w_constant_root(const RElem& b, const RElem& w, int branch) {
    auto F = b.ctx();
    RElem M = b * b;
    if (!M.is_unit()) {
        // val(b) > 0: Hensel branch z = -w - ... (the root congruent to -w)
        if (branch != 1) throw no_root_in_E("only the Hensel branch exists as a power series when val(b) > 0");
        RElem z = -w;
        for (int it = 0; it < 64; ++it) {
            RElem f = M * z * z - z - w;
            if (f.is_zero()) break;
            RElem df = M * z.mul_int(2) - RElem::one(F);
            z = z - f * df.inv_unit();
        }
        if (!(M * z * z - z - w).is_zero()) throw no_root_in_E("Hensel iteration for the W constant failed");
        return z;
    }
    // val(b) = 0: z = (1 +- sqrt(1 + 4 w b^2)) / (2 b^2)
    RElem disc = RElem::one(F) + w * M.mul_int(4);
    RElem s;
    if (disc.is_unit()) {
        s = disc.sqrt_unit();
    } else {
        // 1 + 4wb^2 = 0 mod m_E: scalar O_E square root (may be ramified)
        if (F->kind != FamilyKind::scalar)
            throw no_root_in_E("root is not a power series in the family variable when 1+4wb^2 = 0 mod m_E");
        s = RElem::from_OE(F, disc.constant().sqrt());
    }
    if (branch < 0) s = -s;
    return (RElem::one(F) + s) * (M.mul_int(2)).inv_unit();
}

RElem x_constant_root(const RElem& b, const RElem& w, int branch) {
    auto F = b.ctx();
    // x0^2 + w b x0 - w = 0; start from +-sqrt(w) and Newton (val(b) > 0)
    RElem x0 = w.sqrt_unit();
    if (branch < 0) x0 = -x0;
    for (int it = 0; it < 64; ++it) {
        RElem f = x0 * x0 + w * b * x0 - w;
        if (f.is_zero()) break;
        RElem df = x0.mul_int(2) + w * b;
        x0 = x0 - f * df.inv_unit();
    }
    if (!(x0 * x0 + w * b * x0 - w).is_zero()) throw no_root_in_E("Newton for the X constant failed");
    return x0;
}

SpecialElement solve_W(SCtxP S, const RElem& b, const RElem& w, int i, int branch) {
    if (S->fd.f != 2) throw inadmissible_parameters("W lives in S_{F2,R}");
    const long p = S->fd.p;
    if (i < 1 || i > p) throw inadmissible_parameters("W requires 1 <= i <= p");
    SpecialElementSpec spec{ElementKind::W, S->fd, b, w, 0, i, branch};
    auto F = S->F;
    const long e = S->fd.e;
    const long ep = e * p;
    const long sshift = p * e * (p - i);
    RElem M = b * b;
    std::vector<RElem> v(S->umax + 1, RElem::zero(F));
    RElem unit_div = RElem::one(F); // 1 - M w0 when i = p
    if (i < p) {
        v[0] = -w;
    } else {
        v[0] = w_constant_root(b, w, branch);
        unit_div = RElem::one(F) - M * v[0];
        if (!unit_div.is_unit()) throw no_root_in_E("b^2 z = 1 mod m_E: recursion for W cannot be solved");
    }
    SelfConv conv{&v, p, F};
    RElem unit_inv = unit_div.inv_unit();
    for (long n = 1; n <= S->umax; ++n) {
        RElem rhs = RElem::zero(F);
        if (n - sshift >= 0) {
            rhs = rhs + (i == p ? conv.at_excluding_self(n - sshift) : conv.at(n - sshift));
        }
        if (n - sshift - ep >= 0) rhs = rhs + conv.at(n - sshift - ep).shift_p(-1);
        if (rhs.is_zero()) continue;
        v[n] = (M * rhs) * (i == p ? unit_inv : RElem::one(F));
    }
    return finish(spec, S, v, "W");
}

SpecialElement solve_X(SCtxP S, const RElem& b, const RElem& w, int branch) {
    if (S->fd.f != 2) throw inadmissible_parameters("X lives in S_{F2,R}");
    if (b.is_unit()) throw inadmissible_parameters("X requires val(b) > 0");
    const long p = S->fd.p;
    const long ep = (long)S->fd.e * p;
    SpecialElementSpec spec{ElementKind::X, S->fd, b, w, 0, 1, branch};
    auto F = S->F;
    std::vector<RElem> v(S->umax + 1, RElem::zero(F));
    v[0] = x_constant_root(b, w, branch);
    RElem lead = v[0] + w * b; // x_n (x0 + wb) = lower terms
    RElem lead_inv = lead.inv_unit();
    SelfConv conv{&v, p, F};
    for (long n = 1; n <= S->umax; ++n) {
        // X w b + X phi(X) (1 + u^{ep}/p) - w = 0
        RElem rhs = conv.at_excluding_self(n);
        if (n - ep >= 0) rhs = rhs + conv.at(n - ep).shift_p(-1);
        if (rhs.is_zero()) continue;
        v[n] = -(rhs * lead_inv);
    }
    return finish(spec, S, v, "X");
}

DPSeries residual_of(const SpecialElementSpec& spec, const DPSeries& s) {
    SCtxP S = s.sctx();
    const long p = S->fd.p;
    DPSeries one = DPSeries::one(S);
    DPSeries cfac = DPSeries::c_phi1E(S); // 1 + u^{ep}/p
    switch (spec.kind) {
        case ElementKind::V:
        case ElementKind::U:
        case ElementKind::Vprime:
        case ElementKind::Uprime: {
            RElem gamma = spec.x_or_b * spec.x_or_b * spec.w.inv_unit();
            long tau = vu_tau(spec.fd, spec.kind, spec.j);
            DPSeries rhs = one + (cfac * s.phi()).shift_u((int)tau).mul_relem(gamma);
            return s - rhs;
        }
        case ElementKind::W: {
            long sshift = p * (long)S->fd.e * (p - spec.i);
            RElem M = spec.x_or_b * spec.x_or_b;
            DPSeries rhs = DPSeries::constant_relem(S, -spec.w) +
                           (cfac * s * s.phi()).shift_u((int)sshift).mul_relem(M);
            return s - rhs;
        }
        case ElementKind::X: {
            DPSeries lhs = s.mul_relem(spec.w * spec.x_or_b);
            DPSeries rhs = DPSeries::constant_relem(S, spec.w) - cfac * s * s.phi();
            return lhs - rhs;
        }
    }
    throw error("unknown element kind");
}

} // namespace breuil
