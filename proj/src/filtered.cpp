#include "breuil/filtered.hpp"

#include <numeric>
#include <sstream>

namespace breuil {

FE FE::zero(PadicCtxP R, int f, int e) {
    FE x;
    x.f = f;
    x.e = e;
    x.c.assign((size_t)f * e, OE::zero(R));
    return x;
}

FE FE::pi_pow(PadicCtxP R, int f, int e, long m, const OE& a) {
    FE x = zero(R, f, e);
    long k = ((m % e) + e) % e;
    long q = (m - k) / e; // pi^e = -p
    OE co = a.shift_p((int)q);
    if (q % 2 != 0) co = -co;
    for (int mu = 0; mu < f; ++mu) x.c[(size_t)mu * e + k] = co;
    return x;
}

bool FE::is_zero() const {
    for (auto& a : c)
        if (!a.is_zero()) return false;
    return true;
}

FE FE::operator+(const FE& o) const {
    FE x = *this;
    for (size_t i = 0; i < c.size(); ++i) x.c[i] = x.c[i] + o.c[i];
    return x;
}

FE FE::operator-(const FE& o) const {
    FE x = *this;
    for (size_t i = 0; i < c.size(); ++i) x.c[i] = x.c[i] - o.c[i];
    return x;
}

FE FE::operator*(const FE& o) const {
    FE x = zero(c[0].ctx(), f, e);
    for (int mu = 0; mu < f; ++mu)
        for (int k1 = 0; k1 < e; ++k1) {
            const OE& a = c[(size_t)mu * e + k1];
            if (a.is_zero()) continue;
            for (int k2 = 0; k2 < e; ++k2) {
                const OE& b = o.c[(size_t)mu * e + k2];
                OE prod = a * b;
                int k = k1 + k2;
                if (k >= e) {
                    k -= e;
                    prod = -(prod.shift_p(1)); // pi^e = -p
                }
                x.c[(size_t)mu * e + k] = x.c[(size_t)mu * e + k] + prod;
            }
        }
    return x;
}

FE FE::mul_OE(const OE& a) const {
    FE x = *this;
    for (auto& v : x.c) v = v * a;
    return x;
}

FE FE::mul_pi() const {
    FE x = *this;
    for (int mu = 0; mu < f; ++mu) {
        OE top = c[(size_t)mu * e + (e - 1)];
        for (int k = e - 1; k > 0; --k) x.c[(size_t)mu * e + k] = c[(size_t)mu * e + (k - 1)];
        x.c[(size_t)mu * e] = -(top.shift_p(1)); // pi^e = -p
    }
    return x;
}

FE FE::project(int mu0) const {
    FE x = *this;
    for (int mu = 0; mu < f; ++mu)
        if (mu != mu0)
            for (int k = 0; k < e; ++k) x.c[(size_t)mu * e + k] = OE::zero(c[0].ctx());
    return x;
}

bool TameType::operator==(const TameType& o) const {
    if (niveau != o.niveau || p != o.p) return false;
    long e1 = p - 1, e2 = p * p - 1;
    if (niveau == 1) {
        long a1 = ((i % e1) + e1) % e1, b1 = ((j % e1) + e1) % e1;
        long a2 = ((o.i % e1) + e1) % e1, b2 = ((o.j % e1) + e1) % e1;
        return (a1 == a2 && b1 == b2) || (a1 == b2 && b1 == a2);
    }
    long m1 = ((m % e2) + e2) % e2, m2 = ((o.m % e2) + e2) % e2;
    return m1 == m2 || (m1 * p) % e2 == m2;
}

std::string TameType::to_string() const {
    std::ostringstream os;
    if (niveau == 1)
        os << "prin:" << i << "," << j;
    else
        os << "super:" << m;
    return os.str();
}

FilteredModule build_D_principal(PadicCtxP R, const OE& x1, const OE& x2, long i, long j, bool over_F2) {
    long p = R->p;
    if (((i - j) % (p - 1) + (p - 1)) % (p - 1) == 0) throw scalar_type("principal type requires i != j mod p-1");
    auto v1 = x1.valuation(), v2 = x2.valuation();
    if (!v1 || !v2) throw bad_valuation("x1, x2 must have certified valuations");
    if (v1->first < 0 || v2->first < 0) throw bad_valuation("x1, x2 must lie in O_E");
    // val(x1 x2) = 1
    if (v1->first * v2->second + v2->first * v1->second != v1->second * v2->second)
        throw bad_valuation("val_p(x1 x2) must be 1");
    FilteredModule D;
    D.fd = over_F2 ? FieldDatum::F2_over_Qp(p) : FieldDatum::F1_over_Qp(p);
    if (over_F2 && R->fE != 2) throw inadmissible_parameters("F2 requires k_E >= F_{p^2}");
    D.R = R;
    D.antidiag = false;
    D.x1 = x1;
    D.x2 = x2;
    long mult = over_F2 ? p + 1 : 1; // omega-tilde = (omega_2-tilde)^{p+1}
    D.chi1 = ((i % (p - 1)) + p - 1) % (p - 1) * mult;
    D.chi2 = ((j % (p - 1)) + p - 1) % (p - 1) * mult;
    D.niveau = 1;
    D.type_i = ((i % (p - 1)) + p - 1) % (p - 1);
    D.type_j = ((j % (p - 1)) + p - 1) % (p - 1);
    // Fil^1 = (F (x) E) (pi^{j-i} e1 + e2); over F2 the uniformizer power is (p+1)(j-i)
    D.fil1 = FE::pi_pow(R, D.fd.f, D.fd.e, mult * (j - i), OE::one(R));
    D.fil2 = FE::pi_pow(R, D.fd.f, D.fd.e, 0, OE::one(R));
    return D;
}

FilteredModule build_D_supercuspidal(PadicCtxP R, long m, const OE& a, const OE& b, const OE& x) {
    long p = R->p;
    if (R->fE != 2) throw inadmissible_parameters("supercuspidal modules require k_E >= F_{p^2}");
    long e2 = p * p - 1;
    if (((m % (p + 1)) + (p + 1)) % (p + 1) == 0) throw scalar_type("supercuspidal type requires p+1 not dividing m");
    auto vx = x.valuation();
    if (!vx || vx->first != vx->second) throw bad_valuation("val_p(x) must be 1");
    if (a.is_zero() && b.is_zero()) throw inadmissible_parameters("(a, b) must be nonzero");
    FilteredModule D;
    D.fd = FieldDatum::F2_over_Qp(p);
    D.R = R;
    D.antidiag = true;
    D.x1 = OE::one(R);
    D.x2 = x;
    D.chi1 = ((m % e2) + e2) % e2;
    D.chi2 = (D.chi1 * p) % e2;
    D.niveau = 2;
    D.type_m = D.chi1;
    // m = i + (p+1) j with i in {1..p}; Fil^1 generator (w^{(p-1)i} (x) a) e1 + (1 (x) b) e2
    long i = ((m % (p + 1)) + (p + 1)) % (p + 1);
    if (i == 0) i = p + 1; // cannot happen (p+1 | m excluded)
    D.fil1 = FE::pi_pow(R, 2, (int)e2, (p - 1) * i, a);
    D.fil2 = FE::pi_pow(R, 2, (int)e2, 0, b);
    return D;
}

int oe_matrix_rank(std::vector<std::vector<OE>> rows) {
    if (rows.empty()) return 0;
    size_t ncols = rows[0].size();
    int rank = 0;
    size_t rpos = 0;
    for (size_t col = 0; col < ncols && rpos < rows.size(); ++col) {
        // pivot: minimal valuation nonzero entry in this column
        long best_num = 0, best_den = 1;
        size_t best = rows.size();
        for (size_t r = rpos; r < rows.size(); ++r) {
            if (rows[r][col].is_zero()) continue;
            auto v = rows[r][col].valuation().value();
            if (best == rows.size() || v.first * best_den < best_num * v.second) {
                best = r;
                best_num = v.first;
                best_den = v.second;
            }
        }
        if (best == rows.size()) continue;
        std::swap(rows[rpos], rows[best]);
        OE inv = rows[rpos][col].inv_field();
        for (size_t r = rpos + 1; r < rows.size(); ++r) {
            if (rows[r][col].is_zero()) continue;
            OE mult = rows[r][col] * inv;
            for (size_t cc = col; cc < ncols; ++cc) rows[r][cc] = rows[r][cc] - rows[rpos][cc] * mult;
        }
        ++rpos;
        ++rank;
    }
    return rank;
}

namespace {

// E-span of (F (x) E) * v inside D_F, flattened (v = pair of FE)
std::vector<std::vector<OE>> fe_span(const FE& a, const FE& b) {
    std::vector<std::vector<OE>> rows;
    FE pa = a, pb = b;
    for (int mu = 0; mu < a.f; ++mu) {
        pa = a.project(mu);
        pb = b.project(mu);
        for (int k = 0; k < a.e; ++k) {
            std::vector<OE> row;
            row.reserve(pa.c.size() * 2);
            for (auto& x : pa.c) row.push_back(x);
            for (auto& x : pb.c) row.push_back(x);
            rows.push_back(std::move(row));
            pa = pa.mul_pi();
            pb = pb.mul_pi();
        }
    }
    return rows;
}

// dim_E of span1 cap span2 (by rank formula)
int span_intersection_dim(const std::vector<std::vector<OE>>& s1, const std::vector<std::vector<OE>>& s2) {
    int r1 = oe_matrix_rank(s1);
    int r2 = oe_matrix_rank(s2);
    auto all = s1;
    all.insert(all.end(), s2.begin(), s2.end());
    int r12 = oe_matrix_rank(all);
    return r1 + r2 - r12;
}

std::pair<long, long> normalize_frac(long num, long den) {
    long g = std::gcd(std::abs(num), std::abs(den));
    if (g > 0) {
        num /= g;
        den /= g;
    }
    if (den < 0) {
        den = -den;
        num = -num;
    }
    return {num, den};
}

} // namespace

WadmReport check_weak_admissibility(const FilteredModule& D) {
    WadmReport rep;
    auto R = D.R;
    const int f0 = D.fd.f;
    // t_N(D) = val_p(det phi^{f0}) / f0 ; t_H(D) = 1 (rank-1 Fil^1, weights {0,1})
    long num, den;
    if (!D.antidiag) {
        auto v1 = D.x1.valuation().value(), v2 = D.x2.valuation().value();
        std::tie(num, den) = normalize_frac(v1.first * v2.second + v2.first * v1.second, v1.second * v2.second);
    } else {
        auto vx = D.x2.valuation().value();
        std::tie(num, den) = normalize_frac(vx.first, vx.second); // det(phi^2) = x^2, /2 per E-dim, x2 appears twice / f0=2
    }
    rep.tN_num = num;
    rep.tN_den = den;
    rep.tH_num = (D.fil1.is_zero() && D.fil2.is_zero()) ? 0 : 1;
    rep.tH_den = 1;
    bool ok = rep.tH_num * rep.tN_den == rep.tN_num * rep.tH_den;
    rep.admissible = ok;

    auto fil_span = fe_span(D.fil1, D.fil2);
    auto add_candidate = [&](const std::string& label, const FE& a, const FE& b, long tn_num, long tn_den) {
        WadmCandidate c;
        c.label = label;
        std::tie(c.tN_num, c.tN_den) = normalize_frac(tn_num, tn_den);
        auto sp = fe_span(a, b);
        int dim = span_intersection_dim(sp, fil_span);
        // t_H normalized per [F:Q_p] = f0 * e
        auto th = normalize_frac(dim, (long)f0 * D.fd.e);
        c.tH_num = th.first;
        c.tH_den = th.second;
        c.ok = c.tH_num * c.tN_den <= c.tN_num * c.tH_den;
        rep.candidates.push_back(c);
        if (!c.ok) rep.admissible = false;
    };

    FE zero = FE::zero(R, f0, D.fd.e);
    FE one = FE::pi_pow(R, f0, D.fd.e, 0, OE::one(R));
    // E-rational subspace of D_F (spans of e1, e2 over E): an E-line of D with
    // t_H > 0 exists iff Fil^1 meets it, since Fil^1 is an (F (x) E)-module
    auto rational_rows = [&]() {
        std::vector<std::vector<OE>> rows;
        size_t L = (size_t)f0 * D.fd.e;
        for (int which = 0; which < 2; ++which) {
            std::vector<OE> row(2 * L, OE::zero(R));
            for (int mu = 0; mu < f0; ++mu) row[which * L + (size_t)mu * D.fd.e] = OE::one(R);
            rows.push_back(std::move(row));
        }
        return rows;
    };
    if (!D.antidiag) {
        auto v1 = D.x1.valuation().value(), v2 = D.x2.valuation().value();
        add_candidate("line e1", one, zero, v1.first, v1.second);
        add_candidate("line e2", zero, one, v2.first, v2.second);
        if ((D.x1 - D.x2).is_zero()) {
            // every E-line is phi-stable; generic lines have t_H = 0 and
            // t_N = val(x) >= 0, so only a line inside Fil^1 could violate
            WadmCandidate c;
            c.label = "E-rational line in Fil1";
            std::tie(c.tN_num, c.tN_den) = normalize_frac(v1.first, v1.second);
            int dim = span_intersection_dim(rational_rows(), fil_span);
            c.tH_num = dim > 0 ? 1 : 0;
            c.tH_den = 1;
            c.ok = c.tH_num * c.tN_den <= c.tN_num * c.tH_den;
            rep.candidates.push_back(c);
            if (!c.ok) rep.admissible = false;
        }
    } else {
        auto vx = D.x2.valuation().value();
        // candidates D_0 = <u(a e1 + b e2), v(b x e1 + a e2)>; phi^2 acts as x
        // on the rank-1 module D_0, so t_N(D_0) = val(x)/2
        std::vector<std::pair<std::string, std::pair<OE, OE>>> abs = {
            {"[1:0]", {OE::one(R), OE::zero(R)}},
            {"[0:1]", {OE::zero(R), OE::one(R)}},
            {"[1:1]", {OE::one(R), OE::one(R)}},
        };
        for (auto& [label, ab] : abs) {
            auto& [a, b] = ab;
            // u = component-0 idempotent, v = component-1
            FE ua = FE::pi_pow(R, 2, D.fd.e, 0, a).project(0);
            FE ub = FE::pi_pow(R, 2, D.fd.e, 0, b).project(0);
            FE va = FE::pi_pow(R, 2, D.fd.e, 0, b * D.x2).project(1);
            FE vb = FE::pi_pow(R, 2, D.fd.e, 0, a).project(1);
            auto sp1 = fe_span(ua, ub);
            auto sp2 = fe_span(va, vb);
            sp1.insert(sp1.end(), sp2.begin(), sp2.end());
            WadmCandidate c;
            c.label = "D0 " + label;
            std::tie(c.tN_num, c.tN_den) = normalize_frac(vx.first, 2 * vx.second);
            int dim = span_intersection_dim(sp1, fil_span);
            auto th = normalize_frac(dim, (long)f0 * D.fd.e);
            c.tH_num = th.first;
            c.tH_den = th.second;
            c.ok = c.tH_num * c.tN_den <= c.tN_num * c.tH_den;
            rep.candidates.push_back(c);
            if (!c.ok) rep.admissible = false;
        }
    }
    return rep;
}

TameType galois_type(const FilteredModule& D) {
    TameType t;
    t.p = D.fd.p;
    t.niveau = D.niveau;
    if (D.niveau == 1) {
        t.i = D.type_i;
        t.j = D.type_j;
    } else {
        t.m = D.type_m;
    }
    return t;
}

bool is_reducible_degenerate(PadicCtxP R, const OE& x1, const OE& x2, const OE& w, long j) {
    long p = R->p;
    auto kE = R->kE;
    auto check = [&](const OE& x) {
        auto v = x.valuation();
        if (!v || v->first != 0) return false;
        auto r = x.residue();
        return kE->mul(r, r) == w.residue();
    };
    if (j == 1 && check(x1)) return true;
    if (j == p - 2 && check(x2)) return true;
    return false;
}

} // namespace breuil
