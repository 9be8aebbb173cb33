#include "breuil/breuil_mod.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace breuil {

ACtxP make_actx(FFp kE, int nnil, const std::string& n0, const std::string& n1) {
    auto a = std::make_shared<ACtx>();
    a->kE = std::move(kE);
    a->nnil = nnil;
    a->nil_names = {n0, n1};
    return a;
}

AElt BCtx::a_add(const AElt& x, const AElt& y) const {
    auto& k = *A->kE;
    return {k.add(x.c0, y.c0), {k.add(x.nil[0], y.nil[0]), k.add(x.nil[1], y.nil[1])}};
}

AElt BCtx::a_sub(const AElt& x, const AElt& y) const {
    auto& k = *A->kE;
    return {k.sub(x.c0, y.c0), {k.sub(x.nil[0], y.nil[0]), k.sub(x.nil[1], y.nil[1])}};
}

AElt BCtx::a_mul(const AElt& x, const AElt& y) const {
    auto& k = *A->kE;
    return {k.mul(x.c0, y.c0),
            {k.add(k.mul(x.c0, y.nil[0]), k.mul(y.c0, x.nil[0])),
             k.add(k.mul(x.c0, y.nil[1]), k.mul(y.c0, x.nil[1]))}};
}

AElt BCtx::a_scale(SmallField::elt c, const AElt& x) const {
    auto& k = *A->kE;
    return {k.mul(c, x.c0), {k.mul(c, x.nil[0]), k.mul(c, x.nil[1])}};
}

AElt BCtx::a_inv(const AElt& x) const {
    auto& k = *A->kE;
    if (x.c0 == 0) throw error("inverse of a non-unit in A");
    auto ci = k.inv(x.c0);
    auto ci2 = k.mul(ci, ci);
    return {ci, {k.neg(k.mul(ci2, x.nil[0])), k.neg(k.mul(ci2, x.nil[1]))}};
}

BCtxP make_bctx(FieldDatum fd, ACtxP A, PadicCtxP R_for_theta) {
    auto b = std::make_shared<BCtx>();
    b->fd = fd;
    b->A = std::move(A);
    b->ep = fd.e * (int)fd.p;
    // thetabar: canonical generator of the order-e subgroup of k_E^*
    auto kE = b->A->kE;
    long q = kE->order();
    if ((q - 1) % fd.e != 0) throw inadmissible_parameters("k_E too small for the descent character values");
    b->thetabar = kE->pow(kE->gen(), (q - 1) / fd.e);
    (void)R_for_theta;
    return b;
}

BElt BElt::zero(BCtxP B) {
    BElt x;
    x.B = std::move(B);
    x.c.assign((size_t)x.B->fd.f * x.B->ep, AElt{});
    return x;
}

BElt BElt::one(BCtxP B) { return monomial(B, 0, AElt{1, {0, 0}}); }

BElt BElt::monomial(BCtxP B, int deg, const AElt& a) {
    BElt x = zero(B);
    if (deg < x.B->ep)
        for (int mu = 0; mu < x.B->fd.f; ++mu) x.c[(size_t)mu * x.B->ep + deg] = a;
    return x;
}

BElt BElt::component_scalar(BCtxP B, const std::vector<AElt>& per_mu) {
    BElt x = zero(B);
    for (int mu = 0; mu < x.B->fd.f; ++mu) x.c[(size_t)mu * x.B->ep] = per_mu.at(mu);
    return x;
}

bool BElt::is_zero() const {
    for (auto& a : c)
        if (!B->a_zero(a)) return false;
    return true;
}

bool BElt::is_unit() const {
    for (int mu = 0; mu < B->fd.f; ++mu)
        if (!B->a_unit(c[(size_t)mu * B->ep])) return false;
    return true;
}

BElt BElt::operator+(const BElt& o) const {
    BElt x = *this;
    for (size_t i = 0; i < c.size(); ++i) x.c[i] = B->a_add(c[i], o.c[i]);
    return x;
}

BElt BElt::operator-(const BElt& o) const {
    BElt x = *this;
    for (size_t i = 0; i < c.size(); ++i) x.c[i] = B->a_sub(c[i], o.c[i]);
    return x;
}

BElt BElt::operator-() const {
    BElt x = zero(B);
    for (size_t i = 0; i < c.size(); ++i) x.c[i] = B->a_sub(AElt{}, c[i]);
    return x;
}

BElt BElt::operator*(const BElt& o) const {
    BElt x = zero(B);
    const int ep = B->ep;
    for (int mu = 0; mu < B->fd.f; ++mu) {
        for (int d1 = 0; d1 < ep; ++d1) {
            const AElt& a = c[(size_t)mu * ep + d1];
            if (B->a_zero(a)) continue;
            for (int d2 = 0; d2 + d1 < ep; ++d2) {
                const AElt& b = o.c[(size_t)mu * ep + d2];
                if (B->a_zero(b)) continue;
                auto& tgt = x.c[(size_t)mu * ep + d1 + d2];
                tgt = B->a_add(tgt, B->a_mul(a, b));
            }
        }
    }
    return x;
}

BElt BElt::scale(SmallField::elt s) const {
    BElt x = *this;
    for (auto& a : x.c) a = B->a_scale(s, a);
    return x;
}

BElt BElt::shift_u(int k) const {
    BElt x = zero(B);
    const int ep = B->ep;
    for (int mu = 0; mu < B->fd.f; ++mu)
        for (int d = 0; d + k < ep; ++d) x.c[(size_t)mu * ep + d + k] = c[(size_t)mu * ep + d];
    return x;
}

BElt BElt::twist() const {
    BElt x = zero(B);
    const int ep = B->ep;
    const int f = B->fd.f;
    for (int mu = 0; mu < f; ++mu)
        for (int d = 0; d * B->fd.p < ep; ++d)
            x.c[(size_t)mu * ep + d * B->fd.p] = c[(size_t)((mu + 1) % f) * ep + d];
    return x;
}

BElt BElt::descent(const DescentElement& g) const {
    BElt x = zero(B);
    const int ep = B->ep;
    const int f = B->fd.f;
    auto& k = *B->A->kE;
    int s = B->fd.has_gphi ? g.frob % 2 : 0;
    for (int mu = 0; mu < f; ++mu) {
        long pmu = 1;
        for (int q = 0; q < mu; ++q) pmu = pmu * B->fd.p % B->fd.e;
        for (int d = 0; d < ep; ++d) {
            const AElt& a = c[(size_t)((mu + s) % f) * ep + d];
            if (B->a_zero(a)) continue;
            long expn = ((g.twist % B->fd.e + B->fd.e) % B->fd.e) * ((long)d % B->fd.e) % B->fd.e * pmu % B->fd.e;
            x.c[(size_t)mu * ep + d] = B->a_scale(k.pow(B->thetabar, expn), a);
        }
    }
    return x;
}

bool BElt::nilpotent_valued() const {
    for (auto& a : c)
        if (a.c0 != 0) return false;
    return true;
}

int BElt::u_order() const {
    int best = B->ep;
    for (int mu = 0; mu < B->fd.f; ++mu)
        for (int d = 0; d < B->ep; ++d)
            if (!B->a_zero(c[(size_t)mu * B->ep + d])) {
                best = std::min(best, d);
                break;
            }
    return best;
}

std::string BElt::to_string() const {
    std::ostringstream os;
    auto& k = *B->A->kE;
    bool first = true;
    for (int mu = 0; mu < B->fd.f; ++mu)
        for (int d = 0; d < B->ep; ++d) {
            const AElt& a = c[(size_t)mu * B->ep + d];
            if (B->a_zero(a)) continue;
            if (!first) os << " + ";
            os << "(" << k.to_string(a.c0);
            for (int t = 0; t < B->A->nnil; ++t)
                if (a.nil[t] != 0) os << "+" << k.to_string(a.nil[t]) << "*" << B->A->nil_names[t];
            os << ")";
            if (B->fd.f == 2) os << "e" << mu;
            if (d) os << "u^" << d;
            first = false;
        }
    if (first) os << "0";
    return os.str();
}

bool BreuilModule::operator==(const BreuilModule& o) const {
    if (rank != o.rank || gens.size() != o.gens.size()) return false;
    auto veq = [](const std::vector<std::vector<BElt>>& a, const std::vector<std::vector<BElt>>& b) {
        if (a.size() != b.size()) return false;
        for (size_t i = 0; i < a.size(); ++i) {
            if (a[i].size() != b[i].size()) return false;
            for (size_t j = 0; j < a[i].size(); ++j)
                if (!(a[i][j] - b[i][j]).is_zero()) return false;
        }
        return true;
    };
    if (!veq(gens, o.gens) || !veq(phi1_gens, o.phi1_gens) || !veq(phibar, o.phibar)) return false;
    if (!veq(g0_mat, o.g0_mat)) return false;
    if (B->fd.has_gphi != o.B->fd.has_gphi) return false;
    if (B->fd.has_gphi && !veq(gphi_mat, o.gphi_mat)) return false;
    return true;
}

// ---------------------------------------------------------------------------

namespace {

int a_dim(const ACtx& A) { return 1 + A.nnil; }

SmallField::elt a_coord(const AElt& a, int t) { return t == 0 ? a.c0 : a.nil[t - 1]; }

void a_coord_set(AElt& a, int t, SmallField::elt v) {
    if (t == 0)
        a.c0 = v;
    else
        a.nil[t - 1] = v;
}

} // namespace

// ---------------------------------------------------------------------------

BreuilOps::BreuilOps(const BreuilModule& M) : M_(&M) {
    auto B = M.B;
    e_ = B->fd.e;
    f_ = B->fd.f;
    dimA_ = a_dim(*B->A);
    blk_ = f_ * e_ * dimA_;
    nrows_ = M.rank * blk_;
    ncols_ = (int)M.gens.size() * blk_;

    // columns: beta-basis direction (l, mu, d < e, a-coord) -> flatten(beta * gen_l mod u^e)
    KMat A = KMat::make(B->A->kE, nrows_, ncols_);
    int col = 0;
    for (size_t l = 0; l < M.gens.size(); ++l) {
        for (int mu = 0; mu < f_; ++mu)
            for (int d = 0; d < e_; ++d)
                for (int t = 0; t < dimA_; ++t, ++col) {
                    AElt unit{};
                    a_coord_set(unit, t, 1);
                    // beta = unit * u^d on component mu only
                    for (int i = 0; i < M.rank; ++i) {
                        const BElt& g = M.gens[l][i];
                        // (beta * g) on component mu, degrees < e
                        for (int d2 = 0; d2 + d < e_; ++d2) {
                            const AElt& gc = g.c[(size_t)mu * B->ep + d2];
                            if (B->a_zero(gc)) continue;
                            AElt prod = B->a_mul(unit, gc);
                            for (int tt = 0; tt < dimA_; ++tt) {
                                auto v = a_coord(prod, tt);
                                if (v == 0) continue;
                                int row = ((i * f_ + mu) * e_ + (d + d2)) * dimA_ + tt;
                                A.at(row, col) = B->A->kE->add(A.get(row, col), v);
                            }
                        }
                    }
                }
    }
    auto ech = std::make_shared<Echelon>();
    ech->build(A);
    ech_ = ech;

    // certificates:
    // (a) mod-u^e syzygies: both phi1 routes agree
    for (auto& kv : ech->kernel()) {
        std::vector<BElt> v(M.rank, BElt::zero(B));
        std::vector<BElt> route1(M.rank, BElt::zero(B));
        int cc = 0;
        for (size_t l = 0; l < M.gens.size(); ++l) {
            BElt beta = BElt::zero(B);
            for (int mu = 0; mu < f_; ++mu)
                for (int d = 0; d < e_; ++d)
                    for (int t = 0; t < dimA_; ++t, ++cc) {
                        if (kv[cc] == 0) continue;
                        AElt& tgt = beta.c[(size_t)mu * B->ep + d];
                        a_coord_set(tgt, t, B->A->kE->add(a_coord(tgt, t), kv[cc]));
                    }
            for (int i = 0; i < M.rank; ++i) {
                v[i] = v[i] + beta * M.gens[l][i];
                route1[i] = route1[i] + beta.twist() * M.phi1_gens[l][i];
            }
        }
        // v = u^e * y; route2 = sum twist(y_i) phibar_i
        std::vector<BElt> route2(M.rank, BElt::zero(B));
        for (int i = 0; i < M.rank; ++i) {
            if (v[i].u_order() < e_) {
                well_defined_ = false;
                continue;
            }
            BElt y = BElt::zero(B);
            for (int mu = 0; mu < f_; ++mu)
                for (int d = e_; d < B->ep; ++d) y.c[(size_t)mu * B->ep + d - e_] = v[i].c[(size_t)mu * B->ep + d];
            BElt ty = y.twist();
            for (int j = 0; j < M.rank; ++j) route2[j] = route2[j] + ty * M.phibar[i][j];
        }
        for (int i = 0; i < M.rank; ++i)
            if (!(route1[i] - route2[i]).is_zero()) well_defined_ = false;
    }
    // (b) u^e gen_l: twisted coordinates against phibar must vanish
    for (size_t l = 0; l < M.gens.size(); ++l) {
        std::vector<BElt> acc(M.rank, BElt::zero(B));
        for (int i = 0; i < M.rank; ++i) {
            BElt tg = M.gens[l][i].twist();
            for (int j = 0; j < M.rank; ++j) acc[j] = acc[j] + tg * M.phibar[i][j];
        }
        for (int j = 0; j < M.rank; ++j)
            if (!acc[j].is_zero()) well_defined_ = false;
    }
}

int BreuilOps::ambient_dim() const { return M_->rank * f_ * M_->B->ep * dimA_; }

std::vector<SmallField::elt> BreuilOps::flatten_mod_ue(const std::vector<BElt>& x) const {
    std::vector<SmallField::elt> out((size_t)nrows_, 0);
    auto B = M_->B;
    for (int i = 0; i < M_->rank; ++i)
        for (int mu = 0; mu < f_; ++mu)
            for (int d = 0; d < e_; ++d) {
                const AElt& a = x[i].c[(size_t)mu * B->ep + d];
                for (int t = 0; t < dimA_; ++t) out[((size_t)(i * f_ + mu) * e_ + d) * dimA_ + t] = a_coord(a, t);
            }
    return out;
}

std::optional<std::vector<SmallField::elt>> BreuilOps::solve0(const std::vector<BElt>& x) const {
    return ech_->solve(flatten_mod_ue(x));
}

bool BreuilOps::in_fil1(const std::vector<BElt>& x) const { return solve0(x).has_value(); }

std::vector<BElt> BreuilOps::phi1(const std::vector<BElt>& x) const {
    auto beta = solve0(x);
    if (!beta) throw not_in_fil1("element not in Fil^1 of the Breuil module");
    return phi1_with_beta(x, *beta);
}

std::vector<BElt> BreuilOps::phi1_with_beta(const std::vector<BElt>& x,
                                            const std::vector<SmallField::elt>& beta) const {
    auto B = M_->B;
    const auto& M = *M_;
    std::vector<BElt> rem = x;
    std::vector<BElt> out(M.rank, BElt::zero(B));
    int cc = 0;
    for (size_t l = 0; l < M.gens.size(); ++l) {
        BElt bl = BElt::zero(B);
        for (int mu = 0; mu < f_; ++mu)
            for (int d = 0; d < e_; ++d)
                for (int t = 0; t < dimA_; ++t, ++cc) {
                    if (beta[cc] == 0) continue;
                    AElt& tgt = bl.c[(size_t)mu * B->ep + d];
                    a_coord_set(tgt, t, B->A->kE->add(a_coord(tgt, t), beta[cc]));
                }
        BElt tb = bl.twist();
        for (int i = 0; i < M.rank; ++i) {
            rem[i] = rem[i] - bl * M.gens[l][i];
            out[i] = out[i] + tb * M.phi1_gens[l][i];
        }
    }
    for (int i = 0; i < M.rank; ++i) {
        // rem_i must be in u^e B (checked only at solver level)
        BElt y = BElt::zero(B);
        for (int mu = 0; mu < f_; ++mu)
            for (int d = e_; d < B->ep; ++d) y.c[(size_t)mu * B->ep + d - e_] = rem[i].c[(size_t)mu * B->ep + d];
        BElt ty = y.twist();
        for (int j = 0; j < M.rank; ++j) out[j] = out[j] + ty * M.phibar[i][j];
    }
    return out;
}

bool BreuilOps::phi1_generates() const {
    auto B = M_->B;
    const auto& M = *M_;
    auto kE = B->A->kE;
    for (int mu = 0; mu < f_; ++mu) {
        KMat m;
        m.k = kE;
        m.rows = (int)M.gens.size() + M.rank;
        m.cols = M.rank;
        m.a.assign((size_t)m.rows * m.cols, 0);
        for (size_t l = 0; l < M.gens.size(); ++l)
            for (int i = 0; i < M.rank; ++i) m.at((int)l, i) = M.phi1_gens[l][i].c[(size_t)mu * B->ep].c0;
        for (int i = 0; i < M.rank; ++i)
            for (int j = 0; j < M.rank; ++j)
                m.at((int)M.gens.size() + i, j) = M.phibar[i][j].c[(size_t)mu * B->ep].c0;
        Echelon ech;
        ech.build(m);
        if (ech.rank() < M.rank) return false;
    }
    return true;
}

std::vector<BElt> BreuilOps::apply_matrix_semilinear(const std::vector<std::vector<BElt>>& mat,
                                                     const std::vector<BElt>& x,
                                                     const DescentElement& g) const {
    auto B = M_->B;
    std::vector<BElt> out(M_->rank, BElt::zero(B));
    for (int i = 0; i < M_->rank; ++i) {
        BElt tw = x[i].descent(g);
        for (int j = 0; j < M_->rank; ++j) out[j] = out[j] + tw * mat[i][j];
    }
    return out;
}

std::vector<BElt> BreuilOps::descent(const std::vector<BElt>& x, bool use_gphi) const {
    return apply_matrix_semilinear(use_gphi ? M_->gphi_mat : M_->g0_mat, x,
                                   use_gphi ? DescentElement::gphi() : DescentElement::g0());
}

std::vector<BElt> BreuilOps::phi1_linear(const std::vector<BElt>& x) const {
    auto beta = ech_->solve_linear(flatten_mod_ue(x), nullptr);
    return phi1_with_beta(x, beta);
}

std::vector<SmallField::elt> BreuilOps::membership_residual(const std::vector<BElt>& x) const {
    std::vector<SmallField::elt> res;
    ech_->solve_linear(flatten_mod_ue(x), &res);
    return res;
}

// ---------------------------------------------------------------------------
// morphism search

namespace {

struct Unknown {
    int i, j;  // source basis, target basis
    int mu;    // component
    int d;     // u-degree
    int t;     // A-coordinate
};

// extract the diagonal descent character theta-exponent of g0 on basis i,
// component mu; requires a diagonal matrix with k_E-unit constant entries
std::optional<long> diag_theta_exp(const BreuilModule& M, int i, int mu) {
    auto B = M.B;
    for (int j = 0; j < M.rank; ++j) {
        const BElt& ent = M.g0_mat[i][j];
        if (j != i) {
            if (!ent.is_zero()) return std::nullopt;
            continue;
        }
        // entry must be a constant unit in k_E on this component
        for (int d = 1; d < B->ep; ++d)
            if (!B->a_zero(ent.c[(size_t)mu * B->ep + d])) return std::nullopt;
        AElt a = ent.c[(size_t)mu * B->ep];
        if (a.nil[0] != 0 || a.nil[1] != 0 || a.c0 == 0) return std::nullopt;
        // solve thetabar^x = a.c0
        auto kE = B->A->kE;
        long lg = kE->dlog(a.c0);
        long lt = kE->dlog(B->thetabar);
        long q1 = kE->order() - 1;
        // lt * x = lg mod q1; lt = q1/e
        long step = q1 / B->fd.e;
        if (lg % step != 0) return std::nullopt;
        return (lg / step) % B->fd.e;
    }
    return std::nullopt;
}

long pow_mod(long a, long e, long m) {
    long r = 1 % m;
    a %= m;
    while (e > 0) {
        if (e & 1) r = r * a % m;
        a = a * a % m;
        e >>= 1;
    }
    return r;
}

long inv_mod(long a, long m) { // extended Euclid; gcd(a, m) = 1
    long t0 = 0, t1 = 1, r0 = m, r1 = ((a % m) + m) % m;
    while (r1 != 0) {
        long q = r0 / r1;
        long r2 = r0 - q * r1;
        r0 = r1;
        r1 = r2;
        long t2 = t0 - q * t1;
        t0 = t1;
        t1 = t2;
    }
    return ((t0 % m) + m) % m;
}

} // namespace

std::vector<std::vector<std::vector<BElt>>> find_morphisms(const BreuilModule& M, const BreuilModule& N,
                                                           const BreuilOps* opsM_in, const BreuilOps* opsN_in) {
    if (!(M.B->fd == N.B->fd)) throw inadmissible_parameters("morphisms require a common field datum");
    if (M.B->A->kE != N.B->A->kE || M.B->A->nnil != N.B->A->nnil)
        throw inadmissible_parameters("morphisms require a common coefficient algebra");
    auto B = N.B;
    auto kE = B->A->kE;
    const int f = B->fd.f;
    const int e = B->fd.e;
    const int ep = B->ep;
    const long p = B->fd.p;
    const int dimA = 1 + B->A->nnil;

    std::optional<BreuilOps> opsM_own, opsN_own;
    if (!opsM_in) opsM_own.emplace(M);
    if (!opsN_in) opsN_own.emplace(N);
    const BreuilOps& opsM = opsM_in ? *opsM_in : *opsM_own;
    const BreuilOps& opsN = opsN_in ? *opsN_in : *opsN_own;
    if (!opsM.phi1_well_defined() || !opsN.phi1_well_defined())
        throw error("phi1 of a morphism-search operand is not well defined");

    // unknowns: filtered by the g0-character classes when both actions are
    // diagonal with k_E-unit constant entries
    std::vector<Unknown> unknowns;
    bool filtered = true;
    for (int i = 0; i < M.rank && filtered; ++i)
        for (int mu = 0; mu < f && filtered; ++mu)
            if (!diag_theta_exp(M, i, mu)) filtered = false;
    for (int j = 0; j < N.rank && filtered; ++j)
        for (int mu = 0; mu < f && filtered; ++mu)
            if (!diag_theta_exp(N, j, mu)) filtered = false;
    if (filtered) {
        for (int i = 0; i < M.rank; ++i)
            for (int j = 0; j < N.rank; ++j)
                for (int mu = 0; mu < f; ++mu) {
                    long tM = *diag_theta_exp(M, i, mu);
                    long tN = *diag_theta_exp(N, j, mu);
                    // theta^{d p^mu} c = theta^{tM - tN} c : d = (tM-tN) p^{-mu} mod e
                    long pmu = pow_mod(p, mu, e);
                    long d0 = ((tM - tN) % e + e) % e * inv_mod(pmu, e) % e;
                    for (int d = (int)d0; d < ep; d += e)
                        for (int t = 0; t < dimA; ++t) unknowns.push_back({i, j, mu, d, t});
                }
    } else {
        long total = (long)M.rank * N.rank * f * ep * dimA;
        if (total > 4000) throw error("morphism search without descent filtering is too large");
        for (int i = 0; i < M.rank; ++i)
            for (int j = 0; j < N.rank; ++j)
                for (int mu = 0; mu < f; ++mu)
                    for (int d = 0; d < ep; ++d)
                        for (int t = 0; t < dimA; ++t) unknowns.push_back({i, j, mu, d, t});
    }

    auto materialize = [&](const std::vector<SmallField::elt>& coef) {
        std::vector<std::vector<BElt>> C(M.rank, std::vector<BElt>(N.rank, BElt::zero(B)));
        for (size_t u = 0; u < unknowns.size(); ++u) {
            if (coef[u] == 0) continue;
            auto& U = unknowns[u];
            AElt& tgt = C[U.i][U.j].c[(size_t)U.mu * ep + U.d];
            a_coord_set(tgt, U.t, kE->add(a_coord(tgt, U.t), coef[u]));
        }
        return C;
    };

    // constraint evaluation for a single unknown direction
    auto constraints_of = [&](const std::vector<std::vector<BElt>>& C) {
        std::vector<SmallField::elt> rows;
        auto append_vec = [&](const std::vector<BElt>& v) {
            for (auto& x : v)
                for (auto& a : x.c)
                    for (int t = 0; t < dimA; ++t) rows.push_back(a_coord(a, t));
        };
        auto apply_f = [&](const std::vector<BElt>& x) {
            std::vector<BElt> out(N.rank, BElt::zero(B));
            for (int i = 0; i < M.rank; ++i)
                for (int j = 0; j < N.rank; ++j) out[j] = out[j] + x[i] * C[i][j];
            return out;
        };
        // descent commutation (g0 always; gphi when present)
        std::vector<DescentElement> gens = {DescentElement::g0()};
        if (B->fd.has_gphi) gens.push_back(DescentElement::gphi());
        for (auto& g : gens) {
            for (int i = 0; i < M.rank; ++i) {
                // f(ghat(m_i)) - ghat(f(m_i))
                std::vector<BElt> gm(M.rank, BElt::zero(B));
                const auto& mat = (g.frob ? M.gphi_mat : M.g0_mat);
                for (int kk = 0; kk < M.rank; ++kk) gm[kk] = mat[i][kk];
                std::vector<BElt> lhs(N.rank, BElt::zero(B));
                for (int kk = 0; kk < M.rank; ++kk)
                    for (int j = 0; j < N.rank; ++j) lhs[j] = lhs[j] + gm[kk] * C[kk][j];
                // rhs: ghat_N(f(m_i)): f(m_i) = row C[i]
                std::vector<BElt> fm(N.rank, BElt::zero(B));
                for (int j = 0; j < N.rank; ++j) fm[j] = C[i][j];
                auto rhs = opsN.apply_matrix_semilinear(g.frob ? N.gphi_mat : N.g0_mat, fm, g);
                std::vector<BElt> diff(N.rank, BElt::zero(B));
                for (int j = 0; j < N.rank; ++j) diff[j] = lhs[j] - rhs[j];
                append_vec(diff);
            }
        }
        // Fil preservation + phi1 commutation on the M-generators
        for (size_t l = 0; l < M.gens.size(); ++l) {
            auto x = apply_f(M.gens[l]);
            auto res = opsN.membership_residual(x);
            for (auto v : res) rows.push_back(v);
            auto lhs = opsN.phi1_linear(x);
            auto rhs = apply_f(M.phi1_gens[l]);
            std::vector<BElt> diff(N.rank, BElt::zero(B));
            for (int j = 0; j < N.rank; ++j) diff[j] = lhs[j] - rhs[j];
            append_vec(diff);
        }
        // phi1 commutation on u^e m_i
        for (int i = 0; i < M.rank; ++i) {
            std::vector<BElt> lhs(N.rank, BElt::zero(B));
            for (int j = 0; j < N.rank; ++j) {
                BElt tw = C[i][j].twist();
                for (int j2 = 0; j2 < N.rank; ++j2) lhs[j2] = lhs[j2] + tw * N.phibar[j][j2];
            }
            auto rhs = apply_f(M.phibar[i]);
            std::vector<BElt> diff(N.rank, BElt::zero(B));
            for (int j = 0; j < N.rank; ++j) diff[j] = lhs[j] - rhs[j];
            append_vec(diff);
        }
        return rows;
    };

    // assemble the constraint matrix column by column
    int nrows = -1;
    KMat A = KMat::make(kE, 1, (int)unknowns.size());
    for (size_t u = 0; u < unknowns.size(); ++u) {
        std::vector<SmallField::elt> unit(unknowns.size(), 0);
        unit[u] = 1;
        auto rows = constraints_of(materialize(unit));
        if (nrows < 0) {
            nrows = (int)rows.size();
            A = KMat::make(kE, nrows, (int)unknowns.size());
        }
        for (int r = 0; r < nrows; ++r) A.at(r, (int)u) = rows[r];
    }
    if (unknowns.empty()) return {};
    Echelon ech;
    ech.build(A);
    std::vector<std::vector<std::vector<BElt>>> out;
    for (auto& kv : ech.kernel()) {
        auto C = materialize(kv);
        if (!morphism_check_with(M, N, C, opsN)) throw error("morphism solver produced an invalid solution");
        out.push_back(std::move(C));
    }
    return out;
}

bool morphism_check(const BreuilModule& M, const BreuilModule& N, const std::vector<std::vector<BElt>>& C) {
    BreuilOps opsN(N);
    return morphism_check_with(M, N, C, opsN);
}

bool morphism_check_with(const BreuilModule& M, const BreuilModule& N, const std::vector<std::vector<BElt>>& C,
                         const BreuilOps& opsN) {
    auto B = N.B;
    auto apply_f = [&](const std::vector<BElt>& x) {
        std::vector<BElt> out(N.rank, BElt::zero(B));
        for (int i = 0; i < M.rank; ++i)
            for (int j = 0; j < N.rank; ++j) out[j] = out[j] + x[i] * C[i][j];
        return out;
    };
    // descent
    std::vector<DescentElement> gens = {DescentElement::g0()};
    if (B->fd.has_gphi) gens.push_back(DescentElement::gphi());
    for (auto& g : gens) {
        for (int i = 0; i < M.rank; ++i) {
            std::vector<BElt> lhs(N.rank, BElt::zero(B));
            const auto& mat = (g.frob ? M.gphi_mat : M.g0_mat);
            for (int kk = 0; kk < M.rank; ++kk)
                for (int j = 0; j < N.rank; ++j) lhs[j] = lhs[j] + mat[i][kk] * C[kk][j];
            std::vector<BElt> fm(N.rank, BElt::zero(B));
            for (int j = 0; j < N.rank; ++j) fm[j] = C[i][j];
            auto rhs = opsN.apply_matrix_semilinear(g.frob ? N.gphi_mat : N.g0_mat, fm, g);
            for (int j = 0; j < N.rank; ++j)
                if (!(lhs[j] - rhs[j]).is_zero()) return false;
        }
    }
    // Fil + phi1 on generators
    for (size_t l = 0; l < M.gens.size(); ++l) {
        auto x = apply_f(M.gens[l]);
        if (!opsN.in_fil1(x)) return false;
        auto lhs = opsN.phi1(x);
        auto rhs = apply_f(M.phi1_gens[l]);
        for (int j = 0; j < N.rank; ++j)
            if (!(lhs[j] - rhs[j]).is_zero()) return false;
    }
    // phi1 on u^e m_i
    for (int i = 0; i < M.rank; ++i) {
        std::vector<BElt> lhs(N.rank, BElt::zero(B));
        for (int j = 0; j < N.rank; ++j) {
            BElt tw = C[i][j].twist();
            for (int j2 = 0; j2 < N.rank; ++j2) lhs[j2] = lhs[j2] + tw * N.phibar[j][j2];
        }
        auto rhs = apply_f(M.phibar[i]);
        for (int j = 0; j < N.rank; ++j)
            if (!(lhs[j] - rhs[j]).is_zero()) return false;
    }
    return true;
}

long morphism_search_space_log2(const BreuilModule& M, const BreuilModule& N) {
    double bits = (double)M.rank * N.rank * M.B->fd.f * M.B->ep * (1 + M.B->A->nnil);
    double lg = bits * std::log2((double)M.B->A->kE->order());
    return (long)lg;
}

std::vector<std::vector<std::vector<BElt>>> find_morphisms_bruteforce(const BreuilModule& M,
                                                                      const BreuilModule& N) {
    if (morphism_search_space_log2(M, N) > 20) throw error("brute-force space exceeds 2^20");
    auto B = N.B;
    auto kE = B->A->kE;
    const int dimA = 1 + B->A->nnil;
    long q = kE->order();
    long cells = (long)M.rank * N.rank * B->fd.f * B->ep * dimA;
    long total = 1;
    for (long i = 0; i < cells; ++i) total *= q;
    std::vector<std::vector<std::vector<BElt>>> out;
    std::vector<SmallField::elt> digits(cells, 0);
    BreuilOps opsN(N);
    for (long n = 0; n < total; ++n) {
        // decode digits
        long m = n;
        for (long i = 0; i < cells; ++i) {
            digits[i] = (SmallField::elt)(m % q);
            m /= q;
        }
        std::vector<std::vector<BElt>> C(M.rank, std::vector<BElt>(N.rank, BElt::zero(B)));
        long idx = 0;
        for (int i = 0; i < M.rank; ++i)
            for (int j = 0; j < N.rank; ++j)
                for (int mu = 0; mu < B->fd.f; ++mu)
                    for (int d = 0; d < B->ep; ++d)
                        for (int t = 0; t < dimA; ++t, ++idx)
                            if (digits[idx] != 0) a_coord_set(C[i][j].c[(size_t)mu * B->ep + d], t, digits[idx]);
        if (morphism_check_with(M, N, C, opsN)) out.push_back(std::move(C));
    }
    return out;
}

// ---------------------------------------------------------------------------
// catalogue modules

BreuilModule standard_rank1(BCtxP B, SmallField::elt abar_inv, long exponent) {
    if (abar_inv == 0) throw inadmissible_parameters("unramified parameter must be nonzero");
    BreuilModule M;
    M.B = B;
    M.rank = 1;
    M.phibar = {{BElt::scalar(B, AElt{abar_inv, {0, 0}})}};
    auto kE = B->A->kE;
    long e = B->fd.e;
    long t = ((exponent % e) + e) % e;
    M.g0_mat = {{BElt::scalar(B, AElt{kE->pow(B->thetabar, t), {0, 0}})}};
    if (B->fd.has_gphi) M.gphi_mat = {{BElt::one(B)}};
    M.label = "std";
    return M;
}

BreuilModule minimal_rank1(BCtxP B, SmallField::elt abar_inv, long exponent) {
    if (abar_inv == 0) throw inadmissible_parameters("unramified parameter must be nonzero");
    BreuilModule M;
    M.B = B;
    M.rank = 1;
    M.gens = {{BElt::one(B)}};
    M.phi1_gens = {{BElt::scalar(B, AElt{abar_inv, {0, 0}})}};
    M.phibar = {{BElt::zero(B)}};
    auto kE = B->A->kE;
    long e = B->fd.e;
    long t = ((exponent % e) + e) % e;
    M.g0_mat = {{BElt::scalar(B, AElt{kE->pow(B->thetabar, t), {0, 0}})}};
    if (B->fd.has_gphi) M.gphi_mat = {{BElt::one(B)}};
    M.label = "min";
    return M;
}

bool CharacterDescriptor::operator==(const CharacterDescriptor& o) const {
    if (over_Qp2 != o.over_Qp2 || niveau != o.niveau || lambda != o.lambda || p != o.p) return false;
    long mod = niveau == 2 ? p * p - 1 : p - 1;
    return ((exponent - o.exponent) % mod + mod) % mod == 0;
}

std::string CharacterDescriptor::to_string(const SmallField& kE) const {
    std::ostringstream os;
    os << "lambda_" << kE.to_string(lambda) << "*";
    os << (niveau == 2 ? "omega2^" : "omega^") << exponent;
    if (over_Qp2) os << " (over Qp2)";
    return os.str();
}

CharacterDescriptor character_of_rank1(const BreuilModule& M) {
    if (M.rank != 1) throw not_recognized("character readoff requires rank 1");
    auto B = M.B;
    auto kE = B->A->kE;
    const long p = B->fd.p;
    const long e = B->fd.e;
    // descent exponent per component
    auto t0 = diag_theta_exp(M, 0, 0);
    if (!t0) throw not_recognized("descent action is not a theta-power");
    // shape: either Fil^1 = u^e M (no gens) or a single generator u^c * unit
    long c;
    SmallField::elt alpha;
    if (M.gens.empty()) {
        c = e;
        const BElt& pv = M.phibar[0][0];
        if (pv.u_order() != 0) throw not_recognized("phi1(u^e e) is not a unit constant");
        alpha = pv.c[0].c0;
        for (int mu = 0; mu < B->fd.f; ++mu) {
            const AElt& a = pv.c[(size_t)mu * B->ep];
            if (a.c0 != alpha || a.nil[0] != 0 || a.nil[1] != 0)
                throw not_recognized("phi1 constant differs between components");
        }
    } else if (M.gens.size() == 1) {
        const BElt& g = M.gens[0][0];
        c = g.u_order();
        // generator must be (unit) u^c on every component
        for (int mu = 0; mu < B->fd.f; ++mu)
            for (int d = 0; d < B->ep; ++d) {
                const AElt& a = g.c[(size_t)mu * B->ep + d];
                if (d != c && !B->a_zero(a)) throw not_recognized("generator is not a monomial");
                if (d == (int)c && (a.c0 == 0 || a.nil[0] != 0 || a.nil[1] != 0))
                    throw not_recognized("generator is not unit * u^c");
            }
        // normalize so the generator is exactly u^c: phi1(s h) = twist(s) phi1(h)
        const BElt& ph = M.phi1_gens[0][0];
        if (ph.u_order() != 0) throw not_recognized("phi1 of the generator is not constant");
        // alpha per component after normalizing the generator's unit away:
        // if gen = s u^c with s constant unit, phi1(u^c e) = twist(s)^{-1} phi1(gen)
        auto s0 = g.c[(size_t)0 * B->ep + c].c0;
        auto s1 = B->fd.f == 2 ? g.c[(size_t)1 * B->ep + c].c0 : s0;
        auto a0 = ph.c[0].c0;
        auto a1 = B->fd.f == 2 ? ph.c[(size_t)B->ep].c0 : a0;
        // twist swaps components
        auto n0 = kE->mul(a0, kE->inv(s1));
        auto n1 = kE->mul(a1, kE->inv(s0));
        if (n0 != n1) throw not_recognized("phi1 constant differs between components");
        alpha = n0;
    } else {
        throw not_recognized("more than one Fil^1 generator");
    }
    if ((p * (e - c)) % (p - 1) != 0) throw not_recognized("no standard morphism degree");
    long b = p * (e - c) / (p - 1);
    long tau = *t0;
    long exp_theta = ((tau - b) % e + e) % e; // standard-module descent parameter
    long chi_exp_theta = (exp_theta + e / (p - 1)) % e;
    CharacterDescriptor chi;
    chi.p = p;
    chi.lambda = kE->inv(alpha);
    if (B->fd.f == 1) {
        chi.over_Qp2 = false;
        chi.niveau = 1;
        chi.exponent = chi_exp_theta; // omega-exponent
    } else if (B->fd.has_gphi) {
        chi.over_Qp2 = false;
        if (chi_exp_theta % (p + 1) != 0) throw not_recognized("descent does not factor through a niveau-1 character");
        chi.niveau = 1;
        chi.exponent = chi_exp_theta / (p + 1);
    } else {
        chi.over_Qp2 = true;
        chi.exponent = chi_exp_theta; // omega_2-exponent
        chi.niveau = chi_exp_theta % (p + 1) == 0 ? 1 : 2;
        // value on Frob_{p^2}: the square (the a and -a models are isomorphic)
        chi.lambda = kE->mul(chi.lambda, chi.lambda);
    }
    // cross-check: nonzero morphism to the standard model of the character
    BreuilModule std_model = standard_rank1(B, alpha, exp_theta);
    if (find_morphisms(M, std_model).empty()) throw not_recognized("no morphism to the standard model");
    return chi;
}

bool is_maximal_model(const BreuilModule& M) {
    for (auto& g : M.gens)
        for (auto& c : g)
            if (c.u_order() < M.B->fd.e) return false;
    return true;
}

bool is_minimal_model(const BreuilModule& M) {
    // Fil^1 = M': the generators span M' mod u
    auto kE = M.B->A->kE;
    KMat m = KMat::make(kE, (int)M.gens.size() * M.B->fd.f, M.rank * M.B->fd.f);
    for (size_t l = 0; l < M.gens.size(); ++l)
        for (int i = 0; i < M.rank; ++i)
            for (int mu = 0; mu < M.B->fd.f; ++mu)
                m.at((int)l * M.B->fd.f + mu, i * M.B->fd.f + mu) = M.gens[l][i].c[(size_t)mu * M.B->ep].c0;
    Echelon ech;
    ech.build(m);
    return ech.rank() == M.rank * M.B->fd.f;
}

BreuilModule restrict_descent(const BreuilModule& M) {
    if (!M.B->fd.has_gphi) throw inadmissible_parameters("descent is already over Q_{p^2}");
    BreuilModule N = M;
    auto B2 = make_bctx(FieldDatum::F2_over_Qp2(M.B->fd.p), M.B->A, nullptr);
    N.B = B2;
    auto fix = [&](std::vector<std::vector<BElt>>& mat) {
        for (auto& row : mat)
            for (auto& x : row) x.B = B2;
    };
    fix(N.gens);
    fix(N.phi1_gens);
    fix(N.phibar);
    fix(N.g0_mat);
    N.gphi_mat.clear();
    return N;
}

BreuilModule quotient_by_linear_form(const BreuilModule& M, SmallField::elt c0, SmallField::elt c1) {
    auto kE = M.B->A->kE;
    if (M.B->A->nnil != 2) throw unsupported_map("linear-form quotient requires two nilpotents");
    if (c0 == 0 && c1 == 0) throw unsupported_map("zero linear form");
    auto Anew = make_actx(kE, 1, "X");
    auto B2 = make_bctx(M.B->fd, Anew, nullptr);
    // L = c0 X1 + c1 X2 = 0: if c1 != 0: X1 -> X, X2 -> -c0/c1 X; else X2 -> X, X1 -> 0...
    SmallField::elt m1, m2;
    if (c1 != 0) {
        m1 = 1;
        m2 = kE->neg(kE->mul(c0, kE->inv(c1)));
    } else {
        m1 = 0;
        m2 = 1;
    }
    auto conv = [&](const BElt& x) {
        BElt y = BElt::zero(B2);
        for (size_t i = 0; i < x.c.size(); ++i) {
            const AElt& a = x.c[i];
            y.c[i].c0 = a.c0;
            y.c[i].nil[0] = kE->add(kE->mul(m1, a.nil[0]), kE->mul(m2, a.nil[1]));
        }
        return y;
    };
    BreuilModule N;
    N.B = B2;
    N.rank = M.rank;
    N.label = M.label + "/L";
    auto cv = [&](const std::vector<std::vector<BElt>>& mat) {
        std::vector<std::vector<BElt>> out(mat.size());
        for (size_t i = 0; i < mat.size(); ++i)
            for (auto& x : mat[i]) out[i].push_back(conv(x));
        return out;
    };
    N.gens = cv(M.gens);
    N.phi1_gens = cv(M.phi1_gens);
    N.phibar = cv(M.phibar);
    N.g0_mat = cv(M.g0_mat);
    if (M.B->fd.has_gphi) N.gphi_mat = cv(M.gphi_mat);
    return N;
}

BreuilModule kill_nilpotents(const BreuilModule& M) {
    auto Anew = make_actx(M.B->A->kE, 0);
    auto B2 = make_bctx(M.B->fd, Anew, nullptr);
    BreuilModule N;
    N.B = B2;
    N.rank = M.rank;
    N.label = M.label + "/nil";
    auto conv = [&](const BElt& x) {
        BElt y = BElt::zero(B2);
        for (size_t i = 0; i < x.c.size(); ++i) y.c[i].c0 = x.c[i].c0;
        return y;
    };
    auto cv = [&](const std::vector<std::vector<BElt>>& mat) {
        std::vector<std::vector<BElt>> out(mat.size());
        for (size_t i = 0; i < mat.size(); ++i)
            for (auto& x : mat[i]) out[i].push_back(conv(x));
        return out;
    };
    N.gens = cv(M.gens);
    N.phi1_gens = cv(M.phi1_gens);
    N.phibar = cv(M.phibar);
    N.g0_mat = cv(M.g0_mat);
    if (M.B->fd.has_gphi) N.gphi_mat = cv(M.gphi_mat);
    return N;
}

BreuilModule extend_coefficients(const BreuilModule& M, ACtxP Anew) {
    if (M.B->A->nnil != 0) throw unsupported_map("extend_coefficients expects a k_E-module source");
    auto B2 = make_bctx(M.B->fd, Anew, nullptr);
    BreuilModule N;
    N.B = B2;
    N.rank = M.rank;
    N.label = M.label;
    auto conv = [&](const BElt& x) {
        BElt y = BElt::zero(B2);
        for (size_t i = 0; i < x.c.size(); ++i) y.c[i].c0 = x.c[i].c0;
        return y;
    };
    auto cv = [&](const std::vector<std::vector<BElt>>& mat) {
        std::vector<std::vector<BElt>> out(mat.size());
        for (size_t i = 0; i < mat.size(); ++i)
            for (auto& x : mat[i]) out[i].push_back(conv(x));
        return out;
    };
    N.gens = cv(M.gens);
    N.phi1_gens = cv(M.phi1_gens);
    N.phibar = cv(M.phibar);
    N.g0_mat = cv(M.g0_mat);
    if (M.B->fd.has_gphi) N.gphi_mat = cv(M.gphi_mat);
    return N;
}

} // namespace breuil
