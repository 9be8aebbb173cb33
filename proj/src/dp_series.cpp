#include "breuil/dp_series.hpp"

#include <sstream>

namespace breuil {

std::string FieldDatum::name() const {
    if (f == 1) return "F1/Qp";
    return has_gphi ? "F2/Qp" : "F2/Qp2";
}

DescentElement DescentElement::compose(const DescentElement& o, const FieldDatum& fd) const {
    long ps = 1;
    for (int i = 0; i < frob; ++i) ps = ps * fd.p % fd.e;
    long tw = (twist + o.twist % fd.e * ps) % fd.e;
    if (tw < 0) tw += fd.e;
    int fr = fd.has_gphi ? (frob + o.frob) % 2 : 0;
    return {tw, fr};
}

TC TC::scalar(FamilyCtxP F, int f, const RElem& a) {
    TC t;
    t.f = f;
    t.z[0] = a;
    if (f == 2) t.z[1] = a;
    return t;
}

TC TC::from_components(const RElem& a, const RElem& b) {
    TC t;
    t.f = 2;
    t.z[0] = a;
    t.z[1] = b;
    return t;
}

bool TC::is_zero() const {
    for (int i = 0; i < f; ++i)
        if (!z[i].is_zero()) return false;
    return true;
}

int TC::min_abs_prec() const {
    int m = 1 << 20;
    for (int i = 0; i < f; ++i) m = std::min(m, z[i].min_prec());
    return m;
}

TC TC::operator+(const TC& o) const {
    TC t;
    t.f = f;
    for (int i = 0; i < f; ++i) t.z[i] = z[i] + o.z[i];
    return t;
}

TC TC::operator-(const TC& o) const {
    TC t;
    t.f = f;
    for (int i = 0; i < f; ++i) t.z[i] = z[i] - o.z[i];
    return t;
}

TC TC::operator-() const {
    TC t;
    t.f = f;
    for (int i = 0; i < f; ++i) t.z[i] = -z[i];
    return t;
}

TC TC::operator*(const TC& o) const {
    TC t;
    t.f = f;
    for (int i = 0; i < f; ++i) t.z[i] = z[i] * o.z[i];
    return t;
}

TC TC::mul_relem(const RElem& a) const {
    TC t;
    t.f = f;
    for (int i = 0; i < f; ++i) t.z[i] = z[i] * a;
    return t;
}

TC TC::mul_OE(const OE& a) const {
    TC t;
    t.f = f;
    for (int i = 0; i < f; ++i) t.z[i] = z[i].mul_OE(a);
    return t;
}

TC TC::mul_int(long n) const {
    TC t;
    t.f = f;
    for (int i = 0; i < f; ++i) t.z[i] = z[i].mul_int(n);
    return t;
}

TC TC::frob_shift(int s) const {
    TC t;
    t.f = f;
    for (int i = 0; i < f; ++i) t.z[i] = z[(i + s) % f];
    return t;
}

TC TC::divide_exact_p(int k) const {
    TC t;
    t.f = f;
    for (int i = 0; i < f; ++i) t.z[i] = z[i].divide_exact_p(k);
    return t;
}

TC TC::inv_unit() const {
    TC t;
    t.f = f;
    for (int i = 0; i < f; ++i) t.z[i] = z[i].inv_unit();
    return t;
}

bool TC::is_unit() const {
    for (int i = 0; i < f; ++i)
        if (!z[i].is_unit()) return false;
    return true;
}

SCtx::SCtx(FieldDatum fd_, FamilyCtxP F_, int umax_) : fd(fd_), F(std::move(F_)), R(F->R), umax(umax_) {
    if (R->p != fd.p) throw error("field datum and coefficient ring disagree on p");
    if (fd.f == 2 && R->fE != 2) throw inadmissible_parameters("F2 coefficients require k_E >= F_{p^2}");
    if (umax < fd.e) throw inadmissible_parameters("truncation too small");
    long top = umax / fd.e + fd.p + 2;
    fact_val.resize(top + 1);
    fact_unit.resize(top + 1);
    fact_val[0] = 0;
    fact_unit[0] = OE::one(R);
    for (long k = 1; k <= top; ++k) {
        long kk = k;
        int v = 0;
        while (kk % fd.p == 0) {
            kk /= fd.p;
            ++v;
        }
        fact_val[k] = fact_val[k - 1] + v;
        fact_unit[k] = fact_unit[k - 1].mul_int(kk);
    }
    binom.resize(top + 1);
    for (long n = 0; n <= top; ++n) {
        binom[n].assign(n + 1, OE::one(R));
        for (long k = 1; k < n; ++k) binom[n][k] = binom[n - 1][k - 1] + binom[n - 1][k];
    }
    // theta: Teichmuller generator of exact order e
    if (fd.f == 1) {
        // generator of F_p^* inside k_E
        auto kE = R->kE;
        long q = kE->order();
        SmallField::elt g = kE->pow(kE->gen(), (q - 1) / (fd.p - 1));
        theta = OE::teichmuller(R, g);
    } else {
        theta = OE::teichmuller(R, R->kE->gen());
    }
}

OE SCtx::fact_ratio(long k1, long k2) const {
    if (k1 < k2) throw error("fact_ratio expects k1 >= k2");
    OE u = fact_unit[k1] * fact_unit[k2].inv_unit();
    return u.divide_exact_p((int)-(fact_val[k1] - fact_val[k2]));
}

OE SCtx::dp_factor(long n, long a, long b) const {
    // n!/(a! b!) = binom(n, b) * (n-b)!/a!, both factors integral
    return binom[n][b] * fact_ratio(n - b, a);
}

OE SCtx::theta_pow(long k) const {
    long e = fd.e;
    long kk = ((k % e) + e) % e;
    return theta.pow(kk);
}

SCtxP make_sctx(FieldDatum fd, FamilyCtxP F, int umax) {
    if (umax < 0) umax = 3 * fd.e * (int)fd.p;
    return std::make_shared<const SCtx>(fd, F, umax);
}

DPSeries DPSeries::one(SCtxP S) { return constant_relem(S, RElem::one(S->F)); }

DPSeries DPSeries::constant(SCtxP S, const TC& c) {
    DPSeries s(S);
    s.set_coord(0, c);
    return s;
}

DPSeries DPSeries::constant_relem(SCtxP S, const RElem& c) {
    return constant(S, TC::scalar(S->F, S->fd.f, c));
}

DPSeries DPSeries::constant_OE(SCtxP S, const OE& c) {
    return constant_relem(S, RElem::from_OE(S->F, c));
}

DPSeries DPSeries::monomial(SCtxP S, int k, const TC& c) {
    DPSeries s(S);
    if (k > S->umax) return s; // beyond certification: structurally dropped
    OE fac = S->fact_ratio(k / S->fd.e, 0);
    s.set_coord(k, c.mul_OE(fac));
    return s;
}

DPSeries DPSeries::monomial_OE(SCtxP S, int k, const OE& c) {
    return monomial(S, k, TC::scalar(S->F, S->fd.f, RElem::from_OE(S->F, c)));
}

DPSeries DPSeries::dp_monomial(SCtxP S, int k, const TC& c) {
    DPSeries s(S);
    if (k > S->umax) return s;
    s.set_coord(k, c);
    return s;
}

DPSeries DPSeries::E(SCtxP S) {
    DPSeries s(S);
    RElem one = RElem::one(S->F);
    RElem pp = RElem::from_OE(S->F, OE::from_int(S->R, S->fd.p));
    s.set_coord(0, TC::scalar(S->F, S->fd.f, pp));
    s.set_coord(S->fd.e, TC::scalar(S->F, S->fd.f, one)); // floor(e/e)! = 1
    return s;
}

DPSeries DPSeries::c_phi1E(SCtxP S) {
    // phi(E) = u^{ep} + p, so c = u^{ep}/p + 1; canonical coordinate of
    // u^{ep}/p is p!/p = (p-1)!.
    DPSeries s = one(S);
    long p = S->fd.p;
    OE fac = S->fact_ratio(p, 0).divide_exact_p(1);
    s.set_coord((int)(S->fd.e * p), TC::scalar(S->F, S->fd.f, RElem::from_OE(S->F, fac)));
    return s;
}

TC DPSeries::coord(int j) const {
    auto it = r_.find(j);
    if (it != r_.end()) return it->second;
    return TC::scalar(S_->F, S_->fd.f, RElem::zero(S_->F));
}

void DPSeries::set_coord(int j, const TC& c) {
    if (j > S_->umax || j < 0) throw truncation_overflow();
    r_[j] = c;
}

void DPSeries::add_coord(int j, const TC& c) {
    auto it = r_.find(j);
    if (it == r_.end())
        r_[j] = c;
    else
        it->second = it->second + c;
}

TC DPSeries::plain_coeff(int j) const {
    TC c = coord(j);
    long k = j / S_->fd.e;
    OE inv_fac = S_->fact_unit[k].inv_unit().shift_p(-(int)S_->fact_val[k]);
    return c.mul_OE(inv_fac);
}

bool DPSeries::is_zero() const {
    for (auto& [j, c] : r_)
        if (!c.is_zero()) return false;
    return true;
}

int DPSeries::cert_prec() const {
    int m = S_->R->N;
    for (auto& [j, c] : r_) m = std::min(m, c.min_abs_prec());
    return m;
}

DPSeries DPSeries::operator+(const DPSeries& o) const {
    DPSeries s(S_);
    s.r_ = r_;
    for (auto& [j, c] : o.r_) s.add_coord(j, c);
    return s;
}

DPSeries DPSeries::operator-() const {
    DPSeries s(S_);
    for (auto& [j, c] : r_) s.r_[j] = -c;
    return s;
}

DPSeries DPSeries::operator-(const DPSeries& o) const { return *this + (-o); }

DPSeries DPSeries::mul(const DPSeries& o, bool demand_exact) const {
    DPSeries s(S_);
    const int e = S_->fd.e;
    for (auto& [a, ca] : r_) {
        for (auto& [b, cb] : o.r_) {
            int n = a + b;
            if (n > S_->umax) {
                if (demand_exact && !ca.is_zero() && !cb.is_zero()) throw truncation_overflow();
                continue;
            }
            // r_n += ca * cb * ( floor(n/e)! / (floor(a/e)! floor(b/e)!) )
            OE fac = S_->dp_factor(n / e, a / e, b / e);
            s.add_coord(n, (ca * cb).mul_OE(fac));
        }
    }
    return s;
}

DPSeries DPSeries::operator*(const DPSeries& o) const { return mul(o, false); }

DPSeries DPSeries::mul_tc(const TC& c) const {
    DPSeries s(S_);
    for (auto& [j, cj] : r_) s.r_[j] = cj * c;
    return s;
}

DPSeries DPSeries::mul_relem(const RElem& c) const {
    DPSeries s(S_);
    for (auto& [j, cj] : r_) s.r_[j] = cj.mul_relem(c);
    return s;
}

DPSeries DPSeries::mul_OE(const OE& c) const {
    DPSeries s(S_);
    for (auto& [j, cj] : r_) s.r_[j] = cj.mul_OE(c);
    return s;
}

DPSeries DPSeries::mul_int(long n) const {
    DPSeries s(S_);
    for (auto& [j, cj] : r_) s.r_[j] = cj.mul_int(n);
    return s;
}

DPSeries DPSeries::shift_u(int k) const {
    DPSeries s(S_);
    const int e = S_->fd.e;
    for (auto& [j, c] : r_) {
        int n = j + k;
        if (n > S_->umax) continue;
        OE fac = S_->fact_ratio(n / e, j / e);
        s.add_coord(n, c.mul_OE(fac));
    }
    return s;
}

DPSeries DPSeries::phi() const {
    DPSeries s(S_);
    const int e = S_->fd.e;
    const long p = S_->fd.p;
    for (auto& [j, c] : r_) {
        long n = (long)j * p;
        if (n > S_->umax) continue;
        OE fac = S_->fact_ratio(n / e, j / e);
        s.add_coord((int)n, c.frob_shift(1).mul_OE(fac));
    }
    return s;
}

DPSeries DPSeries::phi1() const {
    // phi/p makes sense on Fil^1 S + pS (expand-by-E constant term zero mod p)
    auto q = expand_by_E();
    if (!q.empty() && !q[0].is_zero()) {
        bool divisible = true;
        for (auto& [j, c] : q[0].coords()) {
            (void)j;
            for (int mu = 0; mu < S_->fd.f; ++mu)
                for (int i = 0; i < c.z[mu].ncoords(); ++i) {
                    auto v = c.z[mu].coord(i).valuation();
                    if (v && v->first * 1 < v->second) divisible = false;
                }
        }
        if (!divisible) throw not_in_fil1();
    }
    return phi().divide_exact_p(1);
}

DPSeries DPSeries::monodromy() const {
    DPSeries s(S_);
    for (auto& [j, c] : r_) {
        if (j == 0) continue;
        s.r_[j] = c.mul_int(-(long)j);
    }
    return s;
}

DPSeries DPSeries::descent(const DescentElement& g) const {
    DPSeries s(S_);
    int fr = S_->fd.has_gphi ? g.frob % 2 : 0;
    for (auto& [j, c] : r_) {
        TC t = c.frob_shift(fr);
        // component mu gets theta^(twist * j * p^mu)
        TC out = t;
        for (int mu = 0; mu < S_->fd.f; ++mu) {
            long expn = g.twist % S_->fd.e * (long)j % S_->fd.e;
            for (int q = 0; q < mu; ++q) expn = expn * S_->fd.p % S_->fd.e;
            out.z[mu] = t.z[mu].mul_OE(S_->theta_pow(expn));
        }
        s.r_[j] = out;
    }
    return s;
}

DPSeries DPSeries::divide_exact_p(int k) const {
    DPSeries s(S_);
    for (auto& [j, c] : r_) s.r_[j] = c.divide_exact_p(k);
    return s;
}

DPSeries DPSeries::inv_unit() const {
    TC c0 = coord(0);
    if (!c0.is_unit()) throw error("DPSeries::inv_unit: constant term not a unit");
    TC c0i = c0.inv_unit();
    DPSeries t(S_);
    t.set_coord(0, c0i);
    // solve (this * t)_n = 0 for n >= 1 degree by degree
    const int e = S_->fd.e;
    for (int n = 1; n <= S_->umax; ++n) {
        // acc = sum_{a+b=n, b<n} r_a(this) t_b C(a,b)
        bool any = false;
        TC acc = TC::scalar(S_->F, S_->fd.f, RElem::zero(S_->F));
        for (auto& [a, ca] : r_) {
            if (a <= 0 || a > n) continue;
            int b = n - a;
            auto it = t.r_.find(b);
            if (it == t.r_.end()) continue;
            OE fac = S_->dp_factor(n / e, a / e, b / e);
            acc = acc + (ca * it->second).mul_OE(fac);
            any = true;
        }
        if (!any) continue;
        // r_0 * t_n * C(n,0)=... C with a=0: fac = fact(n/e)/fact(n/e)=1? no:
        // C(0,n) = floor(n/e)!/(0! floor(n/e)!) = 1, so t_n = -c0^{-1} acc
        t.r_[n] = -(c0i * acc);
    }
    return t;
}

std::vector<DPSeries> DPSeries::expand_by_E() const {
    // E^i/i! has canonical coordinate p^{i-k}/(i-k)! at degree ek
    const int e = S_->fd.e;
    int top = S_->umax / e;
    std::vector<DPSeries> q;
    q.reserve(top + 1);
    DPSeries rem = *this;
    for (int i = 0; i <= top; ++i) q.emplace_back(DPSeries(S_));
    for (int i = top; i >= 0; --i) {
        // q_i coefficients are the canonical coordinates of rem in degrees [ie, ie+e)
        DPSeries qi(S_);
        bool nonzero = false;
        for (int m = 0; m < e && i * e + m <= S_->umax; ++m) {
            auto it = rem.r_.find(i * e + m);
            if (it == rem.r_.end()) continue;
            qi.set_coord(m, it->second);
            nonzero = true;
        }
        q[i] = qi;
        if (!nonzero) continue;
        // subtract qi * E^i/i!
        for (int k = 0; k <= i; ++k) {
            // term at degree ek+m: qi_m * p^{i-k}/(i-k)! * C-factor
            // E^i/i! canonical coordinate at ek: p^{i-k}/(i-k)!
            OE coef = S_->fact_unit[i - k].inv_unit().shift_p((i - k) - (int)S_->fact_val[i - k]);
            for (auto& [m, cm] : qi.r_) {
                int n = e * k + m;
                if (n > S_->umax) continue;
                // product of DP monomials: (u^m/0!)(u^{ek}/k!): coordinate at n:
                // floor(n/e)!/(floor(m/e)! k!) = (ek+m choose-type)/..., m<e so floor(m/e)=0
                OE fac = S_->fact_ratio(n / e, k);
                rem.add_coord(n, -(cm.mul_OE(coef * fac)));
            }
        }
    }
    return q;
}

DPSeries DPSeries::assemble_by_E(SCtxP S, const std::vector<DPSeries>& q) {
    DPSeries s(S);
    const int e = S->fd.e;
    for (int i = 0; i < (int)q.size(); ++i) {
        for (int k = 0; k <= i; ++k) {
            OE coef = S->fact_unit[i - k].inv_unit().shift_p((i - k) - (int)S->fact_val[i - k]);
            for (auto& [m, cm] : q[i].coords()) {
                int n = e * k + m;
                if (n > S->umax) continue;
                OE fac = S->fact_ratio(n / e, k);
                s.add_coord(n, cm.mul_OE(coef * fac));
            }
        }
    }
    return s;
}

bool DPSeries::fil1_membership() const {
    auto q = expand_by_E();
    return q.empty() || q[0].is_zero();
}

std::string DPSeries::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (auto& [j, c] : r_) {
        if (c.is_zero()) continue;
        if (!first) os << " + ";
        os << "[";
        for (int mu = 0; mu < S_->fd.f; ++mu) {
            if (mu) os << " | ";
            os << c.z[mu].to_string();
        }
        os << "]";
        if (j > 0) {
            os << "*u^" << j;
            if (j / S_->fd.e > 0) os << "/" << (j / S_->fd.e) << "!";
        }
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

} // namespace breuil
