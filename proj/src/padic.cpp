#include "breuil/padic.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace breuil {

namespace {

using u128 = unsigned __int128;

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) { return (u128)a * b % m; }

} // namespace

PadicCtx::PadicCtx(long p_, int N_, int eE_, int fE_) : p(p_), N(N_), eE(eE_), fE(fE_) {
    if (p < 3) throw inadmissible_parameters("p must be an odd prime >= 3");
    if (N < 1) throw inadmissible_parameters("precision must be >= 1");
    if (eE != 1 && eE != 2) throw inadmissible_parameters("eE must be 1 or 2");
    if (fE != 1 && fE != 2) throw inadmissible_parameters("fE must be 1 or 2");
    d = fE == 2 ? SmallField::least_nonresidue(p) : 0;
    kE = make_field(p, fE);
    pw_[0] = 1;
    pmax_ = 0;
    for (int k = 1; k < 64; ++k) {
        u128 next = (u128)pw_[k - 1] * (uint64_t)p;
        if (next > (u128)1 << 62) break;
        pw_[k] = (uint64_t)next;
        pmax_ = k;
    }
    if (N > pmax_ - 4) throw inadmissible_parameters("requested precision too large for 64-bit digits");
}

uint64_t PadicCtx::ppow(int k) const {
    if (k < 0 || k > pmax_) throw error("p-power out of range");
    return pw_[k];
}

PadicCtxP make_padic_ctx(long p, int N, int eE, int fE) {
    return std::make_shared<const PadicCtx>(p, N, eE, fE);
}

OE::OE(PadicCtxP R) : R_(std::move(R)), shift_(0), prec_(R_->N) { c_.fill(0); }

OE raw_make(PadicCtxP R, int shift, int prec, const std::array<uint64_t, 4>& c) {
    OE x;
    x.R_ = std::move(R);
    x.shift_ = shift;
    x.prec_ = prec;
    x.c_ = c;
    x.reduce_mod_prec();
    x.normalize();
    return x;
}

void OE::reduce_mod_prec() {
    if (prec_ <= 0) throw precision_exhausted();
    if (prec_ > R_->pmax()) prec_ = R_->pmax();
    uint64_t m = R_->ppow(prec_);
    for (auto& v : c_) v %= m;
}

void OE::normalize() {
    // strip p factors into shift while all coordinates are divisible
    while (prec_ > 1) {
        bool all = true;
        bool zero = true;
        for (auto v : c_) {
            if (v % (uint64_t)R_->p != 0) all = false;
            if (v != 0) zero = false;
        }
        if (zero || !all) break;
        for (auto& v : c_) v /= (uint64_t)R_->p;
        ++shift_;
        --prec_;
    }
    // canonical representation of a computed zero: shift 0, all absolute
    // knowledge in prec (prevents denominator shifts from eroding chains)
    if (shift_ != 0 && is_zero()) {
        int abs = shift_ + prec_;
        if (abs >= 1) {
            shift_ = 0;
            prec_ = std::min(abs, R_->pmax());
        }
    }
}

OE OE::from_int(PadicCtxP R, long n) {
    std::array<uint64_t, 4> c{0, 0, 0, 0};
    int shift = 0;
    long p = R->p;
    if (n != 0) {
        while (n % p == 0) {
            n /= p;
            ++shift;
        }
    }
    int prec = R->N;
    uint64_t m = R->ppow(prec);
    long r = n % (long)m;
    if (r < 0) r += (long)m;
    c[0] = (uint64_t)r;
    return raw_make(R, shift, prec, c);
}

OE OE::pi(PadicCtxP R) {
    if (R->eE == 1) throw inadmissible_parameters("pi requested in unramified O_E");
    std::array<uint64_t, 4> c{0, 0, 1, 0};
    return raw_make(R, 0, R->N, c);
}

OE OE::witt_t(PadicCtxP R) {
    if (R->fE == 1) throw inadmissible_parameters("t requested but k_E = F_p");
    std::array<uint64_t, 4> c{0, 1, 0, 0};
    return raw_make(R, 0, R->N, c);
}

OE OE::with_valuation(PadicCtxP R, long num, long den, const OE& unit) {
    if (den != 1 && den != R->eE) throw inadmissible_parameters("valuation denominator must divide eE");
    long pinum = num * (R->eE / den); // valuation in pi-digits
    if (pinum < 0) throw inadmissible_parameters("negative valuation for an O_E element");
    OE x = unit;
    long k = pinum / R->eE;
    long r = pinum % R->eE;
    for (long i = 0; i < r; ++i) x = x * pi(R);
    x.shift_ += (int)k;
    return x;
}

bool OE::is_zero() const {
    for (auto v : c_)
        if (v != 0) return false;
    return true;
}

std::optional<std::pair<long, long>> OE::valuation() const {
    long best_num = -1;
    for (int i = 0; i < R_->eE; ++i) {
        for (int j = 0; j < R_->fE; ++j) {
            uint64_t v = c_[idx(i, j)];
            if (v == 0) continue;
            int vp = 0;
            while (v % (uint64_t)R_->p == 0) {
                v /= (uint64_t)R_->p;
                ++vp;
            }
            long num = (long)vp * R_->eE + i; // valuation*eE of this monomial
            if (best_num < 0 || num < best_num) best_num = num;
        }
    }
    if (best_num < 0) return std::nullopt;
    return std::make_pair((long)shift_ * R_->eE + best_num, (long)R_->eE);
}

bool OE::is_unit() const {
    auto v = valuation();
    return v && v->first == 0;
}

OE OE::operator+(const OE& o) const {
    if (R_ != o.R_) throw error("mixed p-adic contexts");
    int s = std::min(shift_, o.shift_);
    int pa = prec_ + (shift_ - s);
    int pb = o.prec_ + (o.shift_ - s);
    int prec = std::min(pa, pb);
    prec = std::min(prec, R_->pmax());
    if (prec <= 0) throw precision_exhausted("addition exhausted precision");
    uint64_t m = R_->ppow(prec);
    std::array<uint64_t, 4> c{0, 0, 0, 0};
    uint64_t fa = R_->ppow(shift_ - s), fb = R_->ppow(o.shift_ - s);
    for (int k = 0; k < 4; ++k) c[k] = (mulmod(c_[k], fa, m) + mulmod(o.c_[k], fb, m)) % m;
    return raw_make(R_, s, prec, c);
}

OE OE::operator-() const {
    std::array<uint64_t, 4> c = c_;
    uint64_t m = R_->ppow(prec_);
    for (auto& v : c) v = (m - v % m) % m;
    return raw_make(R_, shift_, prec_, c);
}

OE OE::operator-(const OE& o) const { return *this + (-o); }

OE OE::operator*(const OE& o) const {
    if (R_ != o.R_) throw error("mixed p-adic contexts");
    int prec = std::min(prec_, o.prec_);
    prec = std::min(prec, R_->pmax());
    uint64_t m = R_->ppow(prec);
    // multiply in Z[t,pi]/(t^2-d, pi^2+p) (eE<=2, fE<=2)
    std::array<uint64_t, 4> c{0, 0, 0, 0};
    uint64_t dd = ((long)R_->d) % (long)m;
    uint64_t pp = (uint64_t)(R_->p % (long)m);
    for (int i1 = 0; i1 < R_->eE; ++i1)
        for (int j1 = 0; j1 < R_->fE; ++j1) {
            uint64_t a = c_[idx(i1, j1)] % m;
            if (a == 0) continue;
            for (int i2 = 0; i2 < R_->eE; ++i2)
                for (int j2 = 0; j2 < R_->fE; ++j2) {
                    uint64_t b = o.c_[idx(i2, j2)] % m;
                    if (b == 0) continue;
                    uint64_t term = mulmod(a, b, m);
                    int i = i1 + i2, j = j1 + j2;
                    bool negate = false;
                    if (j >= 2) {
                        j -= 2;
                        term = mulmod(term, dd, m);
                    }
                    if (i >= R_->eE && R_->eE == 2) {
                        i -= 2;
                        term = mulmod(term, pp, m);
                        negate = true;
                    }
                    uint64_t& tgt = c[idx(i, j)];
                    if (negate)
                        tgt = (tgt + m - term) % m;
                    else
                        tgt = (tgt + term) % m;
                }
        }
    return raw_make(R_, shift_ + o.shift_, prec, c);
}

OE OE::mul_int(long n) const { return *this * from_int(R_, n); }

OE OE::pow(long n) const {
    if (n < 0) return inv_field().pow(-n);
    OE r = one(R_);
    OE b = *this;
    while (n > 0) {
        if (n & 1) r = r * b;
        b = b * b;
        n >>= 1;
    }
    return r;
}

OE OE::shift_p(int k) const {
    OE x = *this;
    x.shift_ += k;
    x.normalize();
    return x;
}

OE OE::divide_exact_p(int k) const {
    if (k == 0) return *this;
    if (k < 0) {
        OE x = *this;
        x.shift_ -= k;
        x.normalize();
        return x;
    }
    OE x = *this; // normalized
    if (x.is_zero()) {
        if (x.shift_ + x.prec_ - k <= 0)
            throw precision_exhausted("cannot certify divisibility of a zero-at-precision element");
        x.shift_ -= k;
        x.normalize();
        return x;
    }
    if (x.shift_ < k) throw not_divisible();
    x.shift_ -= k;
    return x;
}

OE OE::divide_exact_pi() const {
    if (R_->eE == 1) throw error("divide_exact_pi requires a ramified O_E");
    // x = p^shift (a + b pi); x/pi = p^shift (b - (a/p) pi) since 1/pi = -pi/p
    OE x = *this;
    if (x.is_zero()) {
        if (x.prec_ <= 1) throw precision_exhausted();
        x.prec_ -= 1;
        return x;
    }
    for (int j = 0; j < R_->fE; ++j)
        if (x.c_[idx(0, j)] % (uint64_t)R_->p != 0) throw not_divisible("element not divisible by pi");
    int prec = x.prec_ - 1;
    if (prec <= 0) throw precision_exhausted();
    uint64_t m2 = R_->ppow(prec);
    std::array<uint64_t, 4> c{0, 0, 0, 0};
    for (int j = 0; j < R_->fE; ++j) {
        c[idx(0, j)] = x.c_[idx(1, j)] % m2;
        c[idx(1, j)] = (m2 - (x.c_[idx(0, j)] / (uint64_t)R_->p) % m2) % m2;
    }
    return raw_make(R_, x.shift_, prec, c);
}

OE OE::inv_unit() const {
    auto v = valuation();
    if (!v || v->first != 0) throw error("inv_unit: not a unit");
    // start from the residue inverse, Newton-iterate y <- y(2 - xy)
    SmallField::elt r0 = residue();
    SmallField::elt ri = R_->kE->inv(r0);
    std::array<uint64_t, 4> c{0, 0, 0, 0};
    c[idx(0, 0)] = (uint64_t)(ri % R_->p);
    if (R_->fE == 2) c[idx(0, 1)] = (uint64_t)(ri / R_->p);
    OE y = raw_make(R_, 0, prec_, c);
    OE two = from_int(R_, 2);
    for (int it = 0; it < 3 + 2 * (int)(prec_ * R_->eE); ++it) {
        OE e = two - *this * y;
        y = y * e;
        if ((*this * y - one(R_)).is_zero()) break;
    }
    return y;
}

OE OE::inv_field() const {
    OE x = *this;
    if (x.is_zero()) throw error("inverse of (indistinguishable-from-)zero");
    // x = p^s * I with I normalized, val(I) in {0, 1/eE, ..., (eE-1)/eE}
    int s = x.shift_;
    x.shift_ = 0;
    int pis = 0;
    while (!x.is_unit()) {
        x = x.divide_exact_pi();
        ++pis;
    }
    OE u = x.inv_unit();
    u.shift_ -= s;
    // multiply back the pi-strips: 1/pi = -pi/p each
    for (int i = 0; i < pis; ++i) {
        u = -(u * pi(R_));
        u.shift_ -= 1;
    }
    return u;
}

OE OE::sqrt() const {
    OE x = *this;
    if (x.is_zero()) return x; // sqrt(0 at precision) = 0 at precision
    // strip pi-valuation; it must be even
    auto v = x.valuation().value();
    long pival = v.first * (R_->eE / v.second); // valuation in pi-digits
    if (pival % 2 != 0) throw no_root_in_E("odd valuation has no square root in E");
    // write x = pi^pival * u0 with u0 a unit; note p^shift = (-1)^shift pi^{2 shift}
    long half = pival / 2;
    OE unit = x;
    unit.shift_ = 0;
    if (R_->eE == 2) {
        long ipival = pival - 2l * x.shift_;
        for (long i = 0; i < ipival; ++i) unit = unit.divide_exact_pi();
        if (x.shift_ % 2 != 0) unit = -unit;
    }
    SmallField::elt r = unit.residue();
    SmallField::elt sr = R_->kE->sqrt(r); // throws no_root_in_E if nonsquare
    std::array<uint64_t, 4> c{0, 0, 0, 0};
    c[idx(0, 0)] = (uint64_t)(sr % R_->p);
    if (R_->fE == 2) c[idx(0, 1)] = (uint64_t)(sr / R_->p);
    OE y = raw_make(R_, 0, unit.prec_, c);
    OE inv2 = from_int(R_, 2).inv_unit();
    for (int it = 0; it < 3 + 2 * (int)(unit.prec_ * R_->eE); ++it) {
        y = (y + unit * y.inv_unit()) * inv2;
        if ((y * y - unit).is_zero()) break;
    }
    if (!(y * y - unit).is_zero()) throw no_root_in_E("square-root iteration failed to converge");
    // reattach pi^half, using pi^{2k} = (-p)^k
    OE out = y;
    if (R_->eE == 2) {
        long rres = ((half % 2) + 2) % 2;
        if (rres) out = out * pi(R_);
        long k = (half - rres) / 2;
        out.shift_ += (int)k;
        if (k % 2 != 0) out = -out;
    } else {
        out.shift_ += (int)half;
    }
    return out;
}

OE OE::witt_frobenius() const {
    std::array<uint64_t, 4> c = c_;
    uint64_t m = R_->ppow(prec_);
    for (int i = 0; i < 2; ++i) c[idx(i, 1)] = (m - c[idx(i, 1)] % m) % m;
    return raw_make(R_, shift_, prec_, c);
}

OE OE::teichmuller(PadicCtxP R, SmallField::elt a) {
    if (a == 0) return zero(R);
    std::array<uint64_t, 4> c{0, 0, 0, 0};
    c[idx(0, 0)] = (uint64_t)(a % R->p);
    if (R->fE == 2) c[idx(0, 1)] = (uint64_t)(a / R->p);
    OE y = raw_make(R, 0, R->N, c);
    long q = R->p;
    for (int i = 1; i < R->fE; ++i) q *= R->p;
    for (int it = 0; it < 4 * R->N + 8; ++it) {
        OE z = y.pow(q);
        if ((z - y).is_zero()) return z;
        y = z;
    }
    throw error("teichmuller iteration failed to converge");
}

SmallField::elt OE::residue() const {
    if (shift_ > 0 || is_zero()) return 0;
    if (shift_ < 0) throw error("residue of an element of negative valuation");
    long a = (long)(c_[idx(0, 0)] % (uint64_t)R_->p);
    long b = R_->fE == 2 ? (long)(c_[idx(0, 1)] % (uint64_t)R_->p) : 0;
    return (SmallField::elt)(a + b * R_->p);
}

OE OE::truncated_to(int n) const {
    if (n >= prec_) return *this;
    if (n <= 0) throw precision_exhausted();
    return raw_make(R_, shift_, n, c_);
}

std::string OE::to_string() const {
    std::ostringstream os;
    if (is_zero()) {
        os << "O(p^" << abs_prec() << ")";
        return os.str();
    }
    if (shift_ != 0) os << "p^" << shift_ << "*";
    os << "(";
    bool first = true;
    const char* pis[2] = {"", "*pi"};
    const char* ts[2] = {"", "*t"};
    for (int i = 0; i < R_->eE; ++i)
        for (int j = 0; j < R_->fE; ++j) {
            uint64_t v = c_[idx(i, j)];
            if (v == 0) continue;
            if (!first) os << "+";
            os << v << ts[j] << pis[i];
            first = false;
        }
    os << " mod p^" << prec_ << ")";
    return os.str();
}

int int_valp(long n, long p) {
    if (n == 0) throw error("valuation of integer zero");
    int v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

long factorial_valp(long n, long p) {
    long v = 0;
    long q = p;
    while (q <= n) {
        v += n / q;
        if (q > n / p) break;
        q *= p;
    }
    return v;
}

OE factorial_ratio(PadicCtxP R, long n1, long n2) {
    if (n1 < n2) throw error("factorial_ratio expects n1 >= n2");
    OE acc = OE::one(R);
    for (long k = n2 + 1; k <= n1; ++k) acc = acc * OE::from_int(R, k);
    return acc;
}

} // namespace breuil
