#include "breuil/coeff.hpp"

#include <sstream>

namespace breuil {

int FamilyCtx::ncoords() const {
    switch (kind) {
        case FamilyKind::scalar: return 1;
        case FamilyKind::Y:
        case FamilyKind::B: return r;
        case FamilyKind::X1X2: return 2 * r - 1;
    }
    return 1;
}

std::string FamilyCtx::var_name(int which) const {
    switch (kind) {
        case FamilyKind::Y: return "Y";
        case FamilyKind::B: return "B";
        case FamilyKind::X1X2: return which == 0 ? "X1" : "X2";
        default: return "?";
    }
}

FamilyCtxP make_scalar_family(PadicCtxP R) {
    auto f = std::make_shared<FamilyCtx>();
    f->kind = FamilyKind::scalar;
    f->r = 1;
    f->R = std::move(R);
    return f;
}

FamilyCtxP make_family(FamilyKind kind, int r, PadicCtxP R, const OE& pw) {
    if (kind == FamilyKind::scalar) return make_scalar_family(R);
    if (r < 2) throw inadmissible_parameters("family truncation must be >= 2");
    auto f = std::make_shared<FamilyCtx>();
    f->kind = kind;
    f->r = r;
    f->R = R;
    if (kind == FamilyKind::X1X2) {
        if (!pw.valid()) throw inadmissible_parameters("X1X2 family requires the product value pw");
        f->pw = pw;
    }
    return f;
}

RElem::RElem(FamilyCtxP F) : F_(std::move(F)) {
    c_.assign(F_->ncoords(), OE::zero(F_->R));
    rcert_ = F_->r;
}

RElem relem_raw(FamilyCtxP F, std::vector<OE> c, bool tail_zero, int rcert) {
    RElem x;
    x.F_ = F;
    x.c_ = std::move(c);
    x.tail_zero_ = tail_zero;
    x.rcert_ = std::min(rcert, F->r);
    if (!x.tail_zero_ || x.rcert_ < F->r) x.cap_precision_from_tail();
    return x;
}

RElem RElem::from_OE(FamilyCtxP F, const OE& a) {
    RElem x(F);
    x.c_[0] = a;
    return x;
}

RElem RElem::variable(FamilyCtxP F, int which) {
    if (F->kind == FamilyKind::scalar) throw inadmissible_parameters("scalar ring has no family variable");
    if (which != 0 && !(F->kind == FamilyKind::X1X2 && which == 1))
        throw inadmissible_parameters("no such family variable");
    RElem x(F);
    int i = which == 0 ? 1 : F->r; // X1^1 at index 1, X2^1 at index r
    x.c_[i] = OE::one(F->R);
    return x;
}

int RElem::coord_degree(int i) const {
    if (F_->kind != FamilyKind::X1X2) return i;
    if (i == 0) return 0;
    if (i < F_->r) return i;          // X1^i
    return i - F_->r + 1;             // X2^(i-r+1)
}

void RElem::cap_precision_from_tail() {
    // In O_E[[X1,X2]]/(X1 X2 - pw), an unknown tail of total degree >= rcert
    // contributes to the retained degree-g coordinate only through at least
    // rcert - g rewrites X1 X2 -> pw, hence modulo p^{rcert-g}.
    if (F_->kind != FamilyKind::X1X2) return;
    for (int i = 0; i < (int)c_.size(); ++i) {
        int d = coord_degree(i);
        if (d >= rcert_) {
            // uncertified coordinate: placeholder
            c_[i] = raw_make(F_->R, 0, 1, {0, 0, 0, 0});
            continue;
        }
        int cap = rcert_ - d;
        if (c_[i].prec() + c_[i].shift() > cap) {
            int rel = cap - c_[i].shift();
            if (rel <= 0) {
                c_[i] = raw_make(F_->R, 0, cap, {0, 0, 0, 0});
            } else {
                c_[i] = c_[i].truncated_to(rel);
            }
        }
    }
}

bool RElem::is_zero() const {
    for (int i = 0; i < (int)c_.size(); ++i) {
        if (coord_degree(i) >= rcert_) continue;
        if (!c_[i].is_zero()) return false;
    }
    return true;
}

bool RElem::is_unit() const { return c_[0].is_unit(); }

RElem RElem::operator+(const RElem& o) const {
    if (F_ != o.F_) throw error("mixed family contexts");
    std::vector<OE> c(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) c[i] = c_[i] + o.c_[i];
    return relem_raw(F_, std::move(c), tail_zero_ && o.tail_zero_, std::min(rcert_, o.rcert_));
}

RElem RElem::operator-() const {
    std::vector<OE> c(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) c[i] = -c_[i];
    return relem_raw(F_, std::move(c), tail_zero_, rcert_);
}

RElem RElem::operator-(const RElem& o) const { return *this + (-o); }

RElem RElem::operator*(const RElem& o) const {
    if (F_ != o.F_) throw error("mixed family contexts");
    std::vector<OE> c(c_.size(), OE::zero(F_->R));
    bool dropped = false;
    const int r = F_->r;
    auto addto = [&](int idx, const OE& v) { c[idx] = c[idx] + v; };
    if (F_->kind == FamilyKind::scalar) {
        c[0] = c_[0] * o.c_[0];
    } else if (F_->kind != FamilyKind::X1X2) {
        for (int a = 0; a < r; ++a) {
            for (int b = 0; b < r; ++b) {
                if (a + b >= r) {
                    // honest quotient ring: Y^{a+b} = 0 exactly
                    continue;
                }
                addto(a + b, c_[a] * o.c_[b]);
            }
        }
    } else {
        auto deg = [&](int i) { return i == 0 ? 0 : (i < r ? i : i - r + 1); };
        auto var = [&](int i) { return i == 0 ? 0 : (i < r ? 1 : 2); }; // 0 none, 1 X1, 2 X2
        for (int ia = 0; ia < (int)c_.size(); ++ia) {
            for (int ib = 0; ib < (int)o.c_.size(); ++ib) {
                OE v = c_[ia] * o.c_[ib];
                int va = var(ia), vb = var(ib);
                int da = deg(ia), db = deg(ib);
                int e1 = (va == 1 ? da : 0) + (vb == 1 ? db : 0);
                int e2 = (va == 2 ? da : 0) + (vb == 2 ? db : 0);
                int m = std::min(e1, e2);
                if (m > 0) v = v * F_->pw.pow(m);
                e1 -= m;
                e2 -= m;
                int dtot = e1 + e2; // one of them is 0
                if (dtot >= r) {
                    dropped = true;
                    continue;
                }
                int idx = e1 > 0 ? e1 : (e2 > 0 ? r + e2 - 1 : 0);
                addto(idx, v);
            }
        }
    }
    bool tz = tail_zero_ && o.tail_zero_ && !dropped;
    return relem_raw(F_, std::move(c), tz, std::min(rcert_, o.rcert_));
}

RElem RElem::mul_int(long n) const { return mul_OE(OE::from_int(F_->R, n)); }

RElem RElem::mul_OE(const OE& a) const {
    std::vector<OE> c(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) c[i] = c_[i] * a;
    return relem_raw(F_, std::move(c), tail_zero_, rcert_);
}

RElem RElem::divide_exact_p(int k) const {
    std::vector<OE> c(c_.size(), OE::zero(F_->R));
    int rc = rcert_;
    for (size_t i = 0; i < c_.size(); ++i) {
        int d = coord_degree((int)i);
        if (d >= rc) continue;
        try {
            c[i] = c_[i].divide_exact_p(k);
        } catch (const precision_exhausted&) {
            if (c_[i].is_zero() && d > 0) {
                rc = std::min(rc, d); // division consumed this coordinate's certificate
            } else {
                throw;
            }
        }
    }
    return relem_raw(F_, std::move(c), tail_zero_ && rc >= F_->r, rc);
}

RElem RElem::shift_p(int k) const {
    std::vector<OE> c(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) c[i] = c_[i].shift_p(k);
    return relem_raw(F_, std::move(c), tail_zero_, rcert_);
}

RElem RElem::sqrt_unit() const {
    if (!is_unit()) throw no_root_in_E("sqrt_unit: constant term not a unit");
    RElem y = from_OE(F_, c_[0].sqrt());
    if (F_->kind == FamilyKind::scalar) return y;
    RElem inv2 = from_OE(F_, OE::from_int(F_->R, 2).inv_unit());
    for (int it = 0; it < 6 * F_->r + 8; ++it) {
        y = (y + *this * y.inv_unit()) * inv2;
        if ((y * y - *this).is_zero()) break;
    }
    if (!(y * y - *this).is_zero()) throw no_root_in_E("family square root failed to converge");
    return y;
}

void RElem::assert_integral(const std::string& what) const {
    for (int i0 = 0; i0 < (int)c_.size(); ++i0) {
        if (coord_degree(i0) >= rcert_) continue;
        const OE& a = c_[i0];
        if (a.is_zero()) {
            if (a.abs_prec() <= 0) throw error(what + ": integrality not certifiable");
            continue;
        }
        auto v = a.valuation().value();
        if (v.first < 0) throw error(what + ": coefficient has negative valuation");
    }
}

RElem RElem::degrade_uncertified(const std::string& what) const {
    int rc = rcert_;
    for (int i = 0; i < (int)c_.size(); ++i) {
        int d = coord_degree(i);
        if (d >= rc) continue;
        const OE& a = c_[i];
        if (a.is_zero()) {
            if (a.abs_prec() <= 0) {
                if (d == 0) throw error(what + ": constant coordinate integrality not certifiable");
                rc = std::min(rc, d);
            }
            continue;
        }
        auto v = a.valuation().value();
        if (v.first < 0) throw error(what + ": coefficient has negative valuation");
    }
    if (rc == rcert_) return *this;
    return relem_raw(F_, c_, false, rc);
}

RElem RElem::inv_unit() const {
    if (!is_unit()) throw error("RElem::inv_unit: constant term not a unit");
    RElem y = from_OE(F_, c_[0].inv_unit());
    RElem two = from_OE(F_, OE::from_int(F_->R, 2));
    int iters = 4;
    int sz = 1;
    while (sz < F_->r * (F_->R->N + 2)) {
        sz *= 2;
        ++iters;
    }
    for (int it = 0; it < iters + 2; ++it) {
        y = y * (two - *this * y);
        if ((*this * y - one(F_)).is_zero()) break;
    }
    return y;
}

RElem RElem::pow(long n) const {
    if (n < 0) throw error("negative RElem power");
    RElem r = one(F_);
    RElem b = *this;
    while (n > 0) {
        if (n & 1) r = r * b;
        b = b * b;
        n >>= 1;
    }
    return r;
}

OE RElem::evaluate(const std::vector<OE>& vals) const {
    if (F_->kind == FamilyKind::scalar) return c_[0];
    OE acc = OE::zero(F_->R);
    for (int i = 0; i < (int)c_.size(); ++i) {
        int d = coord_degree(i);
        if (d >= rcert_) continue;
        OE v = c_[i];
        if (i > 0) {
            const OE& x = (F_->kind == FamilyKind::X1X2 && i >= F_->r) ? vals.at(1) : vals.at(0);
            v = v * x.pow(d);
        }
        acc = acc + v;
    }
    // A truncated-ring element only pins its specialization modulo the
    // substituted maximal-ideal power: cap at r * min val(vals).
    long minnum = -1;
    for (auto& x : vals) {
        long num;
        if (x.is_zero())
            num = (long)x.abs_prec() * F_->R->eE; // true valuation at least this
        else {
            auto v = x.valuation().value();
            num = v.first * (F_->R->eE / v.second);
        }
        if (minnum < 0 || num < minnum) minnum = num;
    }
    if (minnum >= 0) {
        long capnum = (long)rcert_ * minnum; // in pi-digits
        int cap = (int)(capnum / F_->R->eE);
        if (cap > 0 && cap < acc.abs_prec()) {
            if (cap <= acc.shift()) throw precision_exhausted("family truncation dominates evaluation");
            acc = acc.truncated_to(cap - acc.shift());
        } else if (cap <= 0) {
            throw precision_exhausted("family truncation dominates evaluation");
        }
    }
    return acc;
}

int RElem::min_prec() const {
    int m = 1 << 20;
    for (int i = 0; i < (int)c_.size(); ++i) {
        if (coord_degree(i) >= rcert_) continue;
        m = std::min(m, c_[i].abs_prec());
    }
    return m;
}

std::string RElem::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (int i = 0; i < (int)c_.size(); ++i) {
        if (c_[i].is_zero() && !(i == 0 && is_zero())) continue;
        if (!first) os << " + ";
        os << c_[i].to_string();
        if (i > 0) {
            os << "*" << F_->var_name(F_->kind == FamilyKind::X1X2 && i >= F_->r ? 1 : 0);
            int d = coord_degree(i);
            if (d > 1) os << "^" << d;
        }
        first = false;
    }
    if (first) os << "0";
    if (!tail_zero_) os << " + O(m^" << F_->r << ")";
    return os.str();
}

} // namespace breuil
