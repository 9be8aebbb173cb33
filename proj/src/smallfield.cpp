#include "breuil/smallfield.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace breuil {

namespace {

long powmod(long a, long e, long m) {
    long r = 1 % m;
    a %= m;
    while (e > 0) {
        if (e & 1) r = r * a % m;
        a = a * a % m;
        e >>= 1;
    }
    return r;
}

} // namespace

long SmallField::least_nonresidue(long p) {
    for (long d = 2; d < p; ++d)
        if (powmod(d, (p - 1) / 2, p) == p - 1) return d;
    throw error("no quadratic nonresidue found (p must be an odd prime >= 3)");
}

SmallField::SmallField(long p, int f) : p_(p), f_(f) {
    if (p < 3 || p % 2 == 0) throw inadmissible_parameters("p must be an odd prime");
    if (f != 1 && f != 2 && f != 4) throw inadmissible_parameters("residue degree must be 1, 2 or 4");
    q_ = 1;
    for (int i = 0; i < f; ++i) q_ *= p;
    if (q_ > 60000) throw inadmissible_parameters("field too large for table arithmetic");

    // coordinates of x^f in the basis 1, x, ..., x^{f-1}
    std::vector<long> xf(f, 0);
    if (f == 1) {
        xf[0] = 0; // unused
    } else if (f == 2) {
        xf[0] = least_nonresidue(p);
    } else {
        // search the least (a,b) with y^4 - a y^2 - b irreducible over GF(p)
        bool found = false;
        for (long a = 0; a < p && !found; ++a) {
            for (long b = 1; b < p && !found; ++b) {
                // irreducible iff no root and the quadratic z^2 - a z - b has no
                // root z that is a square; test by brute force over GF(p): the
                // quartic factors over GF(p^2) always, we need it to have no
                // root in GF(p^2), i.e. z^2 - a z - b irreducible or its roots
                // nonsquares in GF(p^2).  Cheap full check: no y in GF(p) with
                // y^4 = a y^2 + b, and z^2 - a z - b has either no root in
                // GF(p), or roots that are nonsquares in GF(p^2).  An element
                // t of GF(p) is a square in GF(p^2) iff it is 0 or t^{(p^2-1)/2}=1,
                // which for t in GF(p)^* is t^{(p-1)(p+1)/2} = 1: always when
                // (p+1)/2 even... compute directly below instead.
                long disc = (a * a + 4 * b) % p;
                long ls = disc == 0 ? 0 : powmod(disc, (p - 1) / 2, p);
                if (ls == 1 || ls == 0) {
                    // z^2 - az - b splits (or double root) over GF(p); roots z are in
                    // GF(p), and every element of GF(p) is a square in GF(p^2).
                    continue;
                }
                // roots z live in GF(p^2)\GF(p); x^2 = z gives x of degree 4 iff z is
                // a nonsquare in GF(p^2).  z nonsquare in GF(p^2) iff
                // z^{(p^2-1)/2} = -1; z^{p+1} = -b (product over conjugates = norm...
                // z zbar = -b, z + zbar = a). z^{(p^2-1)/2} = (z^{p+1})^{(p-1)/2} =
                // (-b)^{(p-1)/2}.
                long nb = ((-b) % p + p) % p;
                if (powmod(nb, (p - 1) / 2, p) == p - 1) {
                    xf[0] = b % p;
                    xf[2] = a % p;
                    found = true;
                }
            }
        }
        if (!found) throw error("no quartic defining polynomial found");
    }
    build_tables(xf);
}

void SmallField::build_tables(const std::vector<long>& xf) {
    // multiplication-by-x table from the coordinate recursion
    mul_x_.assign(q_, 0);
    for (long n = 0; n < q_; ++n) {
        // decode coordinates
        long c[4] = {0, 0, 0, 0};
        long m = n;
        for (int i = 0; i < f_; ++i) {
            c[i] = m % p_;
            m /= p_;
        }
        long r[4] = {0, 0, 0, 0};
        for (int i = 0; i + 1 < f_; ++i) r[i + 1] = c[i];
        long top = c[f_ - 1];
        if (f_ == 1) {
            r[0] = 0; // x = 0 in GF(p): never used, gen handled separately
        } else {
            for (int i = 0; i < f_; ++i) r[i] = (r[i] + top * xf[i]) % p_;
        }
        long enc = 0;
        for (int i = f_ - 1; i >= 0; --i) enc = enc * p_ + r[i];
        mul_x_[n] = static_cast<elt>(enc);
    }

    // find a multiplicative generator by brute force, smallest index
    auto raw_mul = [&](elt a, elt b) {
        // schoolbook via repeated mul_by_x on decomposition of b
        long acc = 0;
        long bb = b;
        elt shifted = a;
        elt res = 0;
        (void)acc;
        for (int i = 0; i < f_; ++i) {
            long digit = bb % p_;
            bb /= p_;
            elt term = 0;
            for (long k = 0; k < digit; ++k) {
                // addition of coordinates
                long x = term, y = shifted, enc = 0, mul = 1;
                for (int d = 0; d < f_; ++d) {
                    enc += ((x % p_ + y % p_) % p_) * mul;
                    x /= p_;
                    y /= p_;
                    mul *= p_;
                }
                term = static_cast<elt>(enc);
            }
            {
                long x = res, y = term, enc = 0, mul = 1;
                for (int d = 0; d < f_; ++d) {
                    enc += ((x % p_ + y % p_) % p_) * mul;
                    x /= p_;
                    y /= p_;
                    mul *= p_;
                }
                res = static_cast<elt>(enc);
            }
            if (i + 1 < f_) shifted = mul_x_[shifted];
        }
        return res;
    };

    gen_ = 0;
    for (long g = 2; g < q_; ++g) {
        elt acc = 1;
        long ord = 0;
        do {
            acc = raw_mul(acc, static_cast<elt>(g));
            ++ord;
        } while (acc != 1 && ord <= q_);
        if (ord == q_ - 1) {
            gen_ = static_cast<elt>(g);
            break;
        }
    }
    if (gen_ == 0) throw error("no multiplicative generator found");

    exp_.assign(q_ - 1, 1);
    log_.assign(q_, -1);
    elt acc = 1;
    for (long k = 0; k < q_ - 1; ++k) {
        exp_[k] = acc;
        log_[acc] = k;
        acc = raw_mul(acc, gen_);
    }
}

SmallField::elt SmallField::from_int(long n) const {
    long r = n % p_;
    if (r < 0) r += p_;
    return static_cast<elt>(r);
}

SmallField::elt SmallField::add(elt a, elt b) const {
    long x = a, y = b, enc = 0, mul = 1;
    for (int d = 0; d < f_; ++d) {
        enc += ((x % p_ + y % p_) % p_) * mul;
        x /= p_;
        y /= p_;
        mul *= p_;
    }
    return static_cast<elt>(enc);
}

SmallField::elt SmallField::sub(elt a, elt b) const {
    long x = a, y = b, enc = 0, mul = 1;
    for (int d = 0; d < f_; ++d) {
        enc += ((x % p_ - y % p_ + p_) % p_) * mul;
        x /= p_;
        y /= p_;
        mul *= p_;
    }
    return static_cast<elt>(enc);
}

SmallField::elt SmallField::mul(elt a, elt b) const {
    if (a == 0 || b == 0) return 0;
    long k = log_[a] + log_[b];
    if (k >= q_ - 1) k -= q_ - 1;
    return exp_[k];
}

SmallField::elt SmallField::inv(elt a) const {
    if (a == 0) throw error("inverse of zero in finite field");
    long k = (q_ - 1 - log_[a]) % (q_ - 1);
    return exp_[k];
}

SmallField::elt SmallField::pow(elt a, long n) const {
    if (a == 0) {
        if (n == 0) return 1;
        if (n < 0) throw error("negative power of zero");
        return 0;
    }
    long k = log_[a] % (q_ - 1);
    long e = ((n % (q_ - 1)) * k) % (q_ - 1);
    if (e < 0) e += q_ - 1;
    return exp_[e];
}

long SmallField::dlog(elt a) const {
    if (a == 0) throw error("dlog of zero");
    return log_[a];
}

bool SmallField::is_square(elt a) const {
    if (a == 0) return true;
    return log_[a] % 2 == 0;
}

SmallField::elt SmallField::sqrt(elt a) const {
    if (a == 0) return 0;
    if (log_[a] % 2 != 0) throw no_root_in_E("nonsquare in residue field");
    elt r = exp_[log_[a] / 2];
    elt r2 = neg(r);
    return std::min(r, r2);
}

std::vector<SmallField::elt> SmallField::quadratic_roots(elt b, elt c) const {
    // roots of z^2 + b z + c
    elt disc = sub(mul(b, b), mul(from_int(4), c));
    std::vector<elt> out;
    if (!is_square(disc)) return out;
    elt s = sqrt(disc);
    elt inv2 = inv(from_int(2));
    elt r1 = mul(sub(s, b), inv2);
    elt r2 = mul(sub(neg(s), b), inv2);
    out.push_back(std::min(r1, r2));
    if (r1 != r2) out.push_back(std::max(r1, r2));
    return out;
}

std::string SmallField::to_string(elt a) const {
    if (f_ == 1) return std::to_string(a);
    std::string s = "[";
    long m = a;
    for (int i = 0; i < f_; ++i) {
        if (i) s += ",";
        s += std::to_string(m % p_);
        m /= p_;
    }
    return s + "]";
}

FFp make_field(long p, int f) {
    static std::map<std::pair<long, int>, FFp> cache;
    auto key = std::make_pair(p, f);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto fp = std::make_shared<const SmallField>(p, f);
    cache[key] = fp;
    return fp;
}

} // namespace breuil
