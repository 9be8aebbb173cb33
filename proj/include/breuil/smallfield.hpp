#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "breuil/errors.hpp"

namespace breuil {

// GF(p^f) for odd p and f in {1,2,4}, small enough for table arithmetic
// (p^f <= 7^4 = 2401).  Elements are stored as indices 0..p^f-1 encoding
// polynomial coordinates base p in a fixed generator x of the field:
//   n = sum c_i p^i  <->  sum c_i x^i,
// with x a root of the defining polynomial.  For f = 1 the generator is 1.
//
// Defining polynomials: f=2: x^2 = d with d the least quadratic nonresidue
// mod p; f=4: x^4 = x^2 * x^2 with x^2 a root of y^2 = d' over GF(p^2),
// realized concretely by searching the least monic irreducible of the form
// y^4 - a y^2 - b.  The choice is deterministic in p.
class SmallField {
  public:
    using elt = uint16_t;

    SmallField(long p, int f);

    long p() const { return p_; }
    int degree() const { return f_; }
    long order() const { return q_; }

    elt zero() const { return 0; }
    elt one() const { return 1; }
    elt from_int(long n) const; // image of the rational integer n
    elt gen() const { return gen_; } // fixed multiplicative generator

    elt add(elt a, elt b) const;
    elt sub(elt a, elt b) const;
    elt neg(elt a) const { return sub(0, a); }
    elt mul(elt a, elt b) const;
    elt inv(elt a) const;
    elt pow(elt a, long n) const;
    elt frob(elt a) const { return pow(a, p_); } // x -> x^p

    // discrete log base gen(); a must be nonzero
    long dlog(elt a) const;
    elt from_dlog(long k) const { return exp_[((k % (q_ - 1)) + (q_ - 1)) % (q_ - 1)]; }

    bool is_square(elt a) const;
    // a square root, deterministic (smallest index); throws no_root_in_E if none
    elt sqrt(elt a) const;
    // roots of z^2 + bz + c, deterministic order; may be empty or have 1-2 entries
    std::vector<elt> quadratic_roots(elt b, elt c) const;

    // smallest subfield element tests / embeddings
    bool in_prime_field(elt a) const { return pow(a, p_) == a; }

    std::string to_string(elt a) const;

    // the least quadratic nonresidue mod p (lifted defining constant for f=2)
    static long least_nonresidue(long p);

  private:
    long p_;
    int f_;
    long q_;
    elt gen_;
    std::vector<elt> exp_;  // exp_[k] = gen^k, k in [0, q-1)
    std::vector<long> log_; // log_[a] = dlog a, a nonzero
    std::vector<elt> mul_x_; // multiplication by the generator polynomial x

    elt mul_by_x(elt a) const { return mul_x_[a]; }
    void build_tables(const std::vector<long>& xf_coords);
};

using FFp = std::shared_ptr<const SmallField>;

FFp make_field(long p, int f);

} // namespace breuil
