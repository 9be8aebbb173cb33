#pragma once

#include <optional>
#include <vector>

#include "breuil/smallfield.hpp"

namespace breuil {

// dense matrices over k_E with row reduction, solving, and kernels
struct KMat {
    FFp k;
    int rows = 0, cols = 0;
    std::vector<SmallField::elt> a;

    static KMat make(FFp k, int rows, int cols) {
        KMat m;
        m.k = std::move(k);
        m.rows = rows;
        m.cols = cols;
        m.a.assign((size_t)rows * std::max(cols, 1), 0);
        return m;
    }
    SmallField::elt& at(int r, int c) { return a[(size_t)r * cols + c]; }
    SmallField::elt get(int r, int c) const { return a[(size_t)r * cols + c]; }
};

// reduced row echelon with recorded transform T (T*A = echelon)
struct Echelon {
    KMat m;
    KMat t;
    std::vector<int> pivots;
    std::vector<int> row_of_col;

    void build(const KMat& in);
    int rank() const { return (int)pivots.size(); }
    std::optional<std::vector<SmallField::elt>> solve(const std::vector<SmallField::elt>& b) const;
    // pivot-based solution ignoring consistency; optional residual rows
    std::vector<SmallField::elt> solve_linear(const std::vector<SmallField::elt>& b,
                                              std::vector<SmallField::elt>* residual) const;
    std::vector<std::vector<SmallField::elt>> kernel() const;
};

} // namespace breuil
