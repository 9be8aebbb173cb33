#include "breuil/linalg_fp.hpp"

namespace breuil {

void Echelon::build(const KMat& in) {
    m = in;
    t = KMat::make(in.k, in.rows, in.rows);
    for (int i = 0; i < in.rows; ++i) t.at(i, i) = 1;
    auto& k = *in.k;
    int r = 0;
    row_of_col.assign(in.cols, -1);
    pivots.clear();
    for (int c = 0; c < in.cols && r < in.rows; ++c) {
        int piv = -1;
        for (int rr = r; rr < in.rows; ++rr)
            if (m.get(rr, c) != 0) {
                piv = rr;
                break;
            }
        if (piv < 0) continue;
        for (int cc = 0; cc < in.cols; ++cc) std::swap(m.at(r, cc), m.at(piv, cc));
        for (int cc = 0; cc < t.cols; ++cc) std::swap(t.at(r, cc), t.at(piv, cc));
        auto inv = k.inv(m.get(r, c));
        for (int cc = 0; cc < in.cols; ++cc) m.at(r, cc) = k.mul(m.get(r, cc), inv);
        for (int cc = 0; cc < t.cols; ++cc) t.at(r, cc) = k.mul(t.get(r, cc), inv);
        for (int rr = 0; rr < in.rows; ++rr) {
            if (rr == r) continue;
            auto f = m.get(rr, c);
            if (f == 0) continue;
            for (int cc = 0; cc < in.cols; ++cc) m.at(rr, cc) = k.sub(m.get(rr, cc), k.mul(f, m.get(r, cc)));
            for (int cc = 0; cc < t.cols; ++cc) t.at(rr, cc) = k.sub(t.get(rr, cc), k.mul(f, t.get(r, cc)));
        }
        pivots.push_back(c);
        row_of_col[c] = r;
        ++r;
    }
}

std::optional<std::vector<SmallField::elt>> Echelon::solve(const std::vector<SmallField::elt>& b) const {
    std::vector<SmallField::elt> residual;
    auto x = solve_linear(b, &residual);
    for (auto v : residual)
        if (v != 0) return std::nullopt;
    return x;
}

std::vector<SmallField::elt> Echelon::solve_linear(const std::vector<SmallField::elt>& b,
                                                   std::vector<SmallField::elt>* residual) const {
    auto& k = *m.k;
    std::vector<SmallField::elt> tb(m.rows, 0);
    for (int r = 0; r < m.rows; ++r) {
        SmallField::elt acc = 0;
        for (int c = 0; c < t.cols; ++c)
            if (t.get(r, c) != 0 && b[c] != 0) acc = k.add(acc, k.mul(t.get(r, c), b[c]));
        tb[r] = acc;
    }
    if (residual) {
        residual->assign(m.rows - rank(), 0);
        for (int r = rank(); r < m.rows; ++r) (*residual)[r - rank()] = tb[r];
    }
    std::vector<SmallField::elt> x(m.cols, 0);
    for (int r = 0; r < rank(); ++r) x[pivots[r]] = tb[r];
    return x;
}

std::vector<std::vector<SmallField::elt>> Echelon::kernel() const {
    auto& k = *m.k;
    std::vector<std::vector<SmallField::elt>> out;
    std::vector<bool> is_piv(m.cols, false);
    for (int c : pivots) is_piv[c] = true;
    for (int c = 0; c < m.cols; ++c) {
        if (is_piv[c]) continue;
        std::vector<SmallField::elt> v(m.cols, 0);
        v[c] = 1;
        for (int r = 0; r < rank(); ++r) v[pivots[r]] = k.neg(m.get(r, c));
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace breuil
