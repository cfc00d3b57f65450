#include "affrep/linalg.hpp"

#include "affrep/error.hpp"

#include <set>
#include <utility>

namespace affrep {

RationalMatrix::RationalMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

RationalMatrix RationalMatrix::identity(std::size_t n) {
    RationalMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

bool RationalMatrix::is_zero() const {
    for (const auto& x : data_) {
        if (x != 0) return false;
    }
    return true;
}

bool RationalMatrix::is_symmetric() const {
    if (!is_square()) return false;
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = i + 1; j < cols_; ++j) {
            if ((*this)(i, j) != (*this)(j, i)) return false;
        }
    }
    return true;
}

RationalMatrix RationalMatrix::transpose() const {
    RationalMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    }
    return t;
}

namespace {

void require_same_shape(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InvalidArgument("matrix shape mismatch");
    }
}

}  // namespace

RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b) {
    require_same_shape(a, b);
    RationalMatrix r = a;
    for (std::size_t i = 0; i < r.data_.size(); ++i) r.data_[i] += b.data_[i];
    return r;
}

RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b) {
    require_same_shape(a, b);
    RationalMatrix r = a;
    for (std::size_t i = 0; i < r.data_.size(); ++i) r.data_[i] -= b.data_[i];
    return r;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.cols() != b.rows()) throw InvalidArgument("matrix product shape mismatch");
    RationalMatrix r(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            if (a(i, k) == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += a(i, k) * b(k, j);
        }
    }
    return r;
}

RationalMatrix operator*(const Rational& s, RationalMatrix a) {
    for (auto& x : a.data_) x *= s;
    return a;
}

Rational determinant(const RationalMatrix& a) {
    if (!a.is_square()) throw InvalidArgument("determinant of non-square matrix");
    RationalMatrix w = a;
    const std::size_t n = w.rows();
    Rational det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && w(p, c) == 0) ++p;
        if (p == n) return Rational(0);
        if (p != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(w(p, j), w(c, j));
            det = -det;
        }
        det *= w(c, c);
        for (std::size_t r = c + 1; r < n; ++r) {
            if (w(r, c) == 0) continue;
            const Rational f = w(r, c) / w(c, c);
            for (std::size_t j = c; j < n; ++j) w(r, j) -= f * w(c, j);
        }
    }
    return det;
}

RationalMatrix inverse(const RationalMatrix& a) {
    if (!a.is_square()) throw InvalidArgument("inverse of non-square matrix");
    const std::size_t n = a.rows();
    RationalMatrix w = a;
    RationalMatrix inv = RationalMatrix::identity(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && w(p, c) == 0) ++p;
        if (p == n) throw InvalidArgument("matrix is singular");
        if (p != c) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(w(p, j), w(c, j));
                std::swap(inv(p, j), inv(c, j));
            }
        }
        const Rational pivot = w(c, c);
        for (std::size_t j = 0; j < n; ++j) {
            w(c, j) /= pivot;
            inv(c, j) /= pivot;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || w(r, c) == 0) continue;
            const Rational f = w(r, c);
            for (std::size_t j = 0; j < n; ++j) {
                w(r, j) -= f * w(c, j);
                inv(r, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

namespace {

// row -= factor * pivot_row
void axpy(SparseRow& row, const Rational& factor, const SparseRow& pivot_row) {
    for (const auto& [col, v] : pivot_row) {
        auto [it, inserted] = row.try_emplace(col, 0);
        it->second -= factor * v;
        if (it->second == 0) row.erase(it);
    }
}

}  // namespace

bool RowEchelon::insert(SparseRow row) {
    std::erase_if(row, [](const auto& kv) { return kv.second == 0; });
    for (const auto& [col, v] : row) {
        if (col >= cols_) throw InvalidArgument("row entry beyond column count");
    }
    // Pivot rows are fully reduced, so eliminating one pivot column never
    // reintroduces another.
    std::vector<std::size_t> hits;
    for (const auto& [col, v] : row) {
        if (pivots_.contains(col)) hits.push_back(col);
    }
    for (std::size_t col : hits) {
        auto it = row.find(col);
        if (it == row.end()) continue;
        const Rational factor = it->second;
        axpy(row, factor, pivots_.at(col));
    }
    if (row.empty()) return false;

    const std::size_t pivot_col = row.begin()->first;
    const Rational lead = row.begin()->second;
    for (auto& [col, v] : row) v /= lead;
    for (auto& [pc, prow] : pivots_) {
        auto it = prow.find(pivot_col);
        if (it == prow.end()) continue;
        const Rational factor = it->second;
        axpy(prow, factor, row);
    }
    pivots_.emplace(pivot_col, std::move(row));
    return true;
}

std::vector<std::vector<Rational>> RowEchelon::nullspace() const {
    std::vector<std::vector<Rational>> basis;
    for (std::size_t free = 0; free < cols_; ++free) {
        if (pivots_.contains(free)) continue;
        std::vector<Rational> v(cols_, Rational(0));
        v[free] = 1;
        for (const auto& [pc, prow] : pivots_) {
            auto it = prow.find(free);
            if (it != prow.end()) v[pc] = -it->second;
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace affrep
