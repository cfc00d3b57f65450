#pragma once

#include "affrep/rational.hpp"

#include <cstddef>
#include <map>
#include <vector>

namespace affrep {

/// Dense row-major rational matrix.
class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols);
    static RationalMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    const std::vector<Rational>& data() const { return data_; }

    bool is_square() const { return rows_ == cols_; }
    bool is_zero() const;
    bool is_symmetric() const;
    RationalMatrix transpose() const;

    friend RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b);
    friend RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b);
    friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
    friend RationalMatrix operator*(const Rational& s, RationalMatrix a);
    friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> data_;
};

Rational determinant(const RationalMatrix& a);
/// Throws InvalidArgument when a is singular or not square.
RationalMatrix inverse(const RationalMatrix& a);

/// Sparse linear row: column -> coefficient, zeros never stored.
using SparseRow = std::map<std::size_t, Rational>;

/// Incremental reduced row echelon form over the rationals. Rows are fed
/// one at a time; the stored rows always form an RREF basis of their span.
class RowEchelon {
public:
    explicit RowEchelon(std::size_t cols) : cols_(cols) {}

    /// Reduces `row` against the basis; returns true if it was independent.
    bool insert(SparseRow row);

    std::size_t rank() const { return pivots_.size(); }
    std::size_t cols() const { return cols_; }

    /// Basis of {v : row . v = 0 for every inserted row}, one vector per free
    /// column, each with a 1 in its free column.
    std::vector<std::vector<Rational>> nullspace() const;

private:
    std::size_t cols_;
    std::map<std::size_t, SparseRow> pivots_;  // pivot column -> row
};

}  // namespace affrep
