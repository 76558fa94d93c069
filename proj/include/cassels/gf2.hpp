#pragma once

// Dense matrices over F_2, rows packed into 64-bit words.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace cassels::gf2 {

using BitVector = std::vector<bool>;

class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols);
    static BitMatrix from_rows(const std::vector<BitVector>& rows, std::size_t cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    bool get(std::size_t r, std::size_t c) const {
        return (data_[r * words_ + c / 64] >> (c % 64)) & 1U;
    }
    void set(std::size_t r, std::size_t c, bool v);

    BitVector row(std::size_t r) const;
    BitMatrix transpose() const;
    bool is_symmetric() const;

    std::size_t rank() const;
    /// Basis of {x : M x = 0}, each vector of length cols().
    std::vector<BitVector> kernel() const;
    /// M x
    BitVector apply(const BitVector& x) const;

    friend bool operator==(const BitMatrix& a, const BitMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    std::string to_string() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> data_;
};

/// Rank of a list of vectors of equal length.
std::size_t rank_of(const std::vector<BitVector>& vectors, std::size_t length);
/// True if `v` lies in the span of `basis`.
bool in_span(const std::vector<BitVector>& basis, const BitVector& v);
BitVector add(const BitVector& a, const BitVector& b);

}  // namespace cassels::gf2
