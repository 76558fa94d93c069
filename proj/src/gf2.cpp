#include "cassels/gf2.hpp"

#include <stdexcept>
#include <utility>

namespace cassels::gf2 {

namespace {

// Reduced row echelon form in place; returns pivot column of each nonzero row.
std::vector<std::size_t> reduce(std::vector<std::uint64_t>& data, std::size_t rows, std::size_t cols,
                                std::size_t words) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        const std::size_t w = c / 64;
        const std::uint64_t bit = std::uint64_t{1} << (c % 64);
        std::size_t found = rows;
        for (std::size_t i = r; i < rows; ++i) {
            if (data[i * words + w] & bit) {
                found = i;
                break;
            }
        }
        if (found == rows) continue;
        if (found != r) {
            for (std::size_t k = 0; k < words; ++k) std::swap(data[found * words + k], data[r * words + k]);
        }
        for (std::size_t i = 0; i < rows; ++i) {
            if (i != r && (data[i * words + w] & bit)) {
                for (std::size_t k = 0; k < words; ++k) data[i * words + k] ^= data[r * words + k];
            }
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

}  // namespace

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), words_((cols + 63) / 64), data_(rows * ((cols + 63) / 64), 0) {}

BitMatrix BitMatrix::from_rows(const std::vector<BitVector>& rows, std::size_t cols) {
    BitMatrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) throw std::invalid_argument("BitMatrix: ragged rows");
        for (std::size_t c = 0; c < cols; ++c) m.set(r, c, rows[r][c]);
    }
    return m;
}

void BitMatrix::set(std::size_t r, std::size_t c, bool v) {
    const std::uint64_t bit = std::uint64_t{1} << (c % 64);
    if (v) {
        data_[r * words_ + c / 64] |= bit;
    } else {
        data_[r * words_ + c / 64] &= ~bit;
    }
}

BitVector BitMatrix::row(std::size_t r) const {
    BitVector out(cols_);
    for (std::size_t c = 0; c < cols_; ++c) out[c] = get(r, c);
    return out;
}

BitMatrix BitMatrix::transpose() const {
    BitMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            if (get(r, c)) t.set(c, r, true);
    return t;
}

bool BitMatrix::is_symmetric() const { return rows_ == cols_ && *this == transpose(); }

std::size_t BitMatrix::rank() const {
    auto copy = data_;
    return reduce(copy, rows_, cols_, words_).size();
}

std::vector<BitVector> BitMatrix::kernel() const {
    auto copy = data_;
    const auto pivots = reduce(copy, rows_, cols_, words_);
    std::vector<bool> is_pivot(cols_, false);
    for (auto c : pivots) is_pivot[c] = true;

    std::vector<BitVector> basis;
    for (std::size_t free = 0; free < cols_; ++free) {
        if (is_pivot[free]) continue;
        BitVector v(cols_, false);
        v[free] = true;
        for (std::size_t i = 0; i < pivots.size(); ++i) {
            if ((copy[i * words_ + free / 64] >> (free % 64)) & 1U) v[pivots[i]] = true;
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

BitVector BitMatrix::apply(const BitVector& x) const {
    if (x.size() != cols_) throw std::invalid_argument("BitMatrix::apply: size mismatch");
    BitVector out(rows_, false);
    for (std::size_t r = 0; r < rows_; ++r) {
        bool acc = false;
        for (std::size_t c = 0; c < cols_; ++c) acc ^= (get(r, c) && x[c]);
        out[r] = acc;
    }
    return out;
}

std::string BitMatrix::to_string() const {
    std::string s;
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) s += get(r, c) ? '1' : '0';
        s += '\n';
    }
    return s;
}

std::size_t rank_of(const std::vector<BitVector>& vectors, std::size_t length) {
    return BitMatrix::from_rows(vectors, length).rank();
}

bool in_span(const std::vector<BitVector>& basis, const BitVector& v) {
    if (basis.empty()) {
        for (bool b : v)
            if (b) return false;
        return true;
    }
    auto extended = basis;
    extended.push_back(v);
    return rank_of(extended, v.size()) == rank_of(basis, v.size());
}

BitVector add(const BitVector& a, const BitVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("gf2::add: size mismatch");
    BitVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] != b[i];
    return out;
}

}  // namespace cassels::gf2
