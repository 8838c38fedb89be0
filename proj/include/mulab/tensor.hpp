#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mulab {

/// Dense 2-D matrix of doubles, row-major. The numeric substrate for
/// activations, weights and gradients.
class Tensor {
public:
    Tensor() = default;
    Tensor(std::size_t rows, std::size_t cols, double fill = 0.0);
    Tensor(std::size_t rows, std::size_t cols, std::vector<double> values);

    static Tensor from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return values_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    bool same_shape(const Tensor& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    bool all_finite() const;

    bool operator==(const Tensor& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// a * b. Shapes (n x k) * (k x m) -> (n x m); throws ShapeError otherwise.
Tensor matmul(const Tensor& a, const Tensor& b);

/// transpose(a) * b. Shapes (k x n)^T * (k x m) -> (n x m).
Tensor matmul_at_b(const Tensor& a, const Tensor& b);

/// a * transpose(b). Shapes (n x k) * (m x k)^T -> (n x m).
Tensor matmul_a_bt(const Tensor& a, const Tensor& b);

/// Adds a 1 x m bias row to every row of a (n x m), in place.
void add_row_inplace(Tensor& a, const Tensor& bias_row);

/// Column sums of a as a 1 x m tensor.
Tensor column_sums(const Tensor& a);

} // namespace mulab
