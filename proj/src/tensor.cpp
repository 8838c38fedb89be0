#include "mulab/tensor.hpp"

#include <cmath>
#include <string>

#include "mulab/errors.hpp"

namespace mulab {

namespace {

std::string shape_str(const Tensor& t) {
    return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

} // namespace

Tensor::Tensor(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) {
        throw ShapeError("Tensor: " + std::to_string(values_.size()) + " values for shape " + shape_str(*this));
    }
}

Tensor Tensor::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return Tensor();
    Tensor out(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != out.cols()) {
            throw ShapeError("Tensor::from_rows: ragged row " + std::to_string(r));
        }
        for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) = rows[r][c];
    }
    return out;
}

bool Tensor::all_finite() const {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: " + shape_str(a) + " * " + shape_str(b));
    }
    Tensor out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

Tensor matmul_at_b(const Tensor& a, const Tensor& b) {
    if (a.rows() != b.rows()) {
        throw ShapeError("matmul_at_b: " + shape_str(a) + "^T * " + shape_str(b));
    }
    Tensor out(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = a(k, i);
            if (aki == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += aki * b(k, j);
            }
        }
    }
    return out;
}

Tensor matmul_a_bt(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.cols()) {
        throw ShapeError("matmul_a_bt: " + shape_str(a) + " * " + shape_str(b) + "^T");
    }
    Tensor out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.rows(); ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                sum += a(i, k) * b(j, k);
            }
            out(i, j) = sum;
        }
    }
    return out;
}

void add_row_inplace(Tensor& a, const Tensor& bias_row) {
    if (bias_row.rows() != 1 || bias_row.cols() != a.cols()) {
        throw ShapeError("add_row_inplace: bias " + shape_str(bias_row) + " to " + shape_str(a));
    }
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            a(i, j) += bias_row(0, j);
        }
    }
}

Tensor column_sums(const Tensor& a) {
    Tensor out(1, a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out(0, j) += a(i, j);
        }
    }
    return out;
}

} // namespace mulab
