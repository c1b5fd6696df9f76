#pragma once
// Dense row-major tensor of doubles. Rank 1 and 2 cover everything the
// encoders need; no broadcasting, no views.

#include <cstddef>
#include <vector>

#include "schemaqa/error.hpp"

namespace schemaqa::numerics {

struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::vector<std::size_t> shape_in, std::vector<double> data_in);

    static Tensor zeros(std::vector<std::size_t> shape);
    static Tensor vector(std::vector<double> values);
    static Tensor scalar(double value);
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    std::size_t size() const { return data.size(); }
    std::size_t rank() const { return shape.size(); }
    std::size_t rows() const;
    std::size_t cols() const;

    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }
    double& at(std::size_t r, std::size_t c);
    double at(std::size_t r, std::size_t c) const;

    bool same_shape(const Tensor& other) const { return shape == other.shape; }
    bool all_finite() const;
    void fill(double v);
};

std::size_t shape_size(const std::vector<std::size_t>& shape);
std::string shape_str(const std::vector<std::size_t>& shape);

// Elementwise / linear algebra on values (no autodiff).
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double k);
void add_inplace(Tensor& a, const Tensor& b);
void add_scaled_inplace(Tensor& a, const Tensor& b, double k);
double dot(const Tensor& a, const Tensor& b);
Tensor matmul(const Tensor& a, const Tensor& b);        // [r,k] x [k,c] -> [r,c]
Tensor vecmat(const Tensor& v, const Tensor& m);        // [k] x [k,c] -> [c]
Tensor matvec(const Tensor& m, const Tensor& v);        // [r,k] x [k] -> [r]
Tensor outer(const Tensor& a, const Tensor& b);         // [r] x [c] -> [r,c]
Tensor transpose(const Tensor& m);
Tensor concat(const Tensor& a, const Tensor& b);        // vectors

void require_finite(const Tensor& t, const char* context);

}  // namespace schemaqa::numerics
