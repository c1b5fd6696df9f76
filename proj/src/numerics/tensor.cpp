#include "schemaqa/numerics/tensor.hpp"

#include <cmath>
#include <sstream>

namespace schemaqa::numerics {

std::size_t shape_size(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

std::string shape_str(const std::vector<std::size_t>& shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
    os << "]";
    return os.str();
}

Tensor::Tensor(std::vector<std::size_t> shape_in, std::vector<double> data_in)
    : shape(std::move(shape_in)), data(std::move(data_in)) {
    if (data.size() != shape_size(shape)) {
        throw Error("tensor data length " + std::to_string(data.size()) +
                    " does not match shape " + shape_str(shape));
    }
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
    std::size_t n = shape_size(shape);
    return Tensor(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tensor::vector(std::vector<double> values) {
    std::size_t n = values.size();
    return Tensor({n}, std::move(values));
}

Tensor Tensor::scalar(double value) { return Tensor({1}, {value}); }

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
    return Tensor({rows, cols}, std::move(values));
}

std::size_t Tensor::rows() const {
    if (rank() != 2) throw Error("rows() on tensor of rank " + std::to_string(rank()));
    return shape[0];
}

std::size_t Tensor::cols() const {
    if (rank() != 2) throw Error("cols() on tensor of rank " + std::to_string(rank()));
    return shape[1];
}

double& Tensor::at(std::size_t r, std::size_t c) { return data[r * cols() + c]; }
double Tensor::at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }

bool Tensor::all_finite() const {
    for (double v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void Tensor::fill(double v) {
    for (auto& x : data) x = v;
}

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b)) {
        throw Error(std::string(op) + ": shape mismatch " + shape_str(a.shape) + " vs " +
                    shape_str(b.shape));
    }
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    Tensor out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    Tensor out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
    return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    Tensor out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
    return out;
}

Tensor scale(const Tensor& a, double k) {
    Tensor out = a;
    for (auto& v : out.data) v *= k;
    return out;
}

void add_inplace(Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add_inplace");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

void add_scaled_inplace(Tensor& a, const Tensor& b, double k) {
    require_same_shape(a, b, "add_scaled_inplace");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += k * b[i];
}

double dot(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
        throw Error("matmul: incompatible shapes " + shape_str(a.shape) + " x " +
                    shape_str(b.shape));
    }
    Tensor out = Tensor::zeros({a.rows(), b.cols()});
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            double aik = a.at(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out.at(i, j) += aik * b.at(k, j);
        }
    }
    return out;
}

Tensor vecmat(const Tensor& v, const Tensor& m) {
    if (v.rank() != 1 || m.rank() != 2 || v.size() != m.rows()) {
        throw Error("vecmat: incompatible shapes " + shape_str(v.shape) + " x " +
                    shape_str(m.shape));
    }
    Tensor out = Tensor::zeros({m.cols()});
    for (std::size_t k = 0; k < m.rows(); ++k) {
        double vk = v[k];
        if (vk == 0.0) continue;
        for (std::size_t j = 0; j < m.cols(); ++j) out[j] += vk * m.at(k, j);
    }
    return out;
}

Tensor matvec(const Tensor& m, const Tensor& v) {
    if (v.rank() != 1 || m.rank() != 2 || v.size() != m.cols()) {
        throw Error("matvec: incompatible shapes " + shape_str(m.shape) + " x " +
                    shape_str(v.shape));
    }
    Tensor out = Tensor::zeros({m.rows()});
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += m.at(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

Tensor outer(const Tensor& a, const Tensor& b) {
    if (a.rank() != 1 || b.rank() != 1) throw Error("outer: expects two vectors");
    Tensor out = Tensor::zeros({a.size(), b.size()});
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) out.at(i, j) = a[i] * b[j];
    }
    return out;
}

Tensor transpose(const Tensor& m) {
    if (m.rank() != 2) throw Error("transpose: expects a matrix");
    Tensor out = Tensor::zeros({m.cols(), m.rows()});
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) out.at(j, i) = m.at(i, j);
    }
    return out;
}

Tensor concat(const Tensor& a, const Tensor& b) {
    if (a.rank() != 1 || b.rank() != 1) throw Error("concat: expects two vectors");
    std::vector<double> values;
    values.reserve(a.size() + b.size());
    values.insert(values.end(), a.data.begin(), a.data.end());
    values.insert(values.end(), b.data.begin(), b.data.end());
    return Tensor::vector(std::move(values));
}

void require_finite(const Tensor& t, const char* context) {
    if (!t.all_finite()) throw Error(std::string(context) + ": non-finite values");
}

}  // namespace schemaqa::numerics
