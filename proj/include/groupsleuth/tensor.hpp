#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace groupsleuth {

/// Dense row-major matrix. The pipeline runs in float; gradient-check
/// tests instantiate the same code with double.
template <typename T>
struct Tensor {
    std::size_t rows = 0, cols = 0;
    std::vector<T> data;

    Tensor() = default;
    Tensor(std::size_t r, std::size_t c, T fill = T(0))
        : rows(r), cols(c), data(r * c, fill) {}

    T& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    T operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::size_t size() const { return data.size(); }

    void fill(T v) { std::fill(data.begin(), data.end(), v); }

    void randn(std::mt19937& rng, T stddev) {
        std::normal_distribution<double> d(0.0, 1.0);
        for (auto& v : data) v = static_cast<T>(d(rng)) * stddev;
    }

    bool finite() const {
        for (T v : data)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }

    void require_finite(const std::string& what) const {
        if (!finite()) throw std::runtime_error("non-finite values in " + what);
    }
};

using Tensor2 = Tensor<float>;

// C = A * B, serial reference kernel.
template <typename T>
void matmul_serial(const Tensor<T>& a, const Tensor<T>& b, Tensor<T>& c) {
    if (a.cols != b.rows) throw std::runtime_error("matmul: shape mismatch");
    c.rows = a.rows;
    c.cols = b.cols;
    c.data.assign(a.rows * b.cols, T(0));
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            T av = a(i, k);
            const T* brow = &b.data[k * b.cols];
            T* crow = &c.data[i * c.cols];
            for (std::size_t j = 0; j < b.cols; ++j) crow[j] += av * brow[j];
        }
}

// OpenMP kernel; rows are partitioned across threads so each output element
// is computed by exactly one thread in the same order as the serial kernel.
template <typename T>
void matmul(const Tensor<T>& a, const Tensor<T>& b, Tensor<T>& c) {
    if (a.cols != b.rows) throw std::runtime_error("matmul: shape mismatch");
    c.rows = a.rows;
    c.cols = b.cols;
    c.data.assign(a.rows * b.cols, T(0));
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < (long long)a.rows; ++i) {
        for (std::size_t k = 0; k < a.cols; ++k) {
            T av = a(i, k);
            const T* brow = &b.data[k * b.cols];
            T* crow = &c.data[i * c.cols];
            for (std::size_t j = 0; j < b.cols; ++j) crow[j] += av * brow[j];
        }
    }
}

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
    Tensor<T> c;
    matmul(a, b, c);
    return c;
}

// C = A^T * B
template <typename T>
Tensor<T> matmul_tn(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.rows != b.rows) throw std::runtime_error("matmul_tn: shape mismatch");
    Tensor<T> c(a.cols, b.cols);
    for (std::size_t k = 0; k < a.rows; ++k)
        for (std::size_t i = 0; i < a.cols; ++i) {
            T av = a(k, i);
            const T* brow = &b.data[k * b.cols];
            T* crow = &c.data[i * c.cols];
            for (std::size_t j = 0; j < b.cols; ++j) crow[j] += av * brow[j];
        }
    return c;
}

// y = W * x  (W: m x n, x: n)
template <typename T>
void matvec(const std::vector<T>& w, std::size_t m, std::size_t n,
            const std::vector<T>& x, std::vector<T>& y) {
    y.assign(m, T(0));
    for (std::size_t i = 0; i < m; ++i) {
        const T* row = &w[i * n];
        T s = 0;
        for (std::size_t j = 0; j < n; ++j) s += row[j] * x[j];
        y[i] = s;
    }
}

// y = W^T * x  (W: m x n, x: m)
template <typename T>
void matvec_t(const std::vector<T>& w, std::size_t m, std::size_t n,
              const std::vector<T>& x, std::vector<T>& y) {
    y.assign(n, T(0));
    for (std::size_t i = 0; i < m; ++i) {
        const T* row = &w[i * n];
        T xi = x[i];
        for (std::size_t j = 0; j < n; ++j) y[j] += row[j] * xi;
    }
}

// W += a * b^T
template <typename T>
void outer_acc(std::vector<T>& w, const std::vector<T>& a, const std::vector<T>& b) {
    std::size_t m = a.size(), n = b.size();
    for (std::size_t i = 0; i < m; ++i) {
        T ai = a[i];
        T* row = &w[i * n];
        for (std::size_t j = 0; j < n; ++j) row[j] += ai * b[j];
    }
}

template <typename T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
    T s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

template <typename T>
double cosine(const std::vector<T>& a, const std::vector<T>& b) {
    double num = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += double(a[i]) * double(b[i]);
        na += double(a[i]) * double(a[i]);
        nb += double(b[i]) * double(b[i]);
    }
    if (na == 0 || nb == 0) return 0.0;
    return num / (std::sqrt(na) * std::sqrt(nb));
}

template <typename T>
T sigmoid(T x) {
    return T(1) / (T(1) + std::exp(-x));
}

}  // namespace groupsleuth
