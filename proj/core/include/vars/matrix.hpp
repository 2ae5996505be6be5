#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace vars {

// Dense row-major matrix of 64-bit reals. Values are immutable by convention
// once an operation has returned them; all operations allocate fresh storage.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // length rows * cols

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::size_t size() const { return rows * cols; }
  bool empty() const { return data.empty(); }
  bool same_shape(const Matrix& other) const {
    return rows == other.rows && cols == other.cols;
  }
};

// Dense vector of 64-bit reals.
struct Vector {
  std::vector<double> data;

  Vector() = default;
  explicit Vector(std::size_t n, double fill = 0.0) : data(n, fill) {}
  Vector(std::initializer_list<double> init) : data(init) {}

  std::size_t len() const { return data.size(); }
  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }
};

enum class Activation { identity, relu };

// ---- value-level kernels -------------------------------------------------
// These are the single implementation of each primitive; the gradient tape
// replays through the same functions.

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix relu(const Matrix& a);             // subgradient at 0 is 0
Matrix add(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double c);
Matrix div_scalar(const Matrix& a, double denom);  // elementwise IEEE division
double sum_all(const Matrix& a);
Matrix row_sum(const Matrix& a);          // n x m -> n x 1
Matrix col_max(const Matrix& a);          // n x m -> 1 x m, ties: lowest row index
Matrix broadcast_row(const Matrix& row, std::size_t n);  // 1 x m -> n x m

// activation(weights . x + bias)
Vector dense_layer(const Vector& x, const Matrix& weights, const Vector& bias,
                   Activation activation);

// ---- conversions and helpers ----------------------------------------------

Matrix as_column(const Vector& v);          // len x 1
Vector to_vector(const Matrix& m);          // requires rows == 1 or cols == 1
std::string shape_str(const Matrix& m);
bool all_finite(const Matrix& m);

}  // namespace vars
