#include "vars/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "vars/errors.hpp"

namespace vars {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m;
  m.rows = rows.size();
  m.cols = rows.size() ? rows.begin()->size() : 0;
  m.data.reserve(m.rows * m.cols);
  for (const auto& r : rows) {
    if (r.size() != m.cols)
      throw ShapeError("from_rows: ragged row lengths");
    m.data.insert(m.data.end(), r.begin(), r.end());
  }
  return m;
}

std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows) + "x" + std::to_string(m.cols);
}

bool all_finite(const Matrix& m) {
  return std::all_of(m.data.begin(), m.data.end(),
                     [](double x) { return std::isfinite(x); });
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows)
    throw ShapeError("matmul: inner dimensions differ, " + shape_str(a) + " * " +
                     shape_str(b));
  Matrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j)
        out.at(i, j) += aik * b.at(k, j);
    }
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j)
      out.at(j, i) = a.at(i, j);
  return out;
}

Matrix relu(const Matrix& a) {
  Matrix out = a;
  for (double& x : out.data) x = x > 0.0 ? x : 0.0;
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b))
    throw ShapeError("add: shapes differ, " + shape_str(a) + " + " + shape_str(b));
  Matrix out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
  return out;
}

Matrix scale(const Matrix& a, double c) {
  Matrix out = a;
  for (double& x : out.data) x *= c;
  return out;
}

// True division, not multiplication by the reciprocal: x/x == 1.0 holds
// exactly, which the single-view attention contract relies on.
Matrix div_scalar(const Matrix& a, double denom) {
  Matrix out = a;
  for (double& x : out.data) x /= denom;
  return out;
}

double sum_all(const Matrix& a) {
  double total = 0.0;
  for (double x : a.data) total += x;
  return total;
}

Matrix row_sum(const Matrix& a) {
  Matrix out(a.rows, 1);
  for (std::size_t i = 0; i < a.rows; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) total += a.at(i, j);
    out.at(i, 0) = total;
  }
  return out;
}

Matrix col_max(const Matrix& a) {
  if (a.rows == 0)
    throw ShapeError("col_max: empty matrix");
  Matrix out(1, a.cols);
  for (std::size_t j = 0; j < a.cols; ++j) {
    double best = a.at(0, j);
    for (std::size_t i = 1; i < a.rows; ++i)
      if (a.at(i, j) > best) best = a.at(i, j);
    out.at(0, j) = best;
  }
  return out;
}

Matrix broadcast_row(const Matrix& row, std::size_t n) {
  if (row.rows != 1)
    throw ShapeError("broadcast_row: expected a 1xM matrix, got " + shape_str(row));
  Matrix out(n, row.cols);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < row.cols; ++j)
      out.at(i, j) = row.at(0, j);
  return out;
}

Vector dense_layer(const Vector& x, const Matrix& weights, const Vector& bias,
                   Activation activation) {
  if (weights.cols != x.len())
    throw ShapeError("dense_layer: weights " + shape_str(weights) + " vs input length " +
                     std::to_string(x.len()));
  if (bias.len() != weights.rows)
    throw ShapeError("dense_layer: bias length " + std::to_string(bias.len()) +
                     " vs weights " + shape_str(weights));
  Vector out(weights.rows);
  for (std::size_t i = 0; i < weights.rows; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < weights.cols; ++j) acc += weights.at(i, j) * x[j];
    acc += bias[i];
    out[i] = activation == Activation::relu && acc < 0.0 ? 0.0 : acc;
  }
  return out;
}

Matrix as_column(const Vector& v) {
  Matrix out(v.len(), 1);
  out.data = v.data;
  return out;
}

Vector to_vector(const Matrix& m) {
  if (m.rows != 1 && m.cols != 1)
    throw ShapeError("to_vector: matrix " + shape_str(m) + " is not a row or column");
  Vector out;
  out.data = m.data;
  return out;
}

}  // namespace vars
