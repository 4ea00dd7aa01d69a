#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace biotfs {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/**
 * Compressed sparse row matrix.
 *
 * Column indices are strictly increasing within each row and there are no
 * duplicate entries. Most operators here are square, the displacement to
 * pressure coupling block is not.
 */
class SparseMatrixCSR {
 public:
  SparseMatrixCSR() = default;

  /// Duplicate (row, col) pairs are summed. Explicit zeros are kept so that
  /// the pattern does not depend on cancellation.
  static SparseMatrixCSR from_triplets(int rows, int cols, std::span<const Triplet> triplets);
  static SparseMatrixCSR identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<int>& row_offsets() const { return row_ptr_; }
  const std::vector<int>& col_indices() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Stored value at (i,j), zero when not in the pattern.
  double coeff(int i, int j) const;
  /// Pointer to the stored value at (i,j) or nullptr.
  double* find(int i, int j);

  double max_abs() const;
  bool is_symmetric(double rel_tol = 1e-14) const;
  std::vector<double> diagonal() const;
  std::vector<double> row_sums() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

/// y = A x. Throws std::invalid_argument on dimension mismatch.
void spmv(const SparseMatrixCSR& a, std::span<const double> x, std::span<double> y);
std::vector<double> spmv(const SparseMatrixCSR& a, std::span<const double> x);
/// y = A^T x.
std::vector<double> spmv_transpose(const SparseMatrixCSR& a, std::span<const double> x);

/// sa*A + sb*B with the union pattern.
SparseMatrixCSR linear_combination(double sa, const SparseMatrixCSR& a, double sb,
                                   const SparseMatrixCSR& b);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);

enum class SolverMethod { DirectCholesky, CgJacobi };

struct SolverConfig {
  SolverMethod method = SolverMethod::DirectCholesky;
  double rel_tol = 1e-12;
  int max_iter = 20000;

  void validate() const;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/**
 * Reusable SPD solver. The operator is factorized (or preconditioned) once
 * at construction; solve() is const, keeps its work vectors local and may be
 * called concurrently from several threads.
 */
class SpdSolver {
 public:
  SpdSolver(const SparseMatrixCSR& a, SolverConfig cfg);
  ~SpdSolver();
  SpdSolver(SpdSolver&&) noexcept;
  SpdSolver& operator=(SpdSolver&&) noexcept;

  std::vector<double> solve(std::span<const double> b) const;
  int size() const;
  const SolverConfig& config() const { return cfg_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  SolverConfig cfg_;
};

std::vector<double> solve_spd(const SparseMatrixCSR& a, std::span<const double> b,
                              const SolverConfig& cfg);

}  // namespace biotfs
