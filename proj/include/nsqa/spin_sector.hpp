#pragma once

#include <vector>

#include <Eigen/Dense>

#include "nsqa/detail/band.hpp"
#include "nsqa/model.hpp"

namespace nsqa::sector {

/// Maximal total-spin sector of N spins, levels M_j = -N/2 + j.
class DickeBasis {
 public:
  explicit DickeBasis(int N);
  int N() const { return n_; }
  int dimension() const { return n_ + 1; }
  double level(int j) const { return -0.5 * n_ + j; }
  std::vector<double> levels() const;

 private:
  int n_;
};

/// Real symmetric operator on a Dicke basis in upper-band storage.
class SectorOperator {
 public:
  SectorOperator(DickeBasis basis, detail::Diagonals<double> diagonals);

  const DickeBasis& basis() const { return basis_; }
  int bandwidth() const { return detail::band_width(diag_); }
  double at(int i, int j) const { return detail::band_at(diag_, i, j); }
  const detail::Diagonals<double>& diagonals() const { return diag_; }
  Eigen::MatrixXd dense() const;
  double trace() const;

 private:
  DickeBasis basis_;
  detail::Diagonals<double> diag_;
};

/// diag((2 M_j / N)^p).
SectorOperator build_mz_power(const DickeBasis& basis, int p);

/// (m_x)^k with m_x = (2/N) S_x; bandwidth min(k, N).
SectorOperator build_mx_power(const DickeBasis& basis, int k);

struct SectorHamiltonian {
  ModelSpec params;
  AnnealPoint point;
  SectorOperator op;
};

SectorHamiltonian build_sector_hamiltonian(const ModelSpec& params, const AnnealPoint& point, int N);

/// The `count` smallest eigenvalues, ascending.
std::vector<double> lowest_eigenvalues(const SectorHamiltonian& h, int count);

/// Full sorted spectrum of the 2^N-dimensional Hamiltonian built from
/// explicit single-spin Pauli actions. N <= 14 (dense, memory grows as 4^N).
std::vector<double> brute_force_spectrum(const ModelSpec& params, const AnnealPoint& point, int N);

/// The `count` lowest levels of maximal total spin, from the full 2^N matrix
/// with a penalty on S^2 that orders the maximal block first. Lower-spin
/// sectors can hold levels below the maximal-spin ones when lambda < 1.
std::vector<double> brute_force_maximal_spin_levels(const ModelSpec& params, const AnnealPoint& point, int N,
                                                    int count = 2);

/// The full-space Hamiltonian (applied through Pauli actions on 2^N vectors)
/// projected onto explicitly symmetrized Dicke states. Independent check on
/// the ladder-operator assembly. N <= 16.
Eigen::MatrixXd maximal_spin_projection(const ModelSpec& params, const AnnealPoint& point, int N);

}  // namespace nsqa::sector
