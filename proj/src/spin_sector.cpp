#include "nsqa/spin_sector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

#include <Eigen/Eigenvalues>

namespace nsqa::sector {

DickeBasis::DickeBasis(int N) : n_(N) {
  if (N < 1) throw ParameterError("N must be positive");
}

std::vector<double> DickeBasis::levels() const {
  std::vector<double> out(dimension());
  for (int j = 0; j < dimension(); ++j) out[j] = level(j);
  return out;
}

SectorOperator::SectorOperator(DickeBasis basis, detail::Diagonals<double> diagonals)
    : basis_(basis), diag_(std::move(diagonals)) {
  if (diag_.empty() || static_cast<int>(diag_[0].size()) != basis_.dimension())
    throw ParameterError("operator does not match basis dimension");
}

Eigen::MatrixXd SectorOperator::dense() const {
  const int n = basis_.dimension();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int d = 0; d <= bandwidth(); ++d)
    for (int j = 0; j + d < n; ++j) m(j, j + d) = m(j + d, j) = diag_[d][j];
  return m;
}

double SectorOperator::trace() const {
  double t = 0.0;
  for (double v : diag_[0]) t += v;
  return t;
}

SectorOperator build_mz_power(const DickeBasis& basis, int p) {
  if (p < 1) throw ParameterError("power must be >= 1");
  return SectorOperator(basis, detail::mz_power_diagonals<double>(basis.N(), p));
}

SectorOperator build_mx_power(const DickeBasis& basis, int k) {
  if (k < 1) throw ParameterError("power must be >= 1");
  return SectorOperator(basis, detail::band_power(detail::mx_diagonals<double>(basis.N()), k));
}

SectorHamiltonian build_sector_hamiltonian(const ModelSpec& params, const AnnealPoint& point, int N) {
  params.validate();
  point.validate();
  if (params.k < 2) throw ParameterError("k must be >= 2");
  const double lam = effective_lambda(params, point);
  return {params, point,
          SectorOperator(DickeBasis(N),
                         detail::hamiltonian_diagonals<double>(N, params.p, params.k, point.s, lam))};
}

std::vector<double> lowest_eigenvalues(const SectorHamiltonian& h, int count) {
  const int n = h.op.basis().dimension();
  if (count < 1 || count > n) throw ParameterError("count must lie in [1, N+1]");
  Eigen::VectorXd evals;
  if (h.op.bandwidth() <= 1) {
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(h.op.diagonals()[0].data(), n);
    Eigen::VectorXd sub = Eigen::VectorXd::Zero(std::max(n - 1, 0));
    if (h.op.bandwidth() == 1) sub = Eigen::Map<const Eigen::VectorXd>(h.op.diagonals()[1].data(), n - 1);
    // Unlike compute(), computeFromTridiagonal does not rescale its input.
    const double scale = std::max(diag.cwiseAbs().maxCoeff(), n > 1 ? sub.cwiseAbs().maxCoeff() : 0.0);
    const double inv = scale > 0.0 ? 1.0 / scale : 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag * inv, sub * inv, Eigen::EigenvaluesOnly);
    if (es.info() == Eigen::Success) {
      evals = es.eigenvalues() / inv;
    } else {
      es.compute(h.op.dense(), Eigen::EigenvaluesOnly);
      if (es.info() != Eigen::Success) throw NumericalError("tridiagonal QL: iteration budget exhausted");
      evals = es.eigenvalues();
    }
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.op.dense(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("symmetric QL: iteration budget exhausted");
    evals = es.eigenvalues();
  }
  return std::vector<double>(evals.data(), evals.data() + count);
}

namespace {

// Full-space action of H on a vector; bit i set means spin i points down.
class PauliHamiltonian {
 public:
  PauliHamiltonian(const ModelSpec& params, const AnnealPoint& point, int N)
      : n_(N), p_(params.p), k_(params.k), dim_(std::size_t{1} << N) {
    const double lam = effective_lambda(params, point);
    target_ = -point.s * lam * N;
    multi_ = point.s * (1.0 - lam) * N;
    field_ = -(1.0 - point.s) * N;
  }

  std::size_t dim() const { return dim_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out(dim_);
    for (std::size_t b = 0; b < dim_; ++b) {
      const int down = std::popcount(b);
      double mz = static_cast<double>(n_ - 2 * down) / n_;
      double mzp = 1.0;
      for (int i = 0; i < p_; ++i) mzp *= mz;
      out[b] = target_ * mzp * v[b];
    }
    const Eigen::VectorXd x1 = apply_mx(v);
    out += field_ * x1;
    if (multi_ != 0.0) {
      Eigen::VectorXd xk = x1;
      for (int i = 1; i < k_; ++i) xk = apply_mx(xk);
      out += multi_ * xk;
    }
    return out;
  }

 private:
  Eigen::VectorXd apply_mx(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
    for (std::size_t b = 0; b < dim_; ++b) {
      if (v[b] == 0.0) continue;
      for (int i = 0; i < n_; ++i) out[b ^ (std::size_t{1} << i)] += v[b];
    }
    return out / n_;
  }

  int n_, p_, k_;
  std::size_t dim_;
  double target_ = 0.0, multi_ = 0.0, field_ = 0.0;
};

}  // namespace

std::vector<double> brute_force_spectrum(const ModelSpec& params, const AnnealPoint& point, int N) {
  params.validate();
  point.validate();
  if (N < 1 || N > 14) throw ParameterError("brute-force spectrum requires 1 <= N <= 14");
  const PauliHamiltonian h(params, point, N);
  const auto dim = static_cast<Eigen::Index>(h.dim());
  Eigen::MatrixXd m(dim, dim);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    e[c] = 1.0;
    m.col(c) = h.apply(e);
    e[c] = 0.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("full-space eigensolver did not converge");
  const Eigen::VectorXd& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

std::vector<double> brute_force_maximal_spin_levels(const ModelSpec& params, const AnnealPoint& point, int N,
                                                    int count) {
  params.validate();
  point.validate();
  if (N < 1 || N > 12) throw ParameterError("maximal-spin levels require 1 <= N <= 12");
  if (count < 1 || count > N + 1) throw ParameterError("count must lie in [1, N+1]");
  const PauliHamiltonian h(params, point, N);
  const auto dim = static_cast<Eigen::Index>(h.dim());
  Eigen::MatrixXd m(dim, dim);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    e[c] = 1.0;
    m.col(c) = h.apply(e);
    e[c] = 0.0;
  }
  // S^2 = 3N/4 - N(N-1)/4 + sum_{i<j} P_ij with P_ij the swap of spins i, j.
  // Sectors S and S-1 differ by 2S = N in S(S+1), so a weight of 3 on S^2
  // moves the whole maximal block (width <= 2N) below every other level.
  constexpr double weight = 3.0;
  const double diag = 0.75 * N - 0.25 * N * (N - 1);
  for (Eigen::Index b = 0; b < dim; ++b) {
    m(b, b) -= weight * diag;
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) {
        const auto bi = (b >> i) & 1, bj = (b >> j) & 1;
        const Eigen::Index t = bi == bj ? b : b ^ ((Eigen::Index{1} << i) | (Eigen::Index{1} << j));
        m(t, b) -= weight;
      }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("full-space eigensolver did not converge");
  const double S = 0.5 * N;
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = es.eigenvalues()[i] + weight * S * (S + 1.0);
  return out;
}

Eigen::MatrixXd maximal_spin_projection(const ModelSpec& params, const AnnealPoint& point, int N) {
  params.validate();
  point.validate();
  if (N < 1 || N > 16) throw ParameterError("projection requires 1 <= N <= 16");
  const PauliHamiltonian h(params, point, N);
  const auto dim = static_cast<Eigen::Index>(h.dim());

  // Dicke state j (M = -N/2 + j) has j spins up, i.e. N - j bits set.
  std::vector<Eigen::VectorXd> dicke(N + 1, Eigen::VectorXd::Zero(dim));
  for (Eigen::Index b = 0; b < dim; ++b)
    dicke[N - std::popcount(static_cast<std::uint64_t>(b))][b] = 1.0;
  for (auto& d : dicke) d.normalize();

  Eigen::MatrixXd out(N + 1, N + 1);
  for (int l = 0; l <= N; ++l) {
    const Eigen::VectorXd hv = h.apply(dicke[l]);
    for (int j = 0; j <= N; ++j) out(j, l) = dicke[j].dot(hv);
  }
  return 0.5 * (out + out.transpose());
}

}  // namespace nsqa::sector
