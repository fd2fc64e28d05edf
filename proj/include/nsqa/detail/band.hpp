#pragma once

// Symmetric band matrices stored as upper diagonals: diag[d][j] = A(j, j + d).
// Templated on the scalar so the same assembly serves double and MPFR.

#include <algorithm>
#include <cmath>
#include <vector>

namespace nsqa::detail {

template <class T>
using Diagonals = std::vector<std::vector<T>>;

template <class T>
int band_width(const Diagonals<T>& a) {
  return static_cast<int>(a.size()) - 1;
}

template <class T>
T band_at(const Diagonals<T>& a, int i, int j) {
  if (i > j) std::swap(i, j);
  const int d = j - i;
  if (d >= static_cast<int>(a.size())) return T(0);
  return a[d][i];
}

// m_x = (2/N) S_x; (S_x)_{j,j+1} = sqrt((j+1)(N-j)) / 2 with M_j = -N/2 + j.
template <class T>
Diagonals<T> mx_diagonals(int N) {
  Diagonals<T> a(N >= 1 ? 2 : 1);
  a[0].assign(N + 1, T(0));
  if (N >= 1) {
    a[1].resize(N);
    for (int j = 0; j < N; ++j) {
      using std::sqrt;
      a[1][j] = sqrt(T((j + 1) * static_cast<long long>(N - j))) / T(N);
    }
  }
  return a;
}

template <class T>
Diagonals<T> mz_power_diagonals(int N, int p) {
  Diagonals<T> a(1);
  a[0].resize(N + 1);
  for (int j = 0; j <= N; ++j) {
    const T m = T(2 * j - N) / T(N);
    T v(1);
    for (int i = 0; i < p; ++i) v *= m;
    a[0][j] = v;
  }
  return a;
}

// Product of two commuting symmetric band matrices (so the result is symmetric
// and only its upper band is formed).
template <class T>
Diagonals<T> band_product(const Diagonals<T>& a, const Diagonals<T>& b) {
  const int n = static_cast<int>(a[0].size());
  const int wa = band_width(a), wb = band_width(b);
  const int wc = std::min(wa + wb, n - 1);
  Diagonals<T> c(wc + 1);
  for (int d = 0; d <= wc; ++d) {
    c[d].assign(n - d, T(0));
    for (int i = 0; i + d < n; ++i) {
      const int j = i + d;
      const int lo = std::max({0, i - wa, j - wb});
      const int hi = std::min({n - 1, i + wa, j + wb});
      T acc(0);
      for (int m = lo; m <= hi; ++m) acc += band_at(a, i, m) * band_at(b, m, j);
      c[d][i] = acc;
    }
  }
  return c;
}

template <class T>
Diagonals<T> band_power(const Diagonals<T>& a, int k) {
  Diagonals<T> r = a;
  for (int i = 1; i < k; ++i) r = band_product(r, a);
  return r;
}

// c_a*A + c_b*B, result bandwidth = max of the two.
template <class T>
void band_axpy(Diagonals<T>& acc, const T& coef, const Diagonals<T>& b) {
  if (acc.size() < b.size()) {
    const int n = static_cast<int>(b[0].size());
    for (std::size_t d = acc.size(); d < b.size(); ++d) acc.emplace_back(n - d, T(0));
  }
  for (std::size_t d = 0; d < b.size(); ++d)
    for (std::size_t j = 0; j < b[d].size(); ++j) acc[d][j] += coef * b[d][j];
}

// -s*lam*N mz^p + s(1-lam)*N mx^k - (1-s)*N mx. The multi-X term is dropped
// when its coefficient is exactly zero, keeping lambda = 1 tridiagonal.
template <class T>
Diagonals<T> hamiltonian_diagonals(int N, int p, int k, const T& s, const T& lambda) {
  const T n(N);
  Diagonals<T> h(1);
  h[0].assign(N + 1, T(0));
  band_axpy(h, T(-s * lambda * n), mz_power_diagonals<T>(N, p));
  const auto mx = mx_diagonals<T>(N);
  const T multi = s * (T(1) - lambda) * n;
  if (multi != T(0)) band_axpy(h, multi, band_power(mx, k));
  band_axpy(h, T(-(T(1) - s) * n), mx);
  return h;
}

// Number of eigenvalues of A strictly below sigma, from the inertia of the
// band LDL^T factorization of A - sigma. Exact zero pivots are nudged by `tiny`.
template <class T>
int count_below(const Diagonals<T>& a, const T& sigma, const T& tiny) {
  const int n = static_cast<int>(a[0].size());
  const int w = band_width(a);
  std::vector<T> d(n);
  // l[i][t] = L(i, i - w + t) for t = 0..w-1.
  std::vector<std::vector<T>> l(n, std::vector<T>(w, T(0)));
  int negative = 0;
  for (int i = 0; i < n; ++i) {
    const int j0 = std::max(0, i - w);
    for (int j = j0; j < i; ++j) {
      T v = band_at(a, i, j);
      for (int q = std::max(j0, j - w); q < j; ++q) v -= l[i][q - i + w] * l[j][q - j + w] * d[q];
      l[i][j - i + w] = v / d[j];
    }
    T di = a[0][i] - sigma;
    for (int q = j0; q < i; ++q) di -= l[i][q - i + w] * l[i][q - i + w] * d[q];
    if (di == T(0)) di = tiny;
    if (di < T(0)) ++negative;
    d[i] = di;
  }
  return negative;
}

// Gershgorin interval containing the spectrum.
template <class T>
std::pair<T, T> gershgorin(const Diagonals<T>& a) {
  const int n = static_cast<int>(a[0].size());
  const int w = band_width(a);
  using std::abs;
  T lo = a[0][0], hi = a[0][0];
  for (int i = 0; i < n; ++i) {
    T r(0);
    for (int j = std::max(0, i - w); j <= std::min(n - 1, i + w); ++j)
      if (j != i) r += abs(band_at(a, i, j));
    if (a[0][i] - r < lo) lo = a[0][i] - r;
    if (a[0][i] + r > hi) hi = a[0][i] + r;
  }
  return {lo, hi};
}

// Eigenvalue number idx (0-based, ascending) by inertia bisection inside [lo, hi].
template <class T>
T bisect_eigenvalue(const Diagonals<T>& a, int idx, T lo, T hi, const T& tol, const T& tiny) {
  while (hi - lo > tol) {
    const T mid = (lo + hi) / 2;
    if (mid <= lo || mid >= hi) break;
    if (count_below(a, mid, tiny) > idx) hi = mid; else lo = mid;
  }
  return (lo + hi) / 2;
}

}  // namespace nsqa::detail
