#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace forge::la {

// Dense row-major d x d helpers with partial pivoting. Charts here stay
// small (d <= 8 in every shipped example), so no blocking or pivToL tricks.

inline double determinant(std::vector<double> a, int d) {
  double det = 1.0;
  for (int k = 0; k < d; ++k) {
    int piv = k;
    double best = std::fabs(a[static_cast<size_t>(k) * d + k]);
    for (int r = k + 1; r < d; ++r) {
      double v = std::fabs(a[static_cast<size_t>(r) * d + k]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) return 0.0;
    if (piv != k) {
      for (int c = 0; c < d; ++c)
        std::swap(a[static_cast<size_t>(piv) * d + c],
                  a[static_cast<size_t>(k) * d + c]);
      det = -det;
    }
    const double pivot = a[static_cast<size_t>(k) * d + k];
    det *= pivot;
    for (int r = k + 1; r < d; ++r) {
      const double f = a[static_cast<size_t>(r) * d + k] / pivot;
      for (int c = k; c < d; ++c)
        a[static_cast<size_t>(r) * d + c] -= f * a[static_cast<size_t>(k) * d + c];
    }
  }
  return det;
}

// Gauss-Jordan inverse; returns false on a vanishing pivot.
inline bool invert(std::vector<double> a, int d, std::vector<double>& out) {
  out.assign(static_cast<size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) out[static_cast<size_t>(i) * d + i] = 1.0;
  for (int k = 0; k < d; ++k) {
    int piv = k;
    double best = std::fabs(a[static_cast<size_t>(k) * d + k]);
    for (int r = k + 1; r < d; ++r) {
      double v = std::fabs(a[static_cast<size_t>(r) * d + k]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) return false;
    if (piv != k)
      for (int c = 0; c < d; ++c) {
        std::swap(a[static_cast<size_t>(piv) * d + c],
                  a[static_cast<size_t>(k) * d + c]);
        std::swap(out[static_cast<size_t>(piv) * d + c],
                  out[static_cast<size_t>(k) * d + c]);
      }
    const double pivot = a[static_cast<size_t>(k) * d + k];
    for (int c = 0; c < d; ++c) {
      a[static_cast<size_t>(k) * d + c] /= pivot;
      out[static_cast<size_t>(k) * d + c] /= pivot;
    }
    for (int r = 0; r < d; ++r) {
      if (r == k) continue;
      const double f = a[static_cast<size_t>(r) * d + k];
      if (f == 0.0) continue;
      for (int c = 0; c < d; ++c) {
        a[static_cast<size_t>(r) * d + c] -= f * a[static_cast<size_t>(k) * d + c];
        out[static_cast<size_t>(r) * d + c] -= f * out[static_cast<size_t>(k) * d + c];
      }
    }
  }
  return true;
}

}  // namespace forge::la
