#include "wheq/symmetrizer.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace wheq {

namespace {

// Elementary symmetric polynomial e_k of the nodes excluding index `skip`,
// by the product recurrence (O(m^2), stable for tiny m).
double esym_excluding(const Vec& lambda, int skip, int k) {
  std::vector<double> e(static_cast<std::size_t>(k) + 1, 0.0);
  e[0] = 1.0;
  for (int i = 0; i < lambda.size(); ++i) {
    if (i == skip) continue;
    for (int j = k; j >= 1; --j) e[j] += lambda(i) * e[j - 1];
  }
  return e[static_cast<std::size_t>(k)];
}

// prod_{i != p} (lambda_i - lambda_p)
double node_product(const Vec& lambda, int p) {
  double prod = 1.0;
  for (int i = 0; i < lambda.size(); ++i)
    if (i != p) prod *= lambda(i) - lambda(p);
  return prod;
}

} // namespace

SymmetrizerBundle build_bundle(const Vec& lambda, double bracket_xi) {
  const int m = static_cast<int>(lambda.size());
  if (m < 1 || m > 12) throw std::invalid_argument("build_bundle: need 1 <= m <= 12");
  if (bracket_xi < 1.0) throw std::invalid_argument("build_bundle: <xi> must be >= 1");

  SymmetrizerBundle b;
  b.lambda = lambda;
  b.bracket_xi = bracket_xi;

  double min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) min_gap = std::min(min_gap, std::abs(lambda(i) - lambda(j)));
  if (m > 1 && min_gap == 0.0) {
    std::ostringstream os;
    os << "coincident symmetrizer nodes (min gap 0 among " << m << " nodes)";
    throw CoincidentNodes(os.str());
  }
  b.min_gap = (m > 1) ? min_gap : bracket_xi;
  b.cond_proxy = std::pow(bracket_xi / b.min_gap, m - 1);
  b.ill_conditioned = b.cond_proxy > 1e12;

  // H_{pq} = (lambda_q / <xi>)^{p-1}; ratio powers keep the scaling law exact
  b.H.resize(m, m);
  for (int q = 0; q < m; ++q) {
    double ratio = lambda(q) / bracket_xi;
    double pw = 1.0;
    for (int p = 0; p < m; ++p) {
      b.H(p, q) = pw;
      pw *= ratio;
    }
  }

  // det H = <xi>^{-m(m-1)/2} prod_{j<i} (lambda_i - lambda_j)
  double det = 1.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < i; ++j) det *= (lambda(i) - lambda(j)) / bracket_xi;
  b.detH = det;

  // h_{pq} = (-1)^{q-1} <xi>^{q-1} e_{m-q}(lambda w/o lambda_p) / prod_{i!=p}(lambda_i-lambda_p)
  b.Hinv.resize(m, m);
  for (int p = 0; p < m; ++p) {
    double prod = node_product(lambda, p);
    for (int q = 0; q < m; ++q) {
      double sign = (q % 2 == 0) ? 1.0 : -1.0;
      b.Hinv(p, q) = sign * std::pow(bracket_xi, q) * esym_excluding(lambda, p, m - 1 - q) / prod;
    }
  }
  return b;
}

double det_lu(const Vec& lambda, double bracket_xi) {
  // Entry rounding of a double H already shifts the determinant by more than
  // the 1e-10 gate on the worst admissible instances, so the oracle builds H
  // and eliminates in long double.
  using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = static_cast<int>(lambda.size());
  LMat A(n, n);
  for (int q = 0; q < n; ++q) {
    long double ratio = static_cast<long double>(lambda(q)) / bracket_xi;
    long double pw = 1.0L;
    for (int p = 0; p < n; ++p) {
      A(p, q) = pw;
      pw *= ratio;
    }
  }
  long double det = 1.0L;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(A(i, k)) > std::abs(A(piv, k))) piv = i;
    if (A(piv, k) == 0.0L) return 0.0;
    if (piv != k) {
      A.row(piv).swap(A.row(k));
      det = -det;
    }
    det *= A(k, k);
    for (int i = k + 1; i < n; ++i) {
      long double f = A(i, k) / A(k, k);
      for (int j = k + 1; j < n; ++j) A(i, j) -= f * A(k, j);
    }
  }
  return static_cast<double>(det);
}

Mat inverse_lu(const Mat& H) { return H.fullPivLu().inverse(); }

Mat companion_symbol_matrix(const Vec& w_coeffs, double bracket_xi) {
  const int m = static_cast<int>(w_coeffs.size());
  Mat A = Mat::Zero(m, m);
  for (int i = 0; i + 1 < m; ++i) A(i, i + 1) = bracket_xi;
  for (int j = 1; j <= m; ++j) A(m - 1, j - 1) = w_coeffs(j - 1) * std::pow(bracket_xi, j - m);
  return A;
}

Mat lower_symbol_matrix(const Vec& g_coeffs, double bracket_xi) {
  const int m = static_cast<int>(g_coeffs.size());
  Mat B = Mat::Zero(m, m);
  for (int j = 1; j <= m; ++j) B(m - 1, j - 1) = g_coeffs(j - 1) * std::pow(bracket_xi, j - m);
  return B;
}

Mat conjugate_A_offdiag(const SymmetrizerBundle& b, const Vec& tau) {
  const int m = b.order();
  Mat C = Mat::Zero(m, m);
  for (int q = 0; q < m; ++q) {
    double num = tau(q) - b.lambda(q);
    for (int i = 0; i < m; ++i)
      if (i != q) num *= tau(i) - b.lambda(q);
    for (int p = 0; p < m; ++p) {
      if (p == q) continue;
      C(p, q) = num / node_product(b.lambda, p);
    }
  }
  return C;
}

Mat conjugate_A_closed(const SymmetrizerBundle& b, const Vec& tau, const Vec& w_coeffs) {
  Mat C = conjugate_A_offdiag(b, tau);
  Mat oracle = conjugate_oracle(b, companion_symbol_matrix(w_coeffs, b.bracket_xi));
  for (int p = 0; p < b.order(); ++p) C(p, p) = oracle(p, p);
  return C;
}

Mat conjugate_B_closed(const SymmetrizerBundle& b, const Vec& g_values) {
  const int m = b.order();
  double sign = (m % 2 == 1) ? 1.0 : -1.0; // (-1)^{m-1}
  Mat D(m, m);
  for (int p = 0; p < m; ++p) {
    double f = sign / node_product(b.lambda, p);
    for (int q = 0; q < m; ++q) D(p, q) = f * g_values(q);
  }
  return D;
}

Mat conjugate_dH_closed(const SymmetrizerBundle& b, const Vec& lambda_dt) {
  const int m = b.order();
  Mat E(m, m);
  for (int p = 0; p < m; ++p) {
    double prod = node_product(b.lambda, p);
    for (int q = 0; q < m; ++q) {
      if (p == q) {
        double s = 0.0;
        for (int i = 0; i < m; ++i)
          if (i != p) s += 1.0 / (b.lambda(i) - b.lambda(p));
        E(p, p) = -lambda_dt(p) * s;
      } else {
        double num = 1.0;
        for (int i = 0; i < m; ++i)
          if (i != p && i != q) num *= b.lambda(i) - b.lambda(q);
        E(p, q) = -lambda_dt(q) * num / prod;
      }
    }
  }
  return E;
}

Mat conjugate_oracle(const SymmetrizerBundle& b, const Mat& M, bool lu_check) {
  Mat out = b.Hinv * M * b.H;
  if (lu_check) {
    Mat via_lu = inverse_lu(b.H) * M * b.H;
    double scale = std::max(1.0, via_lu.cwiseAbs().maxCoeff());
    double err = (out - via_lu).cwiseAbs().maxCoeff() / scale;
    if (err > 1e-8 * b.cond_proxy) {
      std::ostringstream os;
      os << "closed-form and LU conjugation disagree: rel err " << err << " with cond proxy "
         << b.cond_proxy;
      throw std::runtime_error(os.str());
    }
  }
  return out;
}

Mat dH_dt(const SymmetrizerBundle& b, const Vec& lambda_dt) {
  const int m = b.order();
  Mat D = Mat::Zero(m, m);
  for (int q = 0; q < m; ++q) {
    double pw = 1.0; // lambda_q^{p-2} built up across rows
    for (int p = 1; p < m; ++p) {
      D(p, q) = p * pw * lambda_dt(q) * std::pow(b.bracket_xi, -p);
      pw *= b.lambda(q);
    }
  }
  return D;
}

} // namespace wheq
