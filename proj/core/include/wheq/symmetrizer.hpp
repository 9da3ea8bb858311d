#pragma once

#include "wheq/types.hpp"

#include <stdexcept>

namespace wheq {

struct CoincidentNodes : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Vandermonde-type quasi-symmetrizer data at one (t,xi): H has entries
// lambda_q^{p-1} <xi>^{-p+1}, with determinant and inverse in closed form.
// Tolerance gates scale with cond_proxy = (<xi>/min_gap)^{m-1}; bundles past
// 1e12 are flagged ill-conditioned and oracle comparisons should be skipped.
struct SymmetrizerBundle {
  Vec lambda;
  double bracket_xi = 1.0;
  Mat H;
  Mat Hinv;   // closed form
  double detH = 0.0; // closed form
  double min_gap = 0.0;
  double cond_proxy = 1.0;
  bool ill_conditioned = false;

  int order() const { return static_cast<int>(lambda.size()); }
};

// Closed-form determinant and inverse. Throws CoincidentNodes when two nodes
// agree exactly; m is capped at 12.
SymmetrizerBundle build_bundle(const Vec& lambda, double bracket_xi);

// LU-based determinant oracle for the closed form: H is assembled from
// (lambda, <xi>) and eliminated in extended precision, so the comparison
// tests the formula rather than double-rounding artifacts of the entries.
double det_lu(const Vec& lambda, double bracket_xi);

// LU-based inverse of H, the oracle for the closed form.
Mat inverse_lu(const Mat& H);

// Companion-form symbol matrix: <xi> superdiagonal, last row w_coeffs[j-1]
// <xi>^{j-m} in column j. Its eigenvalues are the roots of
// tau^m - sum_j w_coeffs[j] tau^j.
Mat companion_symbol_matrix(const Vec& w_coeffs, double bracket_xi);

// Lower-order matrix: zero except the last row g_coeffs[j-1] <xi>^{j-m}.
Mat lower_symbol_matrix(const Vec& g_coeffs, double bracket_xi);

// H^-1 A H. Off-diagonal entries by the closed product formula in (tau,
// lambda); the diagonal comes from the oracle (stated only for p != q).
// w_coeffs are the tau-polynomial coefficients defining A's last row.
Mat conjugate_A_closed(const SymmetrizerBundle& b, const Vec& tau, const Vec& w_coeffs);

// Off-diagonal part only, without any oracle call. Diagonal entries are zero.
// Sufficient for the skew part A - A^T, whose diagonal always vanishes.
Mat conjugate_A_offdiag(const SymmetrizerBundle& b, const Vec& tau);

// H^-1 B H from the values g(lambda_q); rank-one column structure.
Mat conjugate_B_closed(const SymmetrizerBundle& b, const Vec& g_values);

// H^-1 (dH/dt) from the node derivatives lambda'.
Mat conjugate_dH_closed(const SymmetrizerBundle& b, const Vec& lambda_dt);

// Hinv * M * H with the closed-form inverse; with lu_check also recomputes
// through an LU inverse and throws if the two disagree beyond the gate.
Mat conjugate_oracle(const SymmetrizerBundle& b, const Mat& M, bool lu_check = false);

// d/dt of H entrywise, given lambda'(t): (p-1) lambda^{p-2} lambda' <xi>^{1-p}.
Mat dH_dt(const SymmetrizerBundle& b, const Vec& lambda_dt);

} // namespace wheq
