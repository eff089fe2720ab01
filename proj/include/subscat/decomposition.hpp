#pragma once

#include <span>
#include <vector>

#include "subscat/potentials.hpp"
#include "subscat/stationary.hpp"

namespace subscat {

/// Below this reflection coefficient Psi_ref is taken to be identically zero.
inline constexpr double kDegenerateReflection = 1e-12;

/// Relative size of |Psi_ref(x_c)| (to the peak of |Psi_ref| on [a, x_c])
/// that counts as vanishing.
inline constexpr double kBranchTolerance = 1e-8;

enum class Branch { odd, even };

/// The two solutions z of |z| = |A_R|, |1 - z| = |A_T|: z = R +- i sqrt(T R).
struct CandidatePair {
  cplx plus;
  cplx minus;
  bool degenerate = false;  // R in {0, 1}: both entries coincide
};

CandidatePair candidates(cplx a_full_t, cplx a_full_r);

struct BranchDiagnostics {
  double selected_at_center = 0.0;  // |Psi_ref(x_c)| / peak, forward-propagated, chosen candidate
  double rejected_at_center = 0.0;  // same for the other candidate
  double peak = 0.0;                // max |Psi_ref| on [a, x_c]
  double propagation_mismatch = 0.0;  // forward propagation vs stored representation, / peak
};

/// Psi_full = Psi_tr + Psi_ref for one wavenumber. Left of the barrier
///   Psi_tr  = a_tr_in exp(ikx)
///   Psi_ref = a_ref_in exp(ikx) + a_ref_r exp(-ikx)
/// Psi_ref is stored as a_ref_in * (Psi_full(x) -/+ Psi_full(2 x_c - x)), the
/// odd (or even) projection of the full solution about the barrier centre.
class Decomposition {
 public:
  double k = 0.0;
  cplx a_tr_in;
  cplx a_ref_in;
  cplx a_tr_r{0.0, 0.0};
  cplx a_ref_r;
  Branch branch = Branch::odd;
  bool degenerate = false;
  BranchDiagnostics diagnostics;

  const ScatteringSolution& solution() const { return sol_; }
  double center() const { return sol_.center(); }

  FieldPoint ref_state(double x) const;  // Psi_ref on the whole line
  FieldPoint tr_state(double x) const;   // Psi_tr = Psi_full - Psi_ref

  /// psi_ref: Psi_ref for x <= x_c, 0 beyond. The slope at x_c is the left limit.
  FieldPoint masked_ref(double x) const;
  /// psi_tr: Psi_tr for x <= x_c, Psi_full beyond.
  FieldPoint masked_tr(double x) const;

  /// Psi_full, psi_tr and psi_ref at x from a single pair of field evaluations.
  struct Sample {
    cplx full;
    cplx tr;
    cplx ref;
  };
  Sample sample(double x) const;

 private:
  friend Decomposition make_branch(const BarrierSpec&, const ScatteringSolution&, cplx, Branch, bool);
  ScatteringSolution sol_;
  double mirror_sign_ = -1.0;
};

/// Builds Psi_ref for both candidates by propagating the left asymptotic form
/// a_ref_in exp(ikx) + A_R exp(-ikx) through the segments up to x_c, keeps the
/// one vanishing at x_c and checks that the other does not.
Decomposition select_odd_branch(const BarrierSpec& barrier, const ScatteringSolution& sol,
                                const CandidatePair& cands);

/// The rejected (even) branch, for comparison output only.
Decomposition select_even_branch(const BarrierSpec& barrier, const ScatteringSolution& sol,
                                 const CandidatePair& cands);

/// candidates + select_odd_branch.
Decomposition decompose(const BarrierSpec& barrier, const ScatteringSolution& sol);

/// Masked sub-state samples on a grid that extends past [a, b] on both sides.
struct MaskedSubstates {
  std::vector<double> xs;
  std::vector<cplx> full;
  std::vector<cplx> tr;
  std::vector<cplx> ref;
};

/// Samples psi_tr, psi_ref and Psi_full and verifies the sub-state
/// invariants (sum identity, support, continuity at x_c, constant currents).
MaskedSubstates masked_substates(const Decomposition& dec, std::span<const double> xs);

}  // namespace subscat
