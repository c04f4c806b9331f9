#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pnred/nijenhuis.hpp"
#include "pnred/numeric.hpp"

namespace pnred {

// Vector bundle epimorphism (Pi, pi): source -> target. base_map[j] is the
// j-th target base coordinate written in source coordinates; fiber_map is
// (target rank) x (source rank) over source coordinates. Extra rewriting
// atoms may be listed in basic_substitutions (target expression -> source
// expression, both single terms).
struct EpimorphismSpec {
  std::string name;
  LieAlgebroid source;
  LieAlgebroid target;
  std::vector<Expr> base_map;
  Matrix<Expr> fiber_map;
  std::map<std::string, Expr> basic_substitutions;
};

void validate_epimorphism(const EpimorphismSpec& E);

// Rewrites a source function as a function of the target coordinates, or
// returns nullopt when some term is not a product of powers of the atoms.
std::optional<Expr> rewrite_basic(const EpimorphismSpec& E, const Expr& source_expr);
// Target expression composed with pi.
Expr pull_back_function(const EpimorphismSpec& E, const Expr& target_expr);

// T pi o rho_A == (rho_target o pi) Pi, symbolically.
Verdict anchor_compatibility(const EpimorphismSpec& E);

struct KernelFrame {
  std::vector<Section> sections;  // exact frame of Ker Pi
  std::vector<Section> projectable;  // X_a with Pi X_a = e~_a o pi
  bool projectable_exact = true;  // false when (Pi Pi^T)^{-1} left the class
};
KernelFrame kernel_frame(const EpimorphismSpec& E);

// rho_A(Ker Pi) == V pi at the given source points.
struct HypothesisReport {
  bool ok = true;
  bool ill_conditioned = false;
  std::string witness;
};
HypothesisReport vertical_hypothesis(const EpimorphismSpec& E, const std::vector<std::vector<double>>& points);

Verdict projectable_section_check(const EpimorphismSpec& E, const Section& X);
Verdict projectable_form_check(const EpimorphismSpec& E, const Covector& alpha);
Verdict projectable_bivector_check(const EpimorphismSpec& E, const Bivector& P);
Verdict projectable_endo_check(const EpimorphismSpec& E, const Endomorphism& N);

// Throws ProjectionError naming the component that is not pi-basic.
class ProjectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
Bivector project_bivector(const EpimorphismSpec& E, const Bivector& P);
Endomorphism project_endo(const EpimorphismSpec& E, const Endomorphism& N);
Section project_section(const EpimorphismSpec& E, const Section& X);

// The leaf L of D = rho(P# A*) through which we restrict. With full_rank the
// leaf is the whole base and A_L = A. Otherwise leaf_vars parametrize L,
// embedding gives every source base coordinate in leaf coordinates, and the
// covectors alpha_a are chosen so that P# alpha_a o iota is a frame of A_L.
struct LeafSpec {
  bool full_rank = false;
  std::vector<std::string> leaf_vars;
  std::vector<Expr> embedding;
  std::vector<Covector> generators;
  std::vector<std::vector<double>> sample_points;  // in leaf coordinates
};

class HypothesisViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LeafRestriction {
  LieAlgebroid algebroid;
  TwoForm omega;
  Endomorphism nijenhuis;
  Matrix<Expr> inclusion;  // I, source rank x leaf rank, over leaf coordinates
  Verdict omega_flat_identity;  // Omega_L^flat(X_L) == -I^* alpha
  Verdict pullback_identity;  // P_L(I^* alpha, I^* beta) == P(alpha, beta) o iota
  SymplecticCheck symplectic;
  PNVerdict pn;
};
LeafRestriction restrict_to_leaf(const LieAlgebroid& A, const Bivector& P, const Endomorphism& N,
                                 const LeafSpec& leaf);

struct CharacteristicRank {
  std::vector<double> point;
  int rank_d = 0;       // rank rho o P#
  int rank_base = 0;    // rank of the induced base bivector
  bool ill_conditioned = false;
};
std::vector<CharacteristicRank> characteristic_rank(const LieAlgebroid& A, const Bivector& P,
                                                    const std::vector<std::vector<double>>& points);

struct PointReport {
  std::vector<double> point;
  std::vector<int> ranks;  // rank N^l, l = 0..r
  int riesz_index = 0;
  int kernel_dim = 0;
  int image_dim = 0;
  Eigen::MatrixXd kernel_basis;
  Eigen::MatrixXd image_basis;
  bool direct_sum = false;
  bool ill_conditioned = false;
  double tolerance = 0.0;
};
PointReport riesz_report_at(const LieAlgebroid& A, const Endomorphism& N, const std::vector<double>& x,
                            double tol = default_tolerance());
std::vector<PointReport> riesz_report(const LieAlgebroid& A, const Endomorphism& N,
                                      const std::vector<std::vector<double>>& points,
                                      double tol = default_tolerance());

struct SubalgebroidCheck {
  Verdict torsion_hypothesis;
  Verdict constant_dimension;  // dim ker N^k equal at all sample points
  Verdict kernel_closed;
  Verdict image_closed;
  bool symbolic = true;  // false when a closed-form frame was unavailable
  std::vector<Section> kernel_frame;
  std::vector<Section> image_frame;
};
SubalgebroidCheck kernel_subalgebroid_check(const LieAlgebroid& A, const Endomorphism& N, int k,
                                            const std::vector<std::vector<double>>& points);

struct FBCheck {
  Verdict consistent;  // "consistent with condition F^B", never a proof
  std::vector<std::string> notes;
  bool ill_conditioned = false;
};
FBCheck condition_fb_check(const LieAlgebroid& A, const Endomorphism& N, int k,
                           const std::vector<std::vector<double>>& points, unsigned seed = 1);

struct FiberwiseReduction {
  std::vector<double> point;
  int riesz_index = 0;
  int quotient_dim = 0;
  bool n_invertible = false;        // N_x itself
  bool reduced_n_invertible = false;
  bool reduced_p_nondegenerate = false;
  bool ill_conditioned = false;
  Eigen::MatrixXd reduced_n;
  Eigen::MatrixXd reduced_p;
  std::string witness;
  bool ok() const { return reduced_n_invertible && reduced_p_nondegenerate && !ill_conditioned; }
};
FiberwiseReduction fiberwise_reduce_at(const LieAlgebroid& A, const Bivector& P, const Endomorphism& N,
                                       const std::vector<double>& x, double tol = default_tolerance());
std::vector<FiberwiseReduction> fiberwise_reduce(const LieAlgebroid& A, const Bivector& P, const Endomorphism& N,
                                                 const std::vector<std::vector<double>>& points,
                                                 double tol = default_tolerance());

}  // namespace pnred
