#pragma once

#include <vector>

namespace ldhom {

struct SourcePiece {
  double lo = 0.0;
  double hi = 1.0;
  double value = 0.0;
};

/// Piecewise-constant right-hand side f on [0, 1] with its antiderivative
/// F(s) = int_0^s f, which is continuous and piecewise linear.
class SourceSpec {
 public:
  SourceSpec() : SourceSpec(std::vector<SourcePiece>{{0.0, 1.0, 0.0}}) {}
  /// Pieces must partition [0, 1]; throws std::invalid_argument otherwise.
  explicit SourceSpec(std::vector<SourcePiece> pieces);

  /// f = 1 on [0.45, 0.55), zero elsewhere.
  static SourceSpec indicator(double lo = 0.45, double hi = 0.55, double value = 1.0);

  double f(double s) const;
  double antiderivative(double s) const;
  double operator()(double s) const { return antiderivative(s); }

  /// Exact int_a^b F(s) ds.
  double integral_antiderivative(double a, double b) const;

  /// Interior breakpoints of f (kinks of F), excluding 0 and 1.
  std::vector<double> breakpoints() const;
  const std::vector<SourcePiece>& pieces() const { return pieces_; }

  double l2_norm() const;
  bool is_zero() const;

 private:
  std::vector<SourcePiece> pieces_;
  std::vector<double> prefix_;  // F at the left end of each piece
};

}  // namespace ldhom
