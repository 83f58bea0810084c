#include "ldhom/source.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ldhom {

SourceSpec::SourceSpec(std::vector<SourcePiece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw std::invalid_argument("source: no pieces");
  std::sort(pieces_.begin(), pieces_.end(), [](const SourcePiece& a, const SourcePiece& b) { return a.lo < b.lo; });
  constexpr double tol = 1e-12;
  if (std::abs(pieces_.front().lo) > tol || std::abs(pieces_.back().hi - 1.0) > tol)
    throw std::invalid_argument("source: pieces must cover [0, 1]");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    if (!(p.hi > p.lo) || !std::isfinite(p.value)) throw std::invalid_argument("source: degenerate piece");
    if (i > 0 && std::abs(pieces_[i - 1].hi - p.lo) > tol)
      throw std::invalid_argument("source: pieces overlap or leave a gap");
  }
  pieces_.front().lo = 0.0;
  pieces_.back().hi = 1.0;
  prefix_.resize(pieces_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    prefix_[i] = acc;
    acc += pieces_[i].value * (pieces_[i].hi - pieces_[i].lo);
  }
}

SourceSpec SourceSpec::indicator(double lo, double hi, double value) {
  std::vector<SourcePiece> pieces;
  if (lo > 0.0) pieces.push_back({0.0, lo, 0.0});
  pieces.push_back({lo, hi, value});
  if (hi < 1.0) pieces.push_back({hi, 1.0, 0.0});
  return SourceSpec(std::move(pieces));
}

double SourceSpec::f(double s) const {
  for (const auto& p : pieces_)
    if (s < p.hi) return p.value;
  return pieces_.back().value;
}

double SourceSpec::antiderivative(double s) const {
  s = std::clamp(s, 0.0, 1.0);
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    if (s <= p.hi || i + 1 == pieces_.size()) return prefix_[i] + p.value * (s - p.lo);
  }
  return 0.0;
}

double SourceSpec::integral_antiderivative(double a, double b) const {
  if (b <= a) return 0.0;
  double total = 0.0;
  double left = a;
  for (const auto& p : pieces_) {
    if (p.hi <= left) continue;
    const double right = std::min(b, p.hi);
    total += 0.5 * (right - left) * (antiderivative(left) + antiderivative(right));
    left = right;
    if (left >= b) break;
  }
  return total;
}

std::vector<double> SourceSpec::breakpoints() const {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) out.push_back(pieces_[i].hi);
  return out;
}

double SourceSpec::l2_norm() const {
  double acc = 0.0;
  for (const auto& p : pieces_) acc += p.value * p.value * (p.hi - p.lo);
  return std::sqrt(acc);
}

bool SourceSpec::is_zero() const {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const SourcePiece& p) { return p.value == 0.0; });
}

}  // namespace ldhom
