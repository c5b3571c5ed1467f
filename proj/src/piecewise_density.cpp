#include "gpm/piecewise_density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gpm {

namespace {
constexpr double kNormTol = 1e-9;
constexpr double kRatioSlack = 1e-9;
}  // namespace

PiecewiseDensity::PiecewiseDensity(std::vector<Piece> pieces, Interval domain,
                                   std::optional<double> epsilon)
    : domain_(domain), epsilon_(epsilon) {
  if (pieces.empty()) throw std::invalid_argument("density needs pieces");
  if (!(domain.lo < domain.hi)) throw std::invalid_argument("bad domain");

  const double scale = std::max(1.0, domain.width());
  const double edge_tol = 1e-9 * scale;

  // Tiling: pieces must chain from lo to hi; small numeric drift is snapped
  // to exact chaining so downstream arithmetic can rely on it.
  if (std::abs(pieces.front().left - domain.lo) > edge_tol ||
      std::abs(pieces.back().right - domain.hi) > edge_tol)
    throw std::invalid_argument("pieces do not span the domain");
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    if (std::abs(pieces[i].right - pieces[i + 1].left) > edge_tol)
      throw std::invalid_argument("pieces are not contiguous");
  }
  pieces.front().left = domain.lo;
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i)
    pieces[i + 1].left = pieces[i].right;
  pieces.back().right = domain.hi;

  // Canonicalization: drop degenerate pieces, reject negative densities.
  const double width_floor = 1e-12 * scale;
  for (const Piece& p : pieces) {
    if (p.density < -1e-12) throw std::invalid_argument("negative density");
    if (p.width() < -width_floor) throw std::invalid_argument("piece with right < left");
  }
  pieces_.reserve(pieces.size());
  for (Piece p : pieces) {
    p.density = std::max(p.density, 0.0);
    if (p.width() <= width_floor) continue;
    if (!pieces_.empty()) p.left = pieces_.back().right;
    pieces_.push_back(p);
  }
  if (pieces_.empty()) throw std::invalid_argument("density has no width");
  pieces_.front().left = domain.lo;
  pieces_.back().right = domain.hi;

  cum_.resize(pieces_.size() + 1, 0.0);
  for (std::size_t i = 0; i < pieces_.size(); ++i)
    cum_[i + 1] = cum_[i] + pieces_[i].mass();

  if (std::abs(cum_.back() - 1.0) > kNormTol)
    throw std::invalid_argument("density mass differs from 1");

  if (epsilon_) {
    if (*epsilon_ < 0.0) throw std::invalid_argument("negative epsilon tag");
    const double hi = max_density();
    const double lo = min_positive_density();
    if (lo > 0.0 && hi / lo > std::exp(*epsilon_) * (1.0 + kRatioSlack))
      throw std::invalid_argument("density ratio exceeds exp(epsilon)");
  }
}

double PiecewiseDensity::density_at(double y) const {
  if (!domain_.contains(y)) throw std::domain_error("density_at: y outside domain");
  // first piece with right > y; the domain's right endpoint maps to the
  // last piece
  auto it = std::upper_bound(
      pieces_.begin(), pieces_.end(), y,
      [](double v, const Piece& p) { return v < p.right; });
  if (it == pieces_.end()) --it;
  return it->density;
}

double PiecewiseDensity::cdf(double y) const {
  if (y <= domain_.lo) return 0.0;
  if (y >= domain_.hi) return cum_.back();
  auto it = std::upper_bound(
      pieces_.begin(), pieces_.end(), y,
      [](double v, const Piece& p) { return v < p.right; });
  const std::size_t i = static_cast<std::size_t>(it - pieces_.begin());
  return cum_[i] + pieces_[i].density * (y - pieces_[i].left);
}

double PiecewiseDensity::sample(double u) const {
  if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("u must be in [0,1)");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (u < cum_[i + 1]) {
      // pieces with zero mass cannot satisfy u < cum_[i+1] given u >= cum_[i]
      return pieces_[i].left + (u - cum_[i]) / pieces_[i].density;
    }
  }
  // u fell in the (<= 1e-9) normalization slack past the last piece
  for (std::size_t i = pieces_.size(); i-- > 0;)
    if (pieces_[i].density > 0.0) return pieces_[i].right;
  return domain_.hi;
}

double PiecewiseDensity::max_density() const {
  double m = 0.0;
  for (const Piece& p : pieces_) m = std::max(m, p.density);
  return m;
}

double PiecewiseDensity::min_positive_density() const {
  double m = 0.0;
  for (const Piece& p : pieces_)
    if (p.density > 0.0 && (m == 0.0 || p.density < m)) m = p.density;
  return m;
}

double PiecewiseDensity::total_mass() const { return cum_.back(); }

double PiecewiseDensity::mean() const {
  double m = 0.0;
  for (const Piece& p : pieces_)
    m += p.density * (p.right * p.right - p.left * p.left) / 2.0;
  return m;
}

double expected_error(const PiecewiseDensity& pdf, const ErrorMetric& metric,
                      double x) {
  if (!pdf.domain().contains(x))
    throw std::domain_error("expected_error: x outside domain");
  double err = 0.0;
  for (const Piece& p : pdf.pieces())
    err += p.density * loss_integral(metric, pdf.domain(), p.left, p.right, x);
  return err;
}

}  // namespace gpm
