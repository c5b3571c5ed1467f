#include "gpm/transform.hpp"

#include <stdexcept>

namespace gpm {

Transform Transform::between(const Interval& from, const Interval& to) {
  const double c = to.width() / from.width();
  return Transform{c, to.lo - c * from.lo};
}

PiecewiseDensity apply_transform(const PiecewiseDensity& pdf,
                                 const Transform& t) {
  if (!(t.scale > 0.0)) throw std::invalid_argument("transform scale must be > 0");
  if (pdf.domain().circular())
    throw std::invalid_argument("apply_transform: classical domains only");

  std::vector<Piece> pieces;
  pieces.reserve(pdf.pieces().size());
  for (const Piece& p : pdf.pieces())
    pieces.push_back(Piece{p.density / t.scale, t(p.left), t(p.right)});
  const Interval domain =
      Interval::classical(t(pdf.domain().lo), t(pdf.domain().hi));
  return PiecewiseDensity(std::move(pieces), domain, pdf.epsilon());
}

}  // namespace gpm
