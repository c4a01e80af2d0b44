#include "strainreal/fields.hpp"

namespace strainreal {

namespace {

Expr dx(const Expr& f) { return differentiate(f, Var::X); }
Expr dy(const Expr& f) { return differentiate(f, Var::Y); }

}  // namespace

VelocityField stream_to_velocity(const Expr& u) { return {-dy(u), dx(u), std::nullopt, false}; }

StrainField strain_of(const VelocityField& U) {
  return {dx(U.ux), Expr(0.5) * (dx(U.uy) + dy(U.ux))};
}

Vec2Expr gradient(const Expr& f) { return {dx(f), dy(f)}; }

Expr curl(const Vec2Expr& U) { return dx(U.y) - dy(U.x); }

Expr curl(const VelocityField& U) { return curl(Vec2Expr{U.ux, U.uy}); }

Expr divergence(const VelocityField& U) { return dx(U.ux) + dy(U.uy); }

Vec2Expr div(const Mat2Expr& S) { return {dx(S.xx) + dy(S.yx), dx(S.xy) + dy(S.yy)}; }

Expr laplacian(const Expr& f) {
  return differentiate(f, Var::X, 2) + differentiate(f, Var::Y, 2);
}

Vec2Expr laplacian(const Vec2Expr& U) { return {laplacian(U.x), laplacian(U.y)}; }

Expr curl_div(const Expr& mu, const StrainField& e) {
  const Expr s12 = mu * e.e12;
  const Expr s11 = mu * e.e11;
  return differentiate(s12, Var::X, 2) - differentiate(s12, Var::Y, 2) -
         Expr(2.0) * dx(dy(s11));
}

}  // namespace strainreal
