#pragma once

#include "vem/error.hpp"
#include "vem/geometry.hpp"

namespace vem {

/// Isotropic plate material. The shear modulus lambda = E k / (2 (1 + nu)) is
/// always the physical one; no normalization of lambda is applied anywhere.
struct MaterialParams {
  double young = 1.0;        // E
  double poisson = 0.0;      // nu
  double shear_factor = 5.0 / 6.0;  // k
  double thickness = 0.1;    // t

  MaterialParams() = default;
  MaterialParams(double E, double nu, double k, double t)
      : young(E), poisson(nu), shear_factor(k), thickness(t) {
    validate();
  }

  void validate() const {
    VEM_REQUIRE(young > 0, "material: E must be positive, got ", young);
    VEM_REQUIRE(poisson > -1.0 && poisson < 0.5, "material: nu out of (-1, 0.5), got ", poisson);
    VEM_REQUIRE(shear_factor > 0, "material: shear correction factor must be positive");
    VEM_REQUIRE(thickness > 0 && thickness <= 1.0, "material: thickness out of (0, 1], got ",
                thickness);
  }

  double lambda() const { return young * shear_factor / (2.0 * (1.0 + poisson)); }
};

/// Tensor of bending moduli: C s = E/(12(1-nu^2)) ((1-nu) s + nu tr(s) I).
struct BendingTensor {
  double scale;   // E / (12 (1 - nu^2))
  double poisson;

  explicit BendingTensor(const MaterialParams& m)
      : scale(m.young / (12.0 * (1.0 - m.poisson * m.poisson))), poisson(m.poisson) {}

  SymMat2 apply(const SymMat2& s) const {
    const double tr = s.trace();
    return {scale * ((1.0 - poisson) * s.xx + poisson * tr),
            scale * ((1.0 - poisson) * s.yy + poisson * tr),
            scale * (1.0 - poisson) * s.xy};
  }

  /// (C a) : b
  double contract(const SymMat2& a, const SymMat2& b) const {
    return scale * ((1.0 - poisson) * a.contract(b) + poisson * a.trace() * b.trace());
  }
};

}  // namespace vem
