#pragma once

#include <array>
#include <vector>

#include "greenxva/model.hpp"

namespace greenxva::domain3d {

using Vec3 = std::array<double, 3>;

// Angular chart of the positive octant of three correlated drivers after
// decorrelation. In spherical coordinates alpha = r sin(theta) sin(phi),
// beta = r sin(theta) cos(phi), gamma = r cos(theta), the domain is
// 0 <= phi <= varpi, 0 <= theta <= Theta(phi). The faces are
//   phi = 0         : x = 0 (protection seller default)
//   phi = varpi     : y = 0 (reference name default)
//   theta = Theta() : z = 0 (protection buyer default)
// and theta = 0 is the edge where x = y = 0. Mesh vertices stay at
// theta >= pole_clamp.
struct DomainSpec {
    model::CorrelationTriple rho;
    double chi = 1.0;
    double rho_bar_xy = 1.0;
    double rho_bar_xz = 1.0;
    double rho_bar_yz = 1.0;
    double varpi = 0.0;
    double pole_clamp = 1e-3;
    // Edge directions of the cone: e1 on y = z = 0, e2 on x = z = 0, e3 on x = y = 0.
    Vec3 e1{}, e2{}, e3{};
    // Unit normals of the faces x = 0, y = 0, z = 0, pointing into the domain.
    Vec3 n_x{}, n_y{}, n_z{};
    // Polyline of the curved face, uniform in phi.
    std::vector<double> curve_theta;
};

[[nodiscard]] DomainSpec build_domain(const model::CorrelationTriple& rho,
                                      double pole_clamp = 1e-3);

// (x, y, z) -> (alpha, beta, gamma) and back.
[[nodiscard]] Vec3 to_whitened(const DomainSpec& d, const Vec3& xyz);
[[nodiscard]] Vec3 from_whitened(const DomainSpec& d, const Vec3& abg);

struct Spherical {
    double r = 0.0;
    double phi = 0.0;
    double theta = 0.0;
};

[[nodiscard]] Spherical to_spherical(const DomainSpec& d, const Vec3& xyz);
[[nodiscard]] Vec3 from_spherical(const DomainSpec& d, const Spherical& s);

// Curved face parametrised by omega in [0, inf): X(omega) ~ omega rho_bar_yz e1 + rho_bar_xz e2.
[[nodiscard]] double boundary_phi(const DomainSpec& d, double omega);
[[nodiscard]] double boundary_theta(const DomainSpec& d, double omega);
[[nodiscard]] std::array<double, 2> boundary_curve(const DomainSpec& d, double omega);
// Inverse of boundary_phi; +inf at phi = varpi.
[[nodiscard]] double omega_of_phi(const DomainSpec& d, double phi);
// Theta(phi), the polar angle of the curved face.
[[nodiscard]] double theta_max(const DomainSpec& d, double phi);

// Distance to the boundary of the meshed chart region
// {0 <= phi <= varpi, pole_clamp <= theta <= Theta(phi)}; negative inside.
[[nodiscard]] double signed_distance(const DomainSpec& d, double phi, double theta);

// Nearest boundary point of the meshed chart region; points on the curved
// face are returned exactly on it.
[[nodiscard]] std::array<double, 2> project_to_boundary(const DomainSpec& d, double phi,
                                                        double theta);

// int_0^varpi (Theta(phi) - pole_clamp) dphi
[[nodiscard]] double chart_area(const DomainSpec& d);

}  // namespace greenxva::domain3d
