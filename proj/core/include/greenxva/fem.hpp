#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "greenxva/linalg.hpp"
#include "greenxva/mesh.hpp"

namespace greenxva::fem {

// Element quadrature for the sin(theta) weights: one point at the centroid,
// or the three edge midpoints.
enum class Rule { Centroid, EdgeMidpoint };

struct AssemblyOptions {
    Rule rule = Rule::Centroid;
    // Replace both sin(theta) weights by 1 (plain Laplacian, unit mass).
    bool unit_weight = false;
};

// Phi_i(phi, theta) = a_i + b_i phi + c_i theta on one triangle.
struct P1Triangle {
    std::array<int, 3> v{};
    std::array<double, 3> a{}, b{}, c{};
    double area = 0.0;
    mesh::Point2 centroid{};
};

[[nodiscard]] P1Triangle p1_triangle(const mesh::SurfaceMesh& m, std::size_t t);

// K, M over free vertices; load_i = int sin(theta) Phi_i.
struct System {
    linalg::Matrix stiffness;
    linalg::Matrix mass;
    std::vector<double> load;
};

[[nodiscard]] System assemble(const mesh::SurfaceMesh& m, const AssemblyOptions& opt = {});

struct EigenBasis {
    std::shared_ptr<const mesh::SurfaceMesh> mesh;
    std::vector<P1Triangle> elements;
    std::vector<double> values;                // Lambda^2, ascending
    std::vector<std::vector<double>> vectors;  // per free vertex
    std::vector<double> sin_integrals;         // int Psi_n sin(theta)
    std::vector<double> nodal;                 // vertex-major, zero on the boundary

    [[nodiscard]] int count() const { return static_cast<int>(values.size()); }
    [[nodiscard]] double nodal_value(int n, int vertex) const {
        return nodal[static_cast<std::size_t>(vertex) * values.size() + static_cast<std::size_t>(n)];
    }

    // Uniform bucket grid over the chart for point location.
    double grid_phi0 = 0.0, grid_theta0 = 0.0, grid_dphi = 1.0, grid_dtheta = 1.0;
    int grid_nphi = 0, grid_ntheta = 0;
    std::vector<std::vector<int>> buckets;
};

// Generalized eigenproblem K Psi = Lambda^2 M Psi, `count` smallest pairs,
// sign fixed so that int Psi sin(theta) >= 0.
[[nodiscard]] EigenBasis compute_basis(mesh::SurfaceMesh m, int count,
                                       const AssemblyOptions& opt = {});

// Rebuild the derived fields (elements, nodal table, locator) after the mesh,
// values and vectors are set.
void finalize_basis(EigenBasis& b);

// Containing triangle or -1.
[[nodiscard]] int locate(const EigenBasis& b, double phi, double theta);

// Psi_n at (phi, theta). Points inside the domain but off the mesh (between
// a boundary chord and the curved face, or below the pole clamp) return 0.
// Throws DomainError outside the domain.
[[nodiscard]] double eval_basis(const EigenBasis& b, const domain3d::DomainSpec& d, int n,
                                double phi, double theta);
// All modes at once into out[0..count).
void eval_all(const EigenBasis& b, const domain3d::DomainSpec& d, double phi, double theta,
              std::span<double> out);

// Constant (d/dphi, d/dtheta) of Psi_n on triangle t.
[[nodiscard]] std::array<double, 2> eval_basis_gradient(const EigenBasis& b, int n, int t);

// Cache files keyed by the inputs that determine the basis.
[[nodiscard]] std::string cache_key(const model::CorrelationTriple& rho, int n_points,
                                    std::uint64_t seed, Rule rule, int count);
[[nodiscard]] std::string cache_file_name(const std::string& key);
void save_basis(const EigenBasis& b, const std::string& path, const std::string& key);
// Empty when the file is missing or was written for another key.
[[nodiscard]] std::optional<EigenBasis> load_basis(const std::string& path, const std::string& key);

}  // namespace greenxva::fem
