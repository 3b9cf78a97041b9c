#include "greenxva/cds3d.hpp"

#include <algorithm>
#include <array>
#include <numbers>
#include <cmath>
#include <map>
#include <utility>

#include "greenxva/error.hpp"
#include "greenxva/quadrature.hpp"
#include "greenxva/specfun.hpp"

namespace greenxva::cds3d {

namespace {

constexpr double kFaceTol = 1e-12;

struct BoundaryEdge {
    int a = 0;
    int b = 0;
    int triangle = 0;
};

// Boundary edges of the mesh grouped by the face they lie on.
std::map<Face, std::vector<BoundaryEdge>> boundary_edges(const fem::EigenBasis& basis,
                                                         const domain3d::DomainSpec& d) {
    const auto& m = *basis.mesh;
    std::map<std::pair<int, int>, std::pair<int, int>> count;  // edge -> (uses, triangle)
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tri = m.triangles[t];
        for (std::size_t k = 0; k < 3; ++k) {
            int a = tri[k], b = tri[(k + 1) % 3];
            if (a > b) std::swap(a, b);
            auto& c = count[{a, b}];
            ++c.first;
            c.second = static_cast<int>(t);
        }
    }
    std::map<Face, std::vector<BoundaryEdge>> out;
    for (const auto& [e, c] : count) {
        if (c.first != 1) continue;
        const auto& pa = m.vertices[static_cast<std::size_t>(e.first)];
        const auto& pb = m.vertices[static_cast<std::size_t>(e.second)];
        BoundaryEdge be{e.first, e.second, c.second};
        if (std::abs(pa[0]) < kFaceTol && std::abs(pb[0]) < kFaceTol) {
            out[Face::Seller].push_back(be);
        } else if (std::abs(pa[0] - d.varpi) < kFaceTol && std::abs(pb[0] - d.varpi) < kFaceTol) {
            out[Face::Reference].push_back(be);
        } else if (std::abs(pa[1] - d.pole_clamp) < kFaceTol && std::abs(pb[1] - d.pole_clamp) < kFaceTol) {
            continue;  // pole clamp line
        } else {
            out[Face::Buyer].push_back(be);
        }
    }
    return out;
}

std::vector<double> gradient_component(const Green3d& g, int triangle, int component) {
    std::vector<double> out(static_cast<std::size_t>(g.terms()));
    for (int n = 0; n < g.terms(); ++n) {
        out[static_cast<std::size_t>(n)] = fem::eval_basis_gradient(g.basis(), n, triangle)[static_cast<std::size_t>(component)];
    }
    return out;
}

// Inward conormal flux of each mode at the boundary vertices, from the
// weak-form residual of the centroid-rule system. Vertex-major.
std::vector<double> residual_flux(const Green3d& g) {
    const auto& b = g.basis();
    const auto& m = *b.mesh;
    const auto terms = static_cast<std::size_t>(g.terms());
    std::vector<double> out(m.vertices.size() * terms, 0.0);
    for (const auto& e : b.elements) {
        const double st = std::sin(e.centroid[1]);
        for (std::size_t i = 0; i < 3; ++i) {
            const auto vi = static_cast<std::size_t>(e.v[i]);
            if (!m.boundary[vi]) continue;
            for (std::size_t j = 0; j < 3; ++j) {
                const auto vj = e.v[j];
                if (m.boundary[static_cast<std::size_t>(vj)]) continue;
                const double k = e.area * ((e.b[i] * e.b[j]) / st + st * (e.c[i] * e.c[j]));
                const double mass = e.area * st / 12.0;
                for (std::size_t n = 0; n < terms; ++n) {
                    out[vi * terms + n] -= (k - b.values[n] * mass) * b.nodal_value(static_cast<int>(n), vj);
                }
            }
        }
    }
    return out;
}

// Piecewise-linear flux along one face: nodes sorted by the face parameter,
// zero at the two corners, L2 projection of the nodal residuals.
struct FaceProfile {
    std::vector<double> s;
    std::vector<std::vector<double>> flux;  // per node, per mode
};

FaceProfile face_profile(const Green3d& g, const std::vector<BoundaryEdge>& edges, int param,
                         const std::vector<double>& residual) {
    const auto& m = *g.basis().mesh;
    const auto terms = static_cast<std::size_t>(g.terms());
    std::vector<int> nodes;
    for (const auto& e : edges) {
        nodes.push_back(e.a);
        nodes.push_back(e.b);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    const auto coord = [&](int v) { return m.vertices[static_cast<std::size_t>(v)][static_cast<std::size_t>(param)]; };
    std::sort(nodes.begin(), nodes.end(), [&](int a, int b) { return coord(a) < coord(b); });

    FaceProfile p;
    const std::size_t n = nodes.size();
    for (int v : nodes) p.s.push_back(coord(v));
    p.flux.assign(n, std::vector<double>(terms, 0.0));
    if (n < 3) return p;

    // Thomas elimination on the interior nodes, all modes at once.
    const std::size_t k = n - 2;
    std::vector<double> diag(k), upper(k), lower(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double hl = p.s[i + 1] - p.s[i];
        const double hr = p.s[i + 2] - p.s[i + 1];
        lower[i] = hl / 6.0;
        diag[i] = (hl + hr) / 3.0;
        upper[i] = hr / 6.0;
    }
    std::vector<std::vector<double>> rhs(k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto v = static_cast<std::size_t>(nodes[i + 1]);
        rhs[i].assign(residual.begin() + static_cast<std::ptrdiff_t>(v * terms),
                      residual.begin() + static_cast<std::ptrdiff_t>((v + 1) * terms));
    }
    for (std::size_t i = 1; i < k; ++i) {
        const double f = lower[i] / diag[i - 1];
        diag[i] -= f * upper[i - 1];
        for (std::size_t t = 0; t < terms; ++t) rhs[i][t] -= f * rhs[i - 1][t];
    }
    for (std::size_t i = k; i-- > 0;) {
        for (std::size_t t = 0; t < terms; ++t) {
            const double next = i + 1 < k ? p.flux[i + 2][t] : 0.0;
            p.flux[i + 1][t] = (rhs[i][t] - upper[i] * next) / diag[i];
        }
    }
    return p;
}

// Samples of a face profile at nodes_per_edge Gauss points per edge.
template <class Make>
void sample_profile(const FaceProfile& p, int nodes_per_edge, std::vector<FaceSample>& out, Make make) {
    for (std::size_t i = 0; i + 1 < p.s.size(); ++i) {
        const double lo = p.s[i], hi = p.s[i + 1];
        if (!(hi > lo)) continue;
        const auto rule = quad::gauss_legendre(nodes_per_edge, lo, hi);
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double u = (rule.nodes[k] - lo) / (hi - lo);
            FaceSample s = make(rule.nodes[k]);
            s.weight = rule.weights[k];
            s.flux.resize(p.flux[i].size());
            for (std::size_t n = 0; n < s.flux.size(); ++n) s.flux[n] = (1.0 - u) * p.flux[i][n] + u * p.flux[i + 1][n];
            out.push_back(std::move(s));
        }
    }
}

// Cartesian distance of the source from the face plane.
double face_distance(const Green3d& g, Face face) {
    const auto xyz = domain3d::from_spherical(g.domain(), g.source());
    switch (face) {
        case Face::Seller: return xyz[0];
        case Face::Reference: return xyz[1];
        case Face::Buyer: return xyz[2];
    }
    return 0.0;
}

AdjustmentKernel kernel_from_samples(const model::CdsTerms& terms, const Green3d& g,
                                     const std::vector<const std::vector<FaceSample>*>& sets,
                                     double plane_distance, const Quadrature3d& q) {
    AdjustmentKernel kernel(terms.rate, terms.recovery_rn);
    if (terms.maturity <= 0.0) return kernel;
    const double r0 = g.source().r;
    const double centre = std::sqrt(std::max(r0 * r0 - plane_distance * plane_distance, 0.0));
    const auto& src = g.source();
    const std::array<double, 3> u0{std::sin(src.theta) * std::sin(src.phi), std::sin(src.theta) * std::cos(src.phi),
                                   std::cos(src.theta)};
    std::vector<std::vector<double>> cosines(sets.size());
    for (std::size_t k = 0; k < sets.size(); ++k) {
        for (const auto& s : *sets[k]) {
            cosines[k].push_back(std::sin(s.theta) * std::sin(s.phi) * u0[0] +
                                 std::sin(s.theta) * std::cos(s.phi) * u0[1] + std::cos(s.theta) * u0[2]);
        }
    }
    const double t_min = plane_distance * plane_distance / (2.0 * q.cutoff);
    if (t_min >= terms.maturity) return kernel;
    const auto time_rule = quad::gauss_legendre(q.time_nodes, t_min, terms.maturity);
    std::vector<double> radial;
    std::vector<double> coef(static_cast<std::size_t>(g.terms()));
    for (std::size_t i = 0; i < time_rule.nodes.size(); ++i) {
        const double t = time_rule.nodes[i];
        const double half = q.width * std::sqrt(t);
        const auto rr = quad::gauss_legendre(q.radial_nodes, std::max(0.0, centre - half), centre + half);
        const double df = model::discount(terms.rate, t);
        for (std::size_t j = 0; j < rr.nodes.size(); ++j) {
            const double r = rr.nodes[j];
            g.radial(t, r, radial);
            for (int n = 0; n < g.terms(); ++n) {
                coef[static_cast<std::size_t>(n)] = radial[static_cast<std::size_t>(n)] * g.psi_source(n);
            }
            const double base = 0.5 * df * time_rule.weights[i] * rr.weights[j];
            // Half-space first-passage flux per unit area, times 2 r.
            const double cap = 2.0 * r * plane_distance / (std::pow(2.0 * std::numbers::pi, 1.5) * std::pow(t, 2.5));
            for (std::size_t k = 0; k < sets.size(); ++k) {
                const auto& set = *sets[k];
                for (std::size_t m = 0; m < set.size(); ++m) {
                    const auto& s = set[m];
                    double flux = 0.0;
                    for (std::size_t n = 0; n < coef.size(); ++n) flux += coef[n] * s.flux[n];
                    if (q.clamp && s.arc_scale > 0.0) {
                        const double d2 = r * r + r0 * r0 - 2.0 * r * r0 * cosines[k][m];
                        flux = std::clamp(flux, 0.0, q.clamp_margin * cap * s.arc_scale * std::exp(-d2 / (2.0 * t)));
                    }
                    kernel.add(terms.maturity - t, r * s.payout_scale, base * s.weight * flux);
                }
            }
        }
    }
    return kernel;
}

}  // namespace

Spherical transform_3d(const domain3d::DomainSpec& d, double x, double y, double z) {
    if (!(x > 0.0 && y > 0.0 && z > 0.0)) throw DomainError("transform_3d: drivers must be positive");
    return domain3d::to_spherical(d, {x, y, z});
}

Green3d::Green3d(const domain3d::DomainSpec& d, const fem::EigenBasis& basis, const Spherical& source,
                 int n_terms)
    : d_(&d), basis_(&basis), src_(source) {
    if (n_terms < 1 || n_terms > basis.count()) throw DomainError("Green3d: n_terms exceeds the basis size");
    for (int n = 0; n < n_terms; ++n) nu_.push_back(std::sqrt(basis.values[static_cast<std::size_t>(n)] + 0.25));
    std::vector<double> all(static_cast<std::size_t>(basis.count()));
    fem::eval_all(basis, d, source.phi, source.theta, all);
    psi_src_.assign(all.begin(), all.begin() + n_terms);
}

void Green3d::radial(double tau, double r, std::vector<double>& out) const {
    out.assign(nu_.size(), 0.0);
    const double r0 = src_.r;
    if (r <= 0.0 || r0 <= 0.0) return;
    const double x = r * r0 / tau;
    const double pre = std::exp(-(r - r0) * (r - r0) / (2.0 * tau)) / (tau * std::sqrt(r * r0));
    if (pre == 0.0) return;
    for (std::size_t n = 0; n < nu_.size(); ++n) out[n] = pre * specfun::bessel_i_scaled(nu_[n], x);
}

double Green3d::density(double tau, const Spherical& target, SeriesReport* rep) const {
    if (!(tau > 0.0)) throw DomainError("green_3d: tau must be positive");
    std::vector<double> rad, psi(static_cast<std::size_t>(basis_->count()));
    radial(tau, target.r, rad);
    fem::eval_all(*basis_, *d_, target.phi, target.theta, psi);
    double sum = 0.0, last = 0.0;
    for (std::size_t n = 0; n < nu_.size(); ++n) {
        last = rad[n] * psi_src_[n] * psi[n];
        sum += last;
    }
    if (rep) {
        rep->terms = terms();
        rep->truncated = std::abs(last) > 1e-10 * std::abs(sum) && sum != 0.0;
        rep->raw = sum;
    }
    return sum;
}

double Green3d::survival(double tau, SeriesReport* rep) const {
    if (!(tau > 0.0)) return 1.0;
    const double r0 = src_.r;
    double sum = 0.0, last = 0.0;
    if (r0 > 0.0) {
        const double z = r0 * r0 / (2.0 * tau);
        for (std::size_t n = 0; n < nu_.size(); ++n) {
            const double nu = nu_[n];
            const double log_radial = (0.5 * nu - 0.25) * std::log(z) + specfun::ln_gamma(0.5 * nu + 1.25) -
                                      specfun::ln_gamma(nu + 1.0) +
                                      specfun::log_hyp1f1_neg(0.5 * nu - 0.25, nu + 1.0, -z);
            last = std::exp(log_radial) * psi_src_[n] * basis_->sin_integrals[n];
            sum += last;
        }
    }
    const double clipped = std::clamp(sum, 0.0, 1.0);
    if (rep) {
        rep->terms = terms();
        rep->truncated = std::abs(last) > 1e-10 * std::abs(sum) && sum != 0.0;
        rep->out_of_range = sum < -1e-3 || sum > 1.0 + 1e-3;
        rep->raw = sum;
    }
    return clipped;
}

double green_3d(double tau, const Green3d& g, const Spherical& target, SeriesReport* rep) {
    return g.density(tau, target, rep);
}

double survival_3d(double tau, const Green3d& g, SeriesReport* rep) { return g.survival(tau, rep); }

std::vector<FaceSample> side_face_samples(const Green3d& g, Face face, int nodes_per_edge,
                                          FluxMethod method) {
    if (face == Face::Buyer) throw DomainError("side_face_samples: use buyer_face_samples");
    const auto& d = g.domain();
    const auto& m = *g.basis().mesh;
    std::vector<FaceSample> out;
    const auto edges = boundary_edges(g.basis(), d);
    const auto it = edges.find(face);
    if (it == edges.end()) return out;
    const double phi = face == Face::Seller ? 0.0 : d.varpi;
    const auto make = [&](double theta) {
        FaceSample s;
        s.phi = phi;
        s.theta = theta;
        s.payout_scale = face == Face::Seller ? d.rho_bar_xy * std::sin(theta) : 0.0;
        s.arc_scale = 1.0;
        return s;
    };
    if (method == FluxMethod::Residual) {
        sample_profile(face_profile(g, it->second, 1, residual_flux(g)), nodes_per_edge, out, make);
        return out;
    }
    const double sign = face == Face::Seller ? 1.0 : -1.0;
    for (const auto& e : it->second) {
        const double ta = m.vertices[static_cast<std::size_t>(e.a)][1];
        const double tb = m.vertices[static_cast<std::size_t>(e.b)][1];
        const auto dphi = gradient_component(g, e.triangle, 0);
        const auto rule = quad::gauss_legendre(nodes_per_edge, std::min(ta, tb), std::max(ta, tb));
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            FaceSample s = make(rule.nodes[k]);
            s.weight = rule.weights[k];
            const double st = std::sin(s.theta);
            s.flux.resize(dphi.size());
            for (std::size_t n = 0; n < dphi.size(); ++n) s.flux[n] = sign * dphi[n] / st;
            out.push_back(std::move(s));
        }
    }
    std::sort(out.begin(), out.end(), [](const FaceSample& a, const FaceSample& b) { return a.theta < b.theta; });
    return out;
}

BuyerFaceSamples buyer_face_samples(const Green3d& g, int nodes_per_edge, int omega_nodes,
                                    FluxMethod method) {
    const auto& d = g.domain();
    const auto& m = *g.basis().mesh;
    BuyerFaceSamples out;
    const auto edges = boundary_edges(g.basis(), d);
    const auto it = edges.find(Face::Buyer);
    if (it == edges.end()) return out;
    struct Span {
        double lo, hi;
        std::vector<double> dphi;
    };
    std::vector<Span> spans;
    const auto payout = [&](double phi, double theta) {
        return std::sin(theta) * (d.rho.rho_xy * std::sin(phi) + d.rho_bar_xy * std::cos(phi));
    };
    if (method == FluxMethod::Residual) {
        const auto make = [&](double phi) {
            FaceSample s;
            s.phi = phi;
            s.theta = domain3d::theta_max(d, phi);
            s.payout_scale = payout(s.phi, s.theta);
            const double h = 1e-6;
            const double dtheta =
                (domain3d::theta_max(d, std::min(phi + h, d.varpi)) - domain3d::theta_max(d, std::max(phi - h, 0.0))) /
                (std::min(phi + h, d.varpi) - std::max(phi - h, 0.0));
            s.arc_scale = std::hypot(std::sin(s.theta), dtheta);
            return s;
        };
        sample_profile(face_profile(g, it->second, 0, residual_flux(g)), nodes_per_edge, out.chart, make);
        return out;
    }
    for (const auto& e : it->second) {
        const double pa = m.vertices[static_cast<std::size_t>(e.a)][0];
        const double pb = m.vertices[static_cast<std::size_t>(e.b)][0];
        const auto dphi = gradient_component(g, e.triangle, 0);
        const auto dtheta = gradient_component(g, e.triangle, 1);
        spans.push_back({std::min(pa, pb), std::max(pa, pb), dphi});
        const auto rule = quad::gauss_legendre(nodes_per_edge, std::min(pa, pb), std::max(pa, pb));
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            FaceSample s;
            s.phi = rule.nodes[k];
            s.theta = domain3d::theta_max(d, s.phi);
            s.weight = rule.weights[k];
            s.payout_scale = payout(s.phi, s.theta);
            const double st = std::sin(s.theta);
            s.flux.resize(dtheta.size());
            for (std::size_t n = 0; n < dtheta.size(); ++n) s.flux[n] = -st * dtheta[n];
            out.chart.push_back(std::move(s));
        }
    }
    std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) { return a.lo < b.lo; });
    std::sort(out.chart.begin(), out.chart.end(), [](const FaceSample& a, const FaceSample& b) { return a.phi < b.phi; });

    // omega = u / (1 - u) on [0, 1).
    const auto rule = quad::gauss_legendre(omega_nodes, 0.0, 1.0);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double u = rule.nodes[k];
        const double w = u / (1.0 - u);
        const double jac = 1.0 / ((1.0 - u) * (1.0 - u));
        const double h = 1e-5 * std::max(1.0, w);
        const double lo = std::max(0.0, w - h);
        const double theta_w = (domain3d::boundary_theta(d, w + h) - domain3d::boundary_theta(d, lo)) / (w + h - lo);
        FaceSample s;
        s.phi = domain3d::boundary_phi(d, w);
        s.theta = domain3d::boundary_theta(d, w);
        s.weight = rule.weights[k] * jac;
        s.payout_scale = payout(s.phi, s.theta);
        const auto sp = std::find_if(spans.begin(), spans.end(), [&](const Span& x) { return s.phi <= x.hi; });
        const auto& dphi = (sp == spans.end() ? spans.back() : *sp).dphi;
        const double st = std::sin(s.theta);
        s.flux.resize(dphi.size());
        for (std::size_t n = 0; n < dphi.size(); ++n) s.flux[n] = theta_w / st * dphi[n];
        out.omega.push_back(std::move(s));
    }
    return out;
}

AdjustmentKernel face_kernel_3d(const model::CdsTerms& terms, const Green3d& g, Face face,
                                const Quadrature3d& q) {
    const double dist = face_distance(g, face);
    if (face == Face::Buyer) {
        const auto s = buyer_face_samples(g, q.nodes_per_edge, q.omega_nodes, q.flux);
        return kernel_from_samples(terms, g, {&s.chart, &s.omega}, dist, q);
    }
    const auto s = side_face_samples(g, face, q.nodes_per_edge, q.flux);
    return kernel_from_samples(terms, g, {&s}, dist, q);
}

double cva_3d(const model::CdsTerms& terms, const Green3d& g, const Quadrature3d& q) {
    return (1.0 - terms.recovery_ps) * face_kernel_3d(terms, g, Face::Seller, q).expected_positive(terms.coupon);
}

double dva_3d(const model::CdsTerms& terms, const Green3d& g, const Quadrature3d& q) {
    return (1.0 - terms.recovery_pb) * face_kernel_3d(terms, g, Face::Buyer, q).expected_negative(terms.coupon);
}

double breakeven_coupon_3d(const model::CdsTerms& terms, const Green3d& g, const Quadrature3d& q) {
    return breakeven_coupons_3d(terms, g, q).bilateral;
}

BreakevenSet breakeven_coupons_3d(const model::CdsTerms& terms, const Green3d& g, const Quadrature3d& q) {
    const auto cva = face_kernel_3d(terms, g, Face::Seller, q);
    const auto dva = face_kernel_3d(terms, g, Face::Buyer, q);
    const double y0 = domain3d::from_spherical(g.domain(), g.source())[1];
    const auto v0 = cds1d::cds_legs_1d(terms.maturity, y0, terms.rate, terms.recovery_rn);
    BreakevenSet out;
    out.risk_free = solve_breakeven(v0, nullptr, terms.recovery_ps, nullptr, terms.recovery_pb);
    out.cva_only = solve_breakeven(v0, &cva, terms.recovery_ps, nullptr, terms.recovery_pb);
    out.dva_only = solve_breakeven(v0, nullptr, terms.recovery_ps, &dva, terms.recovery_pb);
    out.bilateral = solve_breakeven(v0, &cva, terms.recovery_ps, &dva, terms.recovery_pb);
    return out;
}

double first_default_probability(double horizon, const Green3d& g, Face face, const Quadrature3d& q) {
    model::CdsTerms t;
    t.maturity = horizon;
    t.rate = 0.0;
    return face_kernel_3d(t, g, face, q).total_weight();
}

}  // namespace greenxva::cds3d
